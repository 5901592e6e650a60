//! Subcommand implementations. Each returns an exit code and a JSON payload;
//! operational failures come back as [`Error`].

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use stableflow_core::gadgets::{build_figure_matching, build_section4_example, gadgetize_ties};
use stableflow_core::generate::{random_instance, random_matching_instance, InstanceParams, MatchingParams};
use stableflow_core::matching::matching_to_flow;
use stableflow_core::oracle::{Clock, Invariance};
use stableflow_core::restricted::InfeasibleReason;
use stableflow_core::{
    check_feasible, find_blocking_walk, flow_value, solve_restricted, solve_stable_flow,
    terminal_profile, validate, BoundCheck, EdgeId, EnumerationBudget, Flow, Instance, Objective,
    Oracle, SolveError, Verdict,
};

use crate::error::{Error, FormatError};
use crate::format::{
    edge_values_to_json, flow_to_json, instance_to_json, matching_instance_to_json, parse_flow,
    parse_instance, parse_matching, walk_to_json, InstanceFile, MatchingFile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Ok = 0,
    Error = 1,
    Verdict = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: Code,
    pub payload: Value,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome {
            code: Code::Ok,
            payload,
        }
    }

    fn verdict(payload: Value) -> Self {
        Outcome {
            code: Code::Verdict,
            payload,
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn located(path: &Path) -> impl Fn(FormatError) -> Error + '_ {
    move |source| Error::Format {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, Error> {
    parse_instance(&read(path)?).map_err(located(path))
}

pub fn write_payload(path: &Path, payload: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(payload).expect("payload serializes") + "\n";
    std::fs::write(path, text).map_err(|source| Error::Write {
        path: PathBuf::from(path),
        source,
    })
}

fn names(inst: &Instance, edges: &[EdgeId]) -> Vec<String> {
    edges.iter().map(|&e| inst.edge(e).name.clone()).collect()
}

fn flow_summary(inst: &Instance, flow: &Flow) -> Value {
    json!({
        "flow": flow_to_json(inst, flow),
        "value": flow_value(inst, flow),
        "profile": edge_values_to_json(inst, &terminal_profile(inst, flow)),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

/// Reports structural problems. Invalid input exits with [`Code::Error`]
/// but still prints the report.
pub fn validate_file(path: &Path, matching: bool) -> Result<Outcome, Error> {
    let text = read(path)?;
    let (summary, violations): (Value, Vec<String>) = if matching {
        let file: MatchingFile = serde_json::from_str(&text).map_err(|e| located(path)(e.into()))?;
        let mi = file.to_matching_instance().map_err(located(path))?;
        let violations = mi.validate().err().map(|e| e.to_string()).into_iter().collect();
        let summary = json!({
            "men": mi.men.len(),
            "women": mi.women.len(),
            "pairs": mi.pairs().count(),
            "ties": mi.ties.len(),
        });
        (summary, violations)
    } else {
        let file: InstanceFile = serde_json::from_str(&text).map_err(|e| located(path)(e.into()))?;
        let inst = file.to_instance().map_err(located(path))?;
        let r = &inst.restrictions;
        let summary = json!({
            "vertices": inst.vertex_count(),
            "edges": inst.edge_count(),
            "forced": r.forced_lower.len(),
            "forbidden": r.forbidden_upper.len(),
            "free": r.free.len(),
        });
        let violations = validate(&inst).violations.iter().map(|v| v.to_string()).collect();
        (summary, violations)
    };
    let valid = violations.is_empty();
    let payload = merge(json!({ "valid": valid, "violations": violations }), summary);
    Ok(Outcome {
        code: if valid { Code::Ok } else { Code::Error },
        payload,
    })
}

/// Classic mode ignores restriction annotations. Restricted mode honours
/// forced and forbidden edges and reports an infeasible verdict with the
/// edge that caused it.
pub fn solve(path: &Path, restricted: bool) -> Result<Outcome, Error> {
    let inst = load_instance(path)?;
    if !restricted {
        let flow = solve_stable_flow(&inst)?;
        return Ok(Outcome::ok(merge(json!({ "verdict": "stable" }), flow_summary(&inst, &flow))));
    }
    Ok(match solve_restricted(&inst)? {
        Verdict::Feasible(sol) => {
            let mut extra = json!({
                "p1": names(&inst, &sol.p1),
                "p2": names(&inst, &sol.p2),
                "aux": [],
                "iterations": 0,
            });
            if let Some(state) = &sol.state {
                let w = &state.instance;
                extra["aux"] = state
                    .aux
                    .iter()
                    .map(|a| {
                        json!({
                            "kind": a.kind.label(),
                            "edge": w.edge(a.edge).name,
                            "terminal": w.vertex(a.terminal).name,
                            "flow": state.flow.get(a.edge),
                        })
                    })
                    .collect();
                extra["iterations"] = state.iteration.into();
            }
            let body = merge(json!({ "verdict": "feasible" }), flow_summary(&inst, &sol.flow));
            Outcome::ok(merge(body, extra))
        }
        Verdict::Infeasible(why) => Outcome::verdict(json!({
            "verdict": "infeasible",
            "edge": inst.edge(why.edge).name,
            "reason": match why.reason {
                InfeasibleReason::ForcedUnsaturated => "forced_unsaturated",
                InfeasibleReason::ForbiddenUnavoidable => "forbidden_unavoidable",
            },
        })),
    })
}

/// Feasibility first, then stability. Free edges are honoured only when
/// `free_aware` is set.
pub fn check(instance: &Path, flow: &Path, free_aware: bool, bounds: bool) -> Result<Outcome, Error> {
    let inst = load_instance(instance)?;
    let f = parse_flow(&inst, &read(flow)?).map_err(located(flow))?;
    let mode = if bounds {
        BoundCheck::Restrictions
    } else {
        BoundCheck::Capacity
    };
    if let Err(v) = check_feasible(&inst, &f, mode) {
        return Ok(Outcome::verdict(json!({
            "feasible": false,
            "stable": false,
            "violation": v.to_string(),
            "walk": null,
        })));
    }
    let free = if free_aware {
        inst.restrictions.free.clone()
    } else {
        BTreeSet::new()
    };
    let walk = find_blocking_walk(&inst, &f, &free).map_err(|v| Error::Solve(SolveError::Infeasible(v)))?;
    let payload = json!({
        "feasible": true,
        "stable": walk.is_none(),
        "violation": null,
        "walk": walk.as_ref().map(|w| walk_to_json(&inst, w)),
    });
    Ok(match walk {
        None => Outcome::ok(payload),
        Some(_) => Outcome::verdict(payload),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Enumerate,
    Optimal,
    Invariance,
    Restricted,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub objective: Objective,
    /// Honour the instance's free edges.
    pub free: bool,
    pub budget: EnumerationBudget,
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

/// Exhaustive search. Exceeding the budget is an error, never a partial
/// answer.
pub fn oracle(path: &Path, mode: OracleMode, opts: OracleOptions) -> Result<Outcome, Error> {
    let inst = load_instance(path)?;
    let clock = WallClock(Instant::now());
    let oracle = Oracle::with_clock(opts.budget, &clock);
    let free = if opts.free {
        inst.restrictions.free.clone()
    } else {
        BTreeSet::new()
    };
    Ok(match mode {
        OracleMode::Enumerate => {
            let flows = oracle.enumerate_stable_flows(&inst, &free)?;
            Outcome::ok(json!({
                "count": flows.len(),
                "flows": flows.iter().map(|f| flow_summary(&inst, f)).collect::<Vec<_>>(),
            }))
        }
        OracleMode::Optimal => {
            let (value, flow) = oracle.optimal_free_stable_value(&inst, &free, opts.objective)?;
            Outcome::ok(json!({
                "objective": match opts.objective {
                    Objective::Max => "max",
                    Objective::Min => "min",
                },
                "value": value,
                "flow": flow_to_json(&inst, &flow),
            }))
        }
        OracleMode::Invariance => match oracle.check_terminal_invariance(&inst, &free)? {
            Invariance::Holds { stable_flows } => Outcome::ok(json!({
                "holds": true,
                "stable_flows": stable_flows,
                "counterexample": null,
            })),
            Invariance::Counterexample(a, b) => Outcome::verdict(json!({
                "holds": false,
                "stable_flows": null,
                "counterexample": [flow_summary(&inst, &a), flow_summary(&inst, &b)],
            })),
        },
        OracleMode::Restricted => match oracle.find_restricted_stable_flow(&inst)? {
            Some(flow) => Outcome::ok(merge(json!({ "feasible": true }), flow_summary(&inst, &flow))),
            None => Outcome::verdict(json!({ "feasible": false })),
        },
    })
}

/// Replaces every tie by the gadget. With `as_flow` the result is emitted as
/// a unit-capacity flow instance.
pub fn gadget(path: &Path, as_flow: bool) -> Result<Outcome, Error> {
    let mi = parse_matching(&read(path)?).map_err(located(path))?;
    let (g, map) = gadgetize_ties(&mi)?;
    let gadgets: Vec<Value> = map
        .gadgets
        .iter()
        .map(|t| {
            json!({
                "man": g.men[t.m],
                "w1": g.women[t.w1],
                "w2": g.women[t.w2],
                "a": g.women[t.a],
                "b": g.men[t.b],
                "c": g.women[t.c],
                "d": g.men[t.d],
            })
        })
        .collect();
    let instance = if as_flow {
        instance_to_json(&matching_to_flow(&g)?.0)
    } else {
        matching_instance_to_json(&g)
    };
    Ok(Outcome::ok(json!({
        "instance": instance,
        "gadgets": gadgets,
        "offset": map.offset(),
    })))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generate {
    Flow(InstanceParams),
    Matching(MatchingParams),
    /// The unit-capacity example with a free edge.
    FreeEdge,
    /// The matching instance with one tie used to illustrate the gadget.
    TieFigure,
}

/// Deterministic in the parameters and seed.
pub fn generate(what: Generate, seed: u64) -> Outcome {
    Outcome::ok(match what {
        Generate::Flow(p) => instance_to_json(&random_instance(&p, seed)),
        Generate::Matching(p) => matching_instance_to_json(&random_matching_instance(&p, seed)),
        Generate::FreeEdge => instance_to_json(&build_section4_example()),
        Generate::TieFigure => matching_instance_to_json(&build_figure_matching()),
    })
}
