//! Stable flows with forced and forbidden edges.
//!
//! Forced edges are removed and replaced by an edge from a new source to
//! their head and an edge from their tail to a new sink, both taking over the
//! removed edge's ranks. Since every stable flow puts the same value on
//! terminal edges, one stable flow of the substituted network decides
//! whether the forced edges can be saturated.
//!
//! Forbidden edges are handled one at a time. For a forbidden edge `uv` the
//! solver first adds a capacity-1 edge from a fresh source to `v`, ranked
//! directly above `uv`; if no flow enters it in the new stable flow, the edge
//! stays. Otherwise it tries an edge from `u` to a fresh sink ranked directly
//! above `uv` on `u`'s list. If both attempts fail, no stable flow avoids the
//! forbidden edges.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{InstanceError, SolveError};
use crate::gale_shapley::{solve_on_augmented, solve_stable_flow};
use crate::instance::{
    split_forbidden_lower, split_forced_lower, validate, EdgeId, EdgeMap, Flow, Instance, Side,
    VertexId,
};
use crate::stability::{check_feasible, find_blocking_walk, BoundCheck};

/// Which auxiliary edge protects a forbidden edge `uv`: `s -> v` or `u -> t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AuxKind {
    Source,
    Sink,
}

impl AuxKind {
    pub fn label(self) -> &'static str {
        match self {
            AuxKind::Source => "sv",
            AuxKind::Sink => "ut",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForcedSubstitute {
    /// The forced edge. In the reduced instance this id is the source edge.
    pub forced: EdgeId,
    pub source_edge: EdgeId,
    pub sink_edge: EdgeId,
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedReduction {
    pub instance: Instance,
    pub source: Option<VertexId>,
    pub sink: Option<VertexId>,
    pub substitutes: Vec<ForcedSubstitute>,
}

/// Replaces every completely forced edge `uv` by `s -> v` and `u -> t`, both
/// of capacity `c(uv)` and at `uv`'s positions. The forced edge's id is
/// reused for `s -> v`; the `u -> t` edges are appended. All forced edges
/// share one source and one sink, which are only added when needed.
pub fn build_forced_substitution(instance: &Instance) -> Result<ForcedReduction, InstanceError> {
    let mut d = instance.clone();
    let forced: Vec<EdgeId> = instance.restrictions.forced().map(|(e, _)| e).collect();
    for &e in &forced {
        let edge = &instance.edges[e.0];
        if instance.restrictions.forced_lower[&e] < edge.capacity {
            return Err(InstanceError::PartiallyForced(edge.name.clone()));
        }
    }
    d.restrictions.forced_lower.clear();
    if forced.is_empty() {
        return Ok(ForcedReduction {
            instance: d,
            source: None,
            sink: None,
            substitutes: Vec::new(),
        });
    }
    let s_name = d.fresh_vertex_name("s");
    let s = d.add_vertex(s_name, true);
    let t_name = d.fresh_vertex_name("t");
    let t = d.add_vertex(t_name, true);
    let mut substitutes = Vec::with_capacity(forced.len());
    for e in forced {
        let edge = d.edges[e.0].clone();
        d.restrictions.free.remove(&e);
        d.edges[e.0].tail = s;
        d.edges[e.0].name = d.fresh_edge_name(&format!("{}:s", edge.name));
        let sink_name = d.fresh_edge_name(&format!("{}:t", edge.name));
        let ut = d.add_edge_unranked(sink_name, edge.tail, t, edge.capacity);
        if !d.is_terminal(edge.tail) {
            let out = &mut d.preferences[edge.tail.0].outgoing;
            let pos = out
                .iter()
                .position(|&x| x == e)
                .ok_or(InstanceError::AnchorMissing)?;
            out[pos] = ut;
        }
        substitutes.push(ForcedSubstitute {
            forced: e,
            source_edge: e,
            sink_edge: ut,
            capacity: edge.capacity,
        });
    }
    Ok(ForcedReduction {
        instance: d,
        source: Some(s),
        sink: Some(t),
        substitutes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// A forced edge cannot be saturated by any stable flow.
    ForcedUnsaturated,
    /// Neither auxiliary edge of this forbidden edge stays empty.
    ForbiddenUnavoidable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Infeasibility {
    /// Edge id of the input instance.
    pub edge: EdgeId,
    pub reason: InfeasibleReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxEdge {
    pub forbidden: EdgeId,
    pub kind: AuxKind,
    pub edge: EdgeId,
    pub terminal: VertexId,
}

/// Progress of the forbidden-edge loop. Edge ids refer to `instance`, the
/// current working network; forbidden edges are processed from `p3` and
/// moved to `p1` (kept a source edge) or `p2` (kept a sink edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenState {
    pub p1: Vec<EdgeId>,
    pub p2: Vec<EdgeId>,
    pub p3: Vec<EdgeId>,
    pub instance: Instance,
    pub aux: Vec<AuxEdge>,
    pub iteration: usize,
    /// A stable flow on `instance`.
    pub flow: Flow,
}

impl ForbiddenState {
    /// The partition covers `all` exactly once and the auxiliary edges match
    /// `p1` and `p2` one to one.
    pub fn invariants_hold(&self, all: &[EdgeId]) -> bool {
        let mut seen = BTreeSet::new();
        let disjoint = self
            .p1
            .iter()
            .chain(&self.p2)
            .chain(&self.p3)
            .all(|&e| seen.insert(e));
        let covers = seen == all.iter().copied().collect::<BTreeSet<_>>();
        let aux_ok = self.aux.len() == self.p1.len() + self.p2.len()
            && self.p1.iter().all(|e| {
                self.aux
                    .iter()
                    .any(|a| a.forbidden == *e && a.kind == AuxKind::Source)
            })
            && self.p2.iter().all(|e| {
                self.aux
                    .iter()
                    .any(|a| a.forbidden == *e && a.kind == AuxKind::Sink)
            });
        disjoint && covers && aux_ok
    }

    /// Every auxiliary edge and every handled forbidden edge is empty.
    pub fn zero_on_handled(&self) -> bool {
        self.aux.iter().all(|a| self.flow[a.edge] == 0)
            && self.p1.iter().chain(&self.p2).all(|&e| self.flow[e] == 0)
    }
}

/// Adds the auxiliary edge of the given kind for the completely forbidden
/// edge `uv`, with capacity 1 and a fresh terminal, ranked directly above
/// `uv` at `v` (source kind) or at `u` (sink kind).
pub fn augment_for_forbidden(
    instance: &Instance,
    uv: EdgeId,
    kind: AuxKind,
) -> Result<(Instance, EdgeId, VertexId), InstanceError> {
    let edge = instance
        .edges
        .get(uv.0)
        .ok_or(InstanceError::UnknownEdge(uv.0))?
        .clone();
    if instance.restrictions.forbidden_upper.get(&uv) != Some(&0) {
        return Err(InstanceError::NotForbidden(edge.name));
    }
    let mut d = instance.clone();
    let (terminal_base, at, side) = match kind {
        AuxKind::Source => (format!("s[{}]", edge.name), edge.head, Side::In),
        AuxKind::Sink => (format!("t[{}]", edge.name), edge.tail, Side::Out),
    };
    let terminal_name = d.fresh_vertex_name(&terminal_base);
    let terminal = d.add_vertex(terminal_name.clone(), true);
    let aux = match kind {
        AuxKind::Source => {
            let name = d.fresh_edge_name(&format!("{}->{}", terminal_name, d.vertex(at).name));
            d.add_edge_unranked(name, terminal, at, 1)
        }
        AuxKind::Sink => {
            let name = d.fresh_edge_name(&format!("{}->{}", d.vertex(at).name, terminal_name));
            d.add_edge_unranked(name, at, terminal, 1)
        }
    };
    if !d.is_terminal(at) {
        d.insert_rank_before(at, side, uv, aux)?;
    }
    Ok((d, aux, terminal))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProcessingOrder {
    #[default]
    Ascending,
    Descending,
}

#[allow(clippy::large_enum_variant)]
enum LoopOutcome {
    Done(ForbiddenState),
    Stuck(EdgeId),
}

fn accepts(state: &ForbiddenState, flow: &Flow, aux: EdgeId, uv: EdgeId) -> bool {
    flow[aux] == 0
        && flow[uv] == 0
        && state.aux.iter().all(|a| flow[a.edge] == 0)
        && state.p1.iter().chain(&state.p2).all(|&e| flow[e] == 0)
}

fn forbidden_loop(d0: Instance, order: Vec<EdgeId>) -> Result<LoopOutcome, SolveError> {
    let flow = solve_stable_flow(&d0)?;
    let mut state = ForbiddenState {
        p1: Vec::new(),
        p2: Vec::new(),
        p3: order.clone(),
        instance: d0,
        aux: Vec::new(),
        iteration: 0,
        flow,
    };
    while let Some(&uv) = state.p3.first() {
        let (d_s, sv, s) = augment_for_forbidden(&state.instance, uv, AuxKind::Source)?;
        let mut prior = state.flow.clone().into_values();
        prior.push(0);
        let f = solve_on_augmented(&d_s, &Flow::from_values(prior), &[sv])?;
        let step = if accepts(&state, &f, sv, uv) {
            Some((d_s, sv, s, AuxKind::Source, f))
        } else {
            let (d_t, ut, t) = augment_for_forbidden(&state.instance, uv, AuxKind::Sink)?;
            let f = solve_stable_flow(&d_t)?;
            accepts(&state, &f, ut, uv).then_some((d_t, ut, t, AuxKind::Sink, f))
        };
        let Some((d, aux, terminal, kind, f)) = step else {
            return Ok(LoopOutcome::Stuck(uv));
        };
        state.p3.remove(0);
        match kind {
            AuxKind::Source => state.p1.push(uv),
            AuxKind::Sink => state.p2.push(uv),
        }
        state.aux.push(AuxEdge {
            forbidden: uv,
            kind,
            edge: aux,
            terminal,
        });
        state.instance = d;
        state.flow = f;
        state.iteration += 1;
        debug_assert!(state.invariants_hold(&order));
        debug_assert!(state.zero_on_handled());
    }
    Ok(LoopOutcome::Done(state))
}

/// Completely forbidden edges of the working network, sorted by the input
/// edge they come from.
fn forbidden_order(instance: &Instance, map: &EdgeMap, order: ProcessingOrder) -> Vec<EdgeId> {
    let mut p: Vec<EdgeId> = instance
        .restrictions
        .forbidden()
        .filter(|&(_, u)| u == 0)
        .map(|(e, _)| e)
        .collect();
    p.sort_by_key(|&e| (map.origin(e), e));
    if order == ProcessingOrder::Descending {
        p.reverse();
    }
    p
}

/// An audited stable flow meeting all restrictions, with the trail of the
/// forbidden-edge loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSolution {
    /// Flow on the input instance's edges.
    pub flow: Flow,
    /// Forbidden edges (input ids) protected by a source edge.
    pub p1: Vec<EdgeId>,
    /// Forbidden edges (input ids) protected by a sink edge.
    pub p2: Vec<EdgeId>,
    /// Final loop state on the working network, if there were forbidden edges.
    pub state: Option<ForbiddenState>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Verdict {
    Feasible(RestrictedSolution),
    Infeasible(Infeasibility),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn flow(&self) -> Option<&Flow> {
        match self {
            Verdict::Feasible(s) => Some(&s.flow),
            Verdict::Infeasible(_) => None,
        }
    }
}

fn audit(instance: &Instance, flow: &Flow) -> Result<(), SolveError> {
    check_feasible(instance, flow, BoundCheck::Restrictions).map_err(SolveError::AuditFailed)?;
    match find_blocking_walk(instance, flow, &BTreeSet::new()) {
        Ok(None) => Ok(()),
        Ok(Some(w)) => Err(SolveError::Unstable(w)),
        Err(v) => Err(SolveError::AuditFailed(v)),
    }
}

fn ensure_valid(instance: &Instance) -> Result<(), SolveError> {
    let report = validate(instance);
    if report.is_ok() {
        Ok(())
    } else {
        Err(SolveError::Invalid(report))
    }
}

/// Stable flow with `f(e) >= u(e)` on every forced edge, or the first forced
/// edge that no stable flow can fill. Forbidden annotations are ignored.
pub fn solve_forced(instance: &Instance) -> Result<Verdict, SolveError> {
    ensure_valid(instance)?;
    let mut base = instance.clone();
    base.restrictions.forbidden_upper.clear();
    let (split, map) = split_forced_lower(&base);
    let reduction = build_forced_substitution(&split)?;
    let f = solve_stable_flow(&reduction.instance)?;
    if let Some(sub) = first_unsaturated(&reduction, &f) {
        return Ok(Verdict::Infeasible(Infeasibility {
            edge: origin(&map, sub.forced),
            reason: InfeasibleReason::ForcedUnsaturated,
        }));
    }
    let flow = map.pull_back(&f.truncated(split.edges.len()));
    audit(&base, &flow)?;
    Ok(Verdict::Feasible(RestrictedSolution {
        flow,
        p1: Vec::new(),
        p2: Vec::new(),
        state: None,
    }))
}

fn first_unsaturated<'a>(reduction: &'a ForcedReduction, f: &Flow) -> Option<&'a ForcedSubstitute> {
    reduction
        .substitutes
        .iter()
        .find(|s| f[s.source_edge] != s.capacity || f[s.sink_edge] != s.capacity)
}

fn origin(map: &EdgeMap, e: EdgeId) -> EdgeId {
    map.origin(e).expect("working edge comes from an input edge")
}

/// Stable flow with `f(e) <= u(e)` on every forbidden edge, processing
/// forbidden edges in ascending id order. Forced annotations are ignored.
pub fn solve_forbidden(instance: &Instance) -> Result<Verdict, SolveError> {
    solve_forbidden_ordered(instance, ProcessingOrder::Ascending)
}

pub fn solve_forbidden_ordered(
    instance: &Instance,
    order: ProcessingOrder,
) -> Result<Verdict, SolveError> {
    ensure_valid(instance)?;
    let mut base = instance.clone();
    base.restrictions.forced_lower.clear();
    solve_combined(&base, order)
}

/// Stable flow meeting forced lower bounds and forbidden upper bounds
/// together: forced edges are substituted first and the forbidden loop runs
/// on the substituted network.
pub fn solve_restricted(instance: &Instance) -> Result<Verdict, SolveError> {
    ensure_valid(instance)?;
    solve_combined(instance, ProcessingOrder::Ascending)
}

fn solve_combined(instance: &Instance, order: ProcessingOrder) -> Result<Verdict, SolveError> {
    let (s1, m1) = split_forced_lower(instance);
    let (s2, m2) = split_forbidden_lower(&s1);
    let map = m1.then(&m2);
    let reduction = build_forced_substitution(&s2)?;
    let p = forbidden_order(&reduction.instance, &map, order);
    let state = match forbidden_loop(reduction.instance.clone(), p)? {
        LoopOutcome::Done(state) => state,
        LoopOutcome::Stuck(uv) => {
            return Ok(Verdict::Infeasible(Infeasibility {
                edge: origin(&map, uv),
                reason: InfeasibleReason::ForbiddenUnavoidable,
            }))
        }
    };
    if let Some(sub) = first_unsaturated(&reduction, &state.flow) {
        return Ok(Verdict::Infeasible(Infeasibility {
            edge: origin(&map, sub.forced),
            reason: InfeasibleReason::ForcedUnsaturated,
        }));
    }
    let flow = map.pull_back(&state.flow.truncated(s2.edges.len()));
    audit(instance, &flow)?;
    let to_input = |v: &Vec<EdgeId>| v.iter().map(|&e| origin(&map, e)).collect();
    Ok(Verdict::Feasible(RestrictedSolution {
        flow,
        p1: to_input(&state.p1),
        p2: to_input(&state.p2),
        state: (!state.aux.is_empty() || !state.p3.is_empty()).then_some(state),
    }))
}
