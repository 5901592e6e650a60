//! JSON interchange formats for instances, flows and matching instances.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stableflow_core::instance::validate;
use stableflow_core::matching::Tie;
use stableflow_core::stability::{BlockingWalk, Witness};
use stableflow_core::{EdgeId, Flow, Instance, Matching, MatchingInstance};

use crate::error::FormatError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub preferences: BTreeMap<String, PreferenceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default)]
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: u64,
    /// Zero means not forced.
    #[serde(default)]
    pub forced_lower: u64,
    #[serde(default)]
    pub forbidden_upper: Option<u64>,
    #[serde(default)]
    pub free: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceEntry {
    #[serde(rename = "in", default)]
    pub incoming: Vec<String>,
    #[serde(rename = "out", default)]
    pub outgoing: Vec<String>,
}

impl InstanceFile {
    /// Builds the instance without semantic validation; see
    /// [`parse_instance`] for the checked path.
    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        let mut inst = Instance::new();
        let mut vertices = HashMap::new();
        for v in &self.vertices {
            let id = inst.add_vertex(v.id.clone(), v.terminal);
            if vertices.insert(v.id.as_str(), id).is_some() {
                return Err(FormatError::DuplicateVertex(v.id.clone()));
            }
        }
        let vertex = |name: &str, context: &str| {
            vertices.get(name).copied().ok_or_else(|| FormatError::UnknownVertex {
                context: context.to_string(),
                name: name.to_string(),
            })
        };
        let mut edges = HashMap::new();
        for e in &self.edges {
            let context = format!("edge {}", e.id);
            let tail = vertex(&e.tail, &context)?;
            let head = vertex(&e.head, &context)?;
            let id = inst.add_edge_unranked(e.id.clone(), tail, head, e.capacity);
            if edges.insert(e.id.as_str(), id).is_some() {
                return Err(FormatError::DuplicateEdge(e.id.clone()));
            }
            if e.forced_lower > 0 {
                inst.restrictions.forced_lower.insert(id, e.forced_lower);
            }
            if let Some(u) = e.forbidden_upper {
                inst.restrictions.forbidden_upper.insert(id, u);
            }
            if e.free {
                inst.restrictions.free.insert(id);
            }
        }
        for (name, pref) in &self.preferences {
            let context = format!("preferences of {name}");
            let v = vertex(name, &context)?;
            let list = |names: &[String]| {
                names
                    .iter()
                    .map(|n| {
                        edges.get(n.as_str()).copied().ok_or_else(|| FormatError::UnknownEdge {
                            context: context.clone(),
                            name: n.clone(),
                        })
                    })
                    .collect::<Result<Vec<EdgeId>, _>>()
            };
            inst.set_preferences(v, list(&pref.incoming)?, list(&pref.outgoing)?);
        }
        Ok(inst)
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let edge_name = |e: &EdgeId| inst.edges[e.0].name.clone();
        let r = &inst.restrictions;
        InstanceFile {
            vertices: inst
                .vertices
                .iter()
                .map(|v| VertexEntry {
                    id: v.name.clone(),
                    terminal: v.terminal,
                })
                .collect(),
            edges: inst
                .edge_ids()
                .map(|e| {
                    let edge = inst.edge(e);
                    EdgeEntry {
                        id: edge.name.clone(),
                        tail: inst.vertex(edge.tail).name.clone(),
                        head: inst.vertex(edge.head).name.clone(),
                        capacity: edge.capacity,
                        forced_lower: r.forced_lower.get(&e).copied().unwrap_or(0),
                        forbidden_upper: r.forbidden_upper.get(&e).copied(),
                        free: r.free.contains(&e),
                    }
                })
                .collect(),
            preferences: inst
                .vertex_ids()
                .filter(|&v| !inst.is_terminal(v) || !inst.preferences[v.0].is_empty())
                .map(|v| {
                    let p = &inst.preferences[v.0];
                    (
                        inst.vertex(v).name.clone(),
                        PreferenceEntry {
                            incoming: p.incoming.iter().map(edge_name).collect(),
                            outgoing: p.outgoing.iter().map(edge_name).collect(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Parses and converts an instance, then rejects it unless it validates.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let inst = file.to_instance()?;
    let report = validate(&inst);
    if !report.is_ok() {
        return Err(FormatError::Invalid(report));
    }
    Ok(inst)
}

pub fn instance_to_json(inst: &Instance) -> Value {
    serde_json::to_value(InstanceFile::from_instance(inst)).expect("instance serializes")
}

/// Edge name to value, in edge order.
pub fn flow_to_json(inst: &Instance, flow: &Flow) -> Value {
    let map: Map<String, Value> = inst
        .edge_ids()
        .map(|e| (inst.edge(e).name.clone(), Value::from(flow.get(e))))
        .collect();
    Value::Object(map)
}

pub fn edge_values_to_json(inst: &Instance, values: &BTreeMap<EdgeId, u64>) -> Value {
    let map: Map<String, Value> = values
        .iter()
        .map(|(&e, &x)| (inst.edge(e).name.clone(), Value::from(x)))
        .collect();
    Value::Object(map)
}

/// Reads a flow given as an object of edge name to value, either bare or
/// under a `"flow"` key as emitted by `solve`. Missing edges carry zero.
pub fn parse_flow(inst: &Instance, text: &str) -> Result<Flow, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let object = match value {
        Value::Object(mut o) => match o.get("flow") {
            Some(Value::Object(_)) => match o.remove("flow") {
                Some(Value::Object(inner)) => inner,
                _ => unreachable!(),
            },
            _ => o,
        },
        _ => return Err(FormatError::FlowShape),
    };
    let mut flow = Flow::zero(inst.edges.len());
    for (name, x) in object {
        let e = inst.edge_by_name(&name).ok_or_else(|| FormatError::UnknownEdge {
            context: "flow".into(),
            name: name.clone(),
        })?;
        flow[e] = x.as_u64().ok_or(FormatError::FlowValue(name))?;
    }
    Ok(flow)
}

pub fn walk_to_json(inst: &Instance, walk: &BlockingWalk) -> Value {
    let witness = |w: &Witness| match w {
        Witness::Terminal => serde_json::json!({ "kind": "terminal" }),
        Witness::Edge(e) => serde_json::json!({ "kind": "edge", "edge": inst.edge(*e).name }),
    };
    let mut vertices = Vec::new();
    if let Some(first) = walk.edges.first() {
        vertices.push(inst.vertex(inst.edge(*first).tail).name.clone());
    }
    vertices.extend(walk.edges.iter().map(|&e| inst.vertex(inst.edge(e).head).name.clone()));
    serde_json::json!({
        "edges": walk.edges.iter().map(|&e| inst.edge(e).name.clone()).collect::<Vec<_>>(),
        "vertices": vertices,
        "start_witness": witness(&walk.start_witness),
        "end_witness": witness(&walk.end_witness),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingFile {
    pub men: Vec<AgentEntry>,
    pub women: Vec<AgentEntry>,
    #[serde(default)]
    pub pairs: Vec<PairEntry>,
    #[serde(default)]
    pub ties: Vec<TieEntry>,
}

/// A man or woman with a strict preference list, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub id: String,
    pub prefs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Forced,
    Forbidden,
    Free,
}

/// A restriction on an acceptable pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub man: String,
    pub woman: String,
    pub kind: PairKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TieEntry {
    pub man: String,
    pub women: [String; 2],
}

impl MatchingFile {
    pub fn to_matching_instance(&self) -> Result<MatchingInstance, FormatError> {
        let mut mi = MatchingInstance::default();
        for m in &self.men {
            if mi.man_by_name(&m.id).is_some() {
                return Err(FormatError::DuplicateVertex(m.id.clone()));
            }
            mi.add_man(m.id.clone());
        }
        for w in &self.women {
            if mi.woman_by_name(&w.id).is_some() {
                return Err(FormatError::DuplicateVertex(w.id.clone()));
            }
            mi.add_woman(w.id.clone());
        }
        let unknown = |context: &str, name: &str| FormatError::UnknownVertex {
            context: context.to_string(),
            name: name.to_string(),
        };
        let man = |name: &str, context: &str| mi.man_by_name(name).ok_or_else(|| unknown(context, name));
        let woman = |name: &str, context: &str| mi.woman_by_name(name).ok_or_else(|| unknown(context, name));
        let mut man_prefs = Vec::new();
        for m in &self.men {
            let context = format!("preferences of {}", m.id);
            man_prefs.push(m.prefs.iter().map(|w| woman(w, &context)).collect::<Result<Vec<_>, _>>()?);
        }
        let mut woman_prefs = Vec::new();
        for w in &self.women {
            let context = format!("preferences of {}", w.id);
            woman_prefs.push(w.prefs.iter().map(|m| man(m, &context)).collect::<Result<Vec<_>, _>>()?);
        }
        let mut ties = Vec::new();
        for t in &self.ties {
            let context = format!("tie of {}", t.man);
            ties.push(Tie {
                man: man(&t.man, &context)?,
                women: [woman(&t.women[0], &context)?, woman(&t.women[1], &context)?],
            });
        }
        let mut pairs = Vec::new();
        for p in &self.pairs {
            let context = format!("pair {} {}", p.man, p.woman);
            pairs.push(((man(&p.man, &context)?, woman(&p.woman, &context)?), p.kind));
        }
        mi.man_prefs = man_prefs;
        mi.woman_prefs = woman_prefs;
        mi.ties = ties;
        for (pair, kind) in pairs {
            match kind {
                PairKind::Forced => mi.forced.insert(pair),
                PairKind::Forbidden => mi.forbidden.insert(pair),
                PairKind::Free => mi.free.insert(pair),
            };
        }
        Ok(mi)
    }

    pub fn from_matching_instance(mi: &MatchingInstance) -> Self {
        let agents = |names: &[String], prefs: &[Vec<usize>], other: &[String]| {
            names
                .iter()
                .zip(prefs)
                .map(|(id, list)| AgentEntry {
                    id: id.clone(),
                    prefs: list.iter().map(|&x| other[x].clone()).collect(),
                })
                .collect()
        };
        let pair = |&(m, w): &(usize, usize), kind| PairEntry {
            man: mi.men[m].clone(),
            woman: mi.women[w].clone(),
            kind,
        };
        let mut pairs: Vec<PairEntry> = Vec::new();
        pairs.extend(mi.forced.iter().map(|p| pair(p, PairKind::Forced)));
        pairs.extend(mi.forbidden.iter().map(|p| pair(p, PairKind::Forbidden)));
        pairs.extend(mi.free.iter().map(|p| pair(p, PairKind::Free)));
        MatchingFile {
            men: agents(&mi.men, &mi.man_prefs, &mi.women),
            women: agents(&mi.women, &mi.woman_prefs, &mi.men),
            pairs,
            ties: mi
                .ties
                .iter()
                .map(|t| TieEntry {
                    man: mi.men[t.man].clone(),
                    women: [mi.women[t.women[0]].clone(), mi.women[t.women[1]].clone()],
                })
                .collect(),
        }
    }
}

/// Parses and converts a matching instance, then rejects it unless it
/// validates.
pub fn parse_matching(text: &str) -> Result<MatchingInstance, FormatError> {
    let file: MatchingFile = serde_json::from_str(text)?;
    let mi = file.to_matching_instance()?;
    mi.validate()?;
    Ok(mi)
}

pub fn matching_instance_to_json(mi: &MatchingInstance) -> Value {
    serde_json::to_value(MatchingFile::from_matching_instance(mi)).expect("matching serializes")
}

/// Pairs as `[man, woman]` name arrays.
pub fn matching_to_json(mi: &MatchingInstance, m: &Matching) -> Value {
    m.pairs
        .iter()
        .map(|&(a, b)| serde_json::json!([mi.men[a], mi.women[b]]))
        .collect()
}
