//! Feasibility and stability of flows.
//!
//! A blocking walk is a directed walk of unsaturated edges whose first edge
//! either leaves a terminal or is preferred by its tail to some outgoing edge
//! carrying flow, and symmetrically for the last edge at its head. A feasible
//! flow is stable when no blocking walk exists. Free edges may not appear on
//! a blocking walk, but may still act as the dominated edge at either end.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{EdgeId, Flow, Instance, Ranks, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Terminal,
    Edge(EdgeId),
}

/// Certificate of instability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingWalk {
    pub edges: Vec<EdgeId>,
    pub start_witness: Witness,
    pub end_witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundCheck {
    /// Capacities and Kirchhoff balance only.
    Capacity,
    /// Also forced lower and forbidden upper bounds.
    Restrictions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowViolation {
    LengthMismatch { expected: usize, found: usize },
    CapacityExceeded { edge: String },
    Imbalance { vertex: String, inflow: u64, outflow: u64 },
    BelowLowerBound { edge: String },
    AboveUpperBound { edge: String },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowViolation::LengthMismatch { expected, found } => {
                write!(f, "flow has {found} values for {expected} edges")
            }
            FlowViolation::CapacityExceeded { edge } => write!(f, "capacity exceeded at {edge}"),
            FlowViolation::Imbalance {
                vertex,
                inflow,
                outflow,
            } => write!(
                f,
                "Kirchhoff balance violated at {vertex} (in {inflow}, out {outflow})"
            ),
            FlowViolation::BelowLowerBound { edge } => {
                write!(f, "forced lower bound violated at {edge}")
            }
            FlowViolation::AboveUpperBound { edge } => {
                write!(f, "forbidden upper bound violated at {edge}")
            }
        }
    }
}

/// Capacity bounds and Kirchhoff balance at non-terminals, plus restriction
/// bounds when `bounds` asks for them. Reports the first failing edge or
/// vertex.
pub fn check_feasible(
    instance: &Instance,
    flow: &Flow,
    bounds: BoundCheck,
) -> Result<(), FlowViolation> {
    let m = instance.edges.len();
    if flow.len() != m {
        return Err(FlowViolation::LengthMismatch {
            expected: m,
            found: flow.len(),
        });
    }
    let n = instance.vertices.len();
    let mut inflow = vec![0u64; n];
    let mut outflow = vec![0u64; n];
    for (i, e) in instance.edges.iter().enumerate() {
        let x = flow.values()[i];
        if x > e.capacity {
            return Err(FlowViolation::CapacityExceeded {
                edge: e.name.clone(),
            });
        }
        outflow[e.tail.0] += x;
        inflow[e.head.0] += x;
    }
    for (v, vertex) in instance.vertices.iter().enumerate() {
        if !vertex.terminal && inflow[v] != outflow[v] {
            return Err(FlowViolation::Imbalance {
                vertex: vertex.name.clone(),
                inflow: inflow[v],
                outflow: outflow[v],
            });
        }
    }
    if bounds == BoundCheck::Restrictions {
        let r = &instance.restrictions;
        for (e, u) in r.forced() {
            if flow[e] < u {
                return Err(FlowViolation::BelowLowerBound {
                    edge: instance.edges[e.0].name.clone(),
                });
            }
        }
        for (e, u) in r.forbidden() {
            if flow[e] > u {
                return Err(FlowViolation::AboveUpperBound {
                    edge: instance.edges[e.0].name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Worst-ranked outgoing and incoming edge with positive flow at every vertex.
pub(crate) struct WorstPositive {
    pub out: Vec<Option<EdgeId>>,
    pub inc: Vec<Option<EdgeId>>,
}

pub(crate) fn worst_positive(instance: &Instance, flow: &Flow) -> WorstPositive {
    let n = instance.vertices.len();
    let mut out = vec![None; n];
    let mut inc = vec![None; n];
    for (v, pref) in instance.preferences.iter().enumerate() {
        out[v] = pref.outgoing.iter().rev().copied().find(|&e| flow[e] > 0);
        inc[v] = pref.incoming.iter().rev().copied().find(|&e| flow[e] > 0);
    }
    WorstPositive { out, inc }
}

/// Classifies candidate walk edges by the end conditions of a blocking walk.
pub(crate) struct EndConditions<'a> {
    instance: &'a Instance,
    ranks: Ranks,
    worst: WorstPositive,
}

impl<'a> EndConditions<'a> {
    pub fn new(instance: &'a Instance, flow: &Flow) -> Self {
        EndConditions {
            instance,
            ranks: instance.ranks(),
            worst: worst_positive(instance, flow),
        }
    }

    /// Witness at the tail if `e` may start a blocking walk.
    pub fn start_witness(&self, e: EdgeId) -> Option<Witness> {
        let tail = self.instance.edges[e.0].tail;
        if self.instance.is_terminal(tail) {
            return Some(Witness::Terminal);
        }
        let w = self.worst.out[tail.0]?;
        self.ranks.tail_prefers(e, w).then_some(Witness::Edge(w))
    }

    pub fn end_witness(&self, e: EdgeId) -> Option<Witness> {
        let head = self.instance.edges[e.0].head;
        if self.instance.is_terminal(head) {
            return Some(Witness::Terminal);
        }
        let w = self.worst.inc[head.0]?;
        self.ranks.head_prefers(e, w).then_some(Witness::Edge(w))
    }
}

/// Searches for a blocking walk avoiding `free` edges.
///
/// Breadth-first search over the line graph of unsaturated non-free edges,
/// started from every edge that satisfies the start condition, in ascending
/// edge-id order. The first dequeued edge satisfying the end condition closes
/// the walk. Witnesses are the worst positive-flow edges at the endpoints.
pub fn find_blocking_walk(
    instance: &Instance,
    flow: &Flow,
    free: &BTreeSet<EdgeId>,
) -> Result<Option<BlockingWalk>, FlowViolation> {
    check_feasible(instance, flow, BoundCheck::Capacity)?;
    let m = instance.edges.len();
    let eligible: Vec<bool> = instance
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| flow.values()[i] < e.capacity && !free.contains(&EdgeId(i)))
        .collect();
    let adj = instance.adjacency();
    let ends = EndConditions::new(instance, flow);

    let mut pred: Vec<Option<EdgeId>> = vec![None; m];
    let mut seen = vec![false; m];
    let mut queue = VecDeque::new();
    for e in instance.edge_ids() {
        if eligible[e.0] && ends.start_witness(e).is_some() {
            seen[e.0] = true;
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        if let Some(end_witness) = ends.end_witness(e) {
            let mut edges = vec![e];
            let mut cur = e;
            while let Some(p) = pred[cur.0] {
                edges.push(p);
                cur = p;
            }
            edges.reverse();
            let start_witness = ends
                .start_witness(edges[0])
                .expect("walk starts at a start edge");
            return Ok(Some(BlockingWalk {
                edges,
                start_witness,
                end_witness,
            }));
        }
        let head: VertexId = instance.edges[e.0].head;
        for &next in &adj.out[head.0] {
            if eligible[next.0] && !seen[next.0] {
                seen[next.0] = true;
                pred[next.0] = Some(e);
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

/// Feasible and free of blocking walks outside `free`. Infeasible flows,
/// including flows of the wrong length, are not stable.
pub fn is_stable(instance: &Instance, flow: &Flow, free: &BTreeSet<EdgeId>) -> bool {
    matches!(find_blocking_walk(instance, flow, free), Ok(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::build_section4_example;

    fn named(i: &Instance, names: &[(&str, u64)]) -> Flow {
        let mut f = Flow::zero(i.edges.len());
        for &(n, x) in names {
            f[i.edge_by_name(n).unwrap()] = x;
        }
        f
    }

    #[test]
    fn zero_flow_is_feasible() {
        let i = build_section4_example();
        assert_eq!(
            check_feasible(&i, &Flow::zero(5), BoundCheck::Restrictions),
            Ok(())
        );
    }

    #[test]
    fn capacity_violation_names_edge() {
        let i = build_section4_example();
        let f = named(&i, &[("su", 2), ("ut", 2)]);
        assert_eq!(
            check_feasible(&i, &f, BoundCheck::Capacity),
            Err(FlowViolation::CapacityExceeded { edge: "su".into() })
        );
    }

    #[test]
    fn balance_holds_on_path_flow() {
        let i = build_section4_example();
        let f = named(&i, &[("su", 1), ("uv", 1), ("vt", 1)]);
        assert_eq!(check_feasible(&i, &f, BoundCheck::Capacity), Ok(()));
        let g = named(&i, &[("su", 1), ("uv", 1)]);
        assert!(matches!(
            check_feasible(&i, &g, BoundCheck::Capacity),
            Err(FlowViolation::Imbalance { .. })
        ));
    }

    #[test]
    fn value_two_flow_is_blocked_by_uv() {
        let i = build_section4_example();
        let f = named(&i, &[("su", 1), ("sv", 1), ("ut", 1), ("vt", 1)]);
        let uv = i.edge_by_name("uv").unwrap();
        let w = find_blocking_walk(&i, &f, &BTreeSet::new()).unwrap().unwrap();
        assert_eq!(w.edges, vec![uv]);
        assert_eq!(
            w.start_witness,
            Witness::Edge(i.edge_by_name("ut").unwrap())
        );
        assert_eq!(w.end_witness, Witness::Edge(i.edge_by_name("sv").unwrap()));

        let free: BTreeSet<_> = [uv].into_iter().collect();
        assert_eq!(find_blocking_walk(&i, &f, &free), Ok(None));
    }

    #[test]
    fn zero_flow_is_unstable() {
        let i = build_section4_example();
        let w = find_blocking_walk(&i, &Flow::zero(5), &BTreeSet::new())
            .unwrap()
            .unwrap();
        assert_eq!(w.start_witness, Witness::Terminal);
        assert_eq!(w.end_witness, Witness::Terminal);
        assert!(!is_stable(&i, &Flow::zero(5), &BTreeSet::new()));
    }

    #[test]
    fn saturated_edge_is_stable() {
        let mut i = Instance::new();
        let s = i.add_vertex("s", true);
        let t = i.add_vertex("t", true);
        i.add_edge("st", s, t, 3);
        assert_eq!(
            find_blocking_walk(&i, &Flow::from_values(vec![3]), &BTreeSet::new()),
            Ok(None)
        );
    }

    #[test]
    fn edgeless_instance_is_stable() {
        let mut i = Instance::new();
        i.add_vertex("s", true);
        assert!(is_stable(&i, &Flow::zero(0), &BTreeSet::new()));
    }

    #[test]
    fn infeasible_flow_is_an_error() {
        let i = build_section4_example();
        let f = named(&i, &[("su", 1)]);
        assert!(find_blocking_walk(&i, &f, &BTreeSet::new()).is_err());
        assert!(!is_stable(&i, &f, &BTreeSet::new()));
        assert!(matches!(
            find_blocking_walk(&i, &Flow::zero(2), &BTreeSet::new()),
            Err(FlowViolation::LengthMismatch { .. })
        ));
    }
}
