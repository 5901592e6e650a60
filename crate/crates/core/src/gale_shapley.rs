//! Preflow-push version of the Gale-Shapley algorithm for stable flows.
//!
//! Terminals first saturate all their outgoing edges. A non-terminal vertex
//! with positive excess then offers its excess along its best outgoing edges
//! that are neither saturated nor closed. When it cannot forward anything
//! more, it refuses flow on its worst incoming edges, which returns the flow
//! to the proposing vertex and closes the refused edge for good. Active
//! vertices are processed in FIFO order.
//!
//! Two invariants make the result stable: an open unsaturated edge is never
//! preferred by its tail to an edge carrying flow, and the head of a closed
//! edge can no longer forward anything and holds no flow on edges worse than
//! the closed one.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolveError;
use crate::instance::{validate, EdgeId, Flow, Instance, VertexId};
use crate::stability::{
    check_feasible, find_blocking_walk, BoundCheck, EndConditions, FlowViolation,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Number of times an active vertex was taken from the queue.
    pub iterations: u64,
    /// The abort threshold `4 * m * C`, `C` being the total capacity.
    pub bound: u64,
}

struct Engine<'a> {
    instance: &'a Instance,
    flow: Vec<u64>,
    excess: Vec<u64>,
    closed: Vec<bool>,
    /// Number of entries of each incoming order not yet rejected wholesale.
    admit: Vec<usize>,
    /// Position in each outgoing order before which every edge is saturated
    /// or closed.
    offer: Vec<usize>,
    active: VecDeque<VertexId>,
    queued: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn new(instance: &'a Instance, flow: Vec<u64>, closed: Vec<bool>) -> Self {
        let n = instance.vertices.len();
        let mut excess = vec![0u64; n];
        let mut outflow = vec![0u64; n];
        for (i, e) in instance.edges.iter().enumerate() {
            excess[e.head.0] += flow[i];
            outflow[e.tail.0] += flow[i];
        }
        for v in 0..n {
            excess[v] = if instance.vertices[v].terminal {
                0
            } else {
                excess[v]
                    .checked_sub(outflow[v])
                    .expect("preflow has no deficit at non-terminals")
            };
        }
        let admit = instance.preferences.iter().map(|p| p.incoming.len()).collect();
        Engine {
            instance,
            flow,
            excess,
            closed,
            admit,
            offer: vec![0; n],
            active: VecDeque::new(),
            queued: vec![false; n],
        }
    }

    fn activate(&mut self, v: VertexId) {
        if !self.instance.is_terminal(v) && self.excess[v.0] > 0 && !self.queued[v.0] {
            self.queued[v.0] = true;
            self.active.push_back(v);
        }
    }

    fn activate_all(&mut self) {
        for v in self.instance.vertex_ids() {
            self.activate(v);
        }
    }

    fn run(&mut self, bound: u64) -> Result<u64, SolveError> {
        let mut iterations = 0u64;
        while let Some(v) = self.active.pop_front() {
            self.queued[v.0] = false;
            iterations += 1;
            if iterations > bound {
                return Err(SolveError::IterationBound { bound });
            }
            self.forward(v);
            if self.excess[v.0] > 0 {
                self.refuse(v);
            }
        }
        Ok(iterations)
    }

    /// Offers `v`'s excess along its best open unsaturated outgoing edges.
    fn forward(&mut self, v: VertexId) {
        let instance = self.instance;
        let pref = &instance.preferences[v.0];
        while self.excess[v.0] > 0 && self.offer[v.0] < pref.outgoing.len() {
            let e = pref.outgoing[self.offer[v.0]];
            let room = self.instance.edges[e.0].capacity - self.flow[e.0];
            if self.closed[e.0] || room == 0 {
                self.offer[v.0] += 1;
                continue;
            }
            let delta = room.min(self.excess[v.0]);
            let head = self.instance.edges[e.0].head;
            self.flow[e.0] += delta;
            self.excess[v.0] -= delta;
            if !self.instance.is_terminal(head) {
                self.excess[head.0] += delta;
            }
            self.activate(head);
        }
    }

    /// Rejects flow on `v`'s worst incoming edges until the excess is gone.
    fn refuse(&mut self, v: VertexId) {
        let instance = self.instance;
        let pref = &instance.preferences[v.0];
        while self.excess[v.0] > 0 {
            let pos = self.admit[v.0]
                .checked_sub(1)
                .expect("excess never exceeds inflow");
            let e = pref.incoming[pos];
            self.closed[e.0] = true;
            let tail = self.instance.edges[e.0].tail;
            if tail == v {
                // a refused loop lowers inflow and outflow alike
                self.flow[e.0] = 0;
            } else {
                let delta = self.flow[e.0].min(self.excess[v.0]);
                self.flow[e.0] -= delta;
                self.excess[v.0] -= delta;
                if !self.instance.is_terminal(tail) {
                    self.excess[tail.0] += delta;
                }
                self.activate(tail);
            }
            if self.flow[e.0] == 0 {
                self.admit[v.0] = pos;
            }
        }
    }
}

fn iteration_bound(instance: &Instance) -> u64 {
    let m = instance.edges.len() as u64;
    let c: u64 = instance.edges.iter().map(|e| e.capacity).sum();
    4u64.saturating_mul(m).saturating_mul(c)
}

fn certify(instance: &Instance, flow: Vec<u64>) -> Result<Flow, SolveError> {
    let flow = Flow::from_values(flow);
    check_feasible(instance, &flow, BoundCheck::Capacity).map_err(SolveError::Infeasible)?;
    match find_blocking_walk(instance, &flow, &BTreeSet::new()) {
        Ok(None) => Ok(flow),
        Ok(Some(walk)) => Err(SolveError::Unstable(walk)),
        Err(v) => Err(SolveError::Infeasible(v)),
    }
}

/// Computes a stable flow, ignoring restriction annotations. The result is
/// checked by the independent stability checker before it is returned.
pub fn solve_stable_flow(instance: &Instance) -> Result<Flow, SolveError> {
    solve_stable_flow_with_stats(instance).map(|(f, _)| f)
}

pub fn solve_stable_flow_with_stats(instance: &Instance) -> Result<(Flow, SolveStats), SolveError> {
    let report = validate(instance);
    if !report.is_ok() {
        return Err(SolveError::Invalid(report));
    }
    let m = instance.edges.len();
    let mut flow = vec![0u64; m];
    for (i, e) in instance.edges.iter().enumerate() {
        if instance.is_terminal(e.tail) {
            flow[i] = e.capacity;
        }
    }
    let mut engine = Engine::new(instance, flow, vec![false; m]);
    engine.activate_all();
    let bound = iteration_bound(instance);
    let iterations = engine.run(bound)?;
    let flow = certify(instance, engine.flow)?;
    Ok((flow, SolveStats { iterations, bound }))
}

/// Edges that a stable flow has already closed: every unsaturated edge
/// reachable through unsaturated edges from an edge that satisfies the start
/// condition of a blocking walk. Edges in `ignore` are treated as absent.
fn closed_edges(instance: &Instance, flow: &Flow, ignore: &[bool]) -> Vec<bool> {
    let m = instance.edges.len();
    let unsat: Vec<bool> = (0..m)
        .map(|i| !ignore[i] && flow.values()[i] < instance.edges[i].capacity)
        .collect();
    let ends = EndConditions::new(instance, flow);
    let adj = instance.adjacency();
    let mut closed = vec![false; m];
    let mut stack: Vec<EdgeId> = instance
        .edge_ids()
        .filter(|e| unsat[e.0] && ends.start_witness(*e).is_some())
        .collect();
    for e in &stack {
        closed[e.0] = true;
    }
    while let Some(e) = stack.pop() {
        let head = instance.edges[e.0].head;
        for &next in &adj.out[head.0] {
            if unsat[next.0] && !closed[next.0] {
                closed[next.0] = true;
                stack.push(next);
            }
        }
    }
    closed
}

/// Resumes the algorithm after new source edges were added to an instance.
///
/// `prior` must be stable on the instance without `new_edges`; its values on
/// `new_edges` are ignored. Every new edge must leave a terminal. The new
/// edges start saturated and only their heads become active, so the previous
/// proposals are never replayed.
pub fn solve_on_augmented(
    instance: &Instance,
    prior: &Flow,
    new_edges: &[EdgeId],
) -> Result<Flow, SolveError> {
    let report = validate(instance);
    if !report.is_ok() {
        return Err(SolveError::Invalid(report));
    }
    let m = instance.edges.len();
    if prior.len() != m {
        return Err(SolveError::BadPriorFlow(FlowViolation::LengthMismatch {
            expected: m,
            found: prior.len(),
        }));
    }
    let mut ignore = vec![false; m];
    let mut flow = prior.clone();
    for &e in new_edges {
        if e.0 >= m {
            return Err(crate::error::InstanceError::UnknownEdge(e.0).into());
        }
        if !instance.is_terminal(instance.edges[e.0].tail) {
            return Err(SolveError::NotASourceEdge(e));
        }
        ignore[e.0] = true;
        flow[e] = 0;
    }
    check_feasible(instance, &flow, BoundCheck::Capacity).map_err(SolveError::BadPriorFlow)?;
    let closed = closed_edges(instance, &flow, &ignore);
    for &e in new_edges {
        flow[e] = instance.edges[e.0].capacity;
    }
    let mut engine = Engine::new(instance, flow.into_values(), closed);
    for &e in new_edges {
        engine.activate(instance.edges[e.0].head);
    }
    engine.run(iteration_bound(instance))?;
    certify(instance, engine.flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::build_section4_example;
    use crate::instance::{terminal_profile, Side};

    #[test]
    fn free_edge_example_classic_flow() {
        let i = build_section4_example();
        let f = solve_stable_flow(&i).unwrap();
        let by = |n: &str| f[i.edge_by_name(n).unwrap()];
        assert_eq!(
            (by("su"), by("sv"), by("ut"), by("vt"), by("uv")),
            (1, 0, 0, 1, 1)
        );
    }

    #[test]
    fn single_terminal_edge_is_saturated() {
        let mut i = Instance::new();
        let s = i.add_vertex("s", true);
        let t = i.add_vertex("t", true);
        i.add_edge("st", s, t, 7);
        assert_eq!(solve_stable_flow(&i).unwrap().values(), &[7]);
    }

    #[test]
    fn empty_instance_gives_empty_flow() {
        let i = Instance::new();
        assert!(solve_stable_flow(&i).unwrap().is_empty());
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let mut i = build_section4_example();
        i.preferences[1].outgoing.clear();
        assert!(matches!(solve_stable_flow(&i), Err(SolveError::Invalid(_))));
    }

    #[test]
    fn loops_and_cycles_terminate() {
        let mut i = Instance::new();
        let s = i.add_vertex("s", true);
        let a = i.add_vertex("a", false);
        let b = i.add_vertex("b", false);
        let t = i.add_vertex("t", true);
        i.add_edge("sa", s, a, 3);
        i.add_edge("aa", a, a, 2);
        i.add_edge("ab", a, b, 2);
        i.add_edge("ba", b, a, 2);
        i.add_edge("bt", b, t, 1);
        let (f, stats) = solve_stable_flow_with_stats(&i).unwrap();
        assert!(stats.iterations <= stats.bound);
        assert!(crate::stability::is_stable(&i, &f, &BTreeSet::new()));
    }

    fn augment_at_v(i: &Instance, best: bool) -> (Instance, EdgeId) {
        let mut aug = i.clone();
        let v = aug.vertex_by_name("v").unwrap();
        let s2 = aug.add_vertex("s'", true);
        let e = aug.add_edge_unranked("s'v", s2, v, 1);
        let anchor = aug.preferences[v.0].incoming[0];
        if best {
            aug.insert_rank_before(v, Side::In, anchor, e).unwrap();
        } else {
            aug.preferences[v.0].incoming.push(e);
        }
        (aug, e)
    }

    #[test]
    fn warm_start_with_best_ranked_source_edge() {
        let i = build_section4_example();
        let prior = solve_stable_flow(&i).unwrap();
        let (aug, e) = augment_at_v(&i, true);
        let mut p = prior.clone().into_values();
        p.push(0);
        let f = solve_on_augmented(&aug, &Flow::from_values(p), &[e]).unwrap();
        assert_eq!(f[e], 1);
        let by = |n: &str| f[aug.edge_by_name(n).unwrap()];
        assert_eq!((by("uv"), by("ut"), by("su")), (0, 1, 1));
        assert_eq!(f, solve_stable_flow(&aug).unwrap());
    }

    #[test]
    fn warm_start_fully_refused_keeps_profile() {
        let i = build_section4_example();
        let prior = solve_stable_flow(&i).unwrap();
        let (aug, e) = augment_at_v(&i, false);
        let mut p = prior.clone().into_values();
        p.push(0);
        let f = solve_on_augmented(&aug, &Flow::from_values(p), &[e]).unwrap();
        assert_eq!(f[e], 0);
        let old = terminal_profile(&i, &prior);
        let new = terminal_profile(&aug, &f);
        for (k, x) in old {
            assert_eq!(new[&k], x);
        }
    }

    #[test]
    fn warm_start_into_dead_end_is_refused() {
        let mut base = build_section4_example();
        let d = base.add_vertex("d", false);
        let prior = solve_stable_flow(&base).unwrap();
        let mut aug = base.clone();
        let s2 = aug.add_vertex("s'", true);
        let e = aug.add_edge("s'd", s2, d, 2);
        let mut p = prior.clone().into_values();
        p.push(0);
        let f = solve_on_augmented(&aug, &Flow::from_values(p), &[e]).unwrap();
        assert_eq!(f[e], 0);
        assert_eq!(f.truncated(base.edges.len()), prior);
    }

    #[test]
    fn warm_start_rejects_non_source_edges() {
        let i = build_section4_example();
        let prior = solve_stable_flow(&i).unwrap();
        let uv = i.edge_by_name("uv").unwrap();
        assert_eq!(
            solve_on_augmented(&i, &prior, &[uv]),
            Err(SolveError::NotASourceEdge(uv))
        );
    }
}
