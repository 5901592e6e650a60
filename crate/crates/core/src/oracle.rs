//! Brute-force ground truth for small instances.
//!
//! Feasible flows are enumerated depth-first over edge values in ascending
//! edge order and ascending value, pruned by Kirchhoff balance. Everything
//! else filters that stream. A search that would overrun its budget fails
//! with [`OracleError::BudgetExceeded`] instead of returning a partial answer.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;
use core::time::Duration;

use crate::error::{BudgetLimit, OracleError};
use crate::instance::{flow_value, terminal_profile, validate, EdgeId, Flow, Instance};
use crate::matching::{Matching, MatchingInstance};
use crate::stability::{check_feasible, is_stable, BlockingWalk, BoundCheck, Witness};

/// Source of elapsed time for the time limit. The core crate has no clock of
/// its own.
pub trait Clock {
    fn elapsed(&self) -> Duration;
}

/// A clock that never advances; time limits are then never hit.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_edges: usize,
    pub max_capacity: u64,
    pub max_states: u64,
    pub time_limit: Option<Duration>,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_edges: 16,
            max_capacity: 4,
            max_states: 20_000_000,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invariance {
    Holds { stable_flows: usize },
    Counterexample(Flow, Flow),
}

/// Which edges may serve as the dominated edge at a walk end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessRule {
    AnyEdge,
    NonFreeOnly,
}

struct Meter<'c> {
    budget: EnumerationBudget,
    clock: &'c dyn Clock,
    states: u64,
}

impl Meter<'_> {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.states += 1;
        if self.states > self.budget.max_states {
            return Err(OracleError::BudgetExceeded(BudgetLimit::States {
                limit: self.budget.max_states,
            }));
        }
        if self.states.is_multiple_of(1024) {
            if let Some(limit) = self.budget.time_limit {
                if self.clock.elapsed() > limit {
                    return Err(OracleError::BudgetExceeded(BudgetLimit::Time));
                }
            }
        }
        Ok(())
    }
}

pub struct Oracle<'c> {
    pub budget: EnumerationBudget,
    clock: &'c dyn Clock,
}

impl Default for Oracle<'static> {
    fn default() -> Self {
        Oracle::new(EnumerationBudget::default())
    }
}

impl Oracle<'static> {
    pub fn new(budget: EnumerationBudget) -> Self {
        Oracle {
            budget,
            clock: &NoClock,
        }
    }
}

impl<'c> Oracle<'c> {
    pub fn with_clock(budget: EnumerationBudget, clock: &'c dyn Clock) -> Self {
        Oracle { budget, clock }
    }

    fn meter(&self) -> Meter<'c> {
        Meter {
            budget: self.budget,
            clock: self.clock,
            states: 0,
        }
    }

    fn admit(&self, instance: &Instance) -> Result<(), OracleError> {
        let report = validate(instance);
        if !report.is_ok() {
            return Err(OracleError::Invalid(report));
        }
        let m = instance.edges.len();
        if m > self.budget.max_edges {
            return Err(OracleError::BudgetExceeded(BudgetLimit::Edges {
                found: m,
                limit: self.budget.max_edges,
            }));
        }
        if let Some(c) = instance.edges.iter().map(|e| e.capacity).max() {
            if c > self.budget.max_capacity {
                return Err(OracleError::BudgetExceeded(BudgetLimit::Capacity {
                    found: c,
                    limit: self.budget.max_capacity,
                }));
            }
        }
        Ok(())
    }

    /// Visits every integral feasible flow once, in lexicographic order of
    /// the value vector. `visit` may stop the search early.
    pub fn for_each_feasible_flow(
        &self,
        instance: &Instance,
        mut visit: impl FnMut(&Flow) -> ControlFlow<()>,
    ) -> Result<(), OracleError> {
        self.admit(instance)?;
        let n = instance.vertices.len();
        let mut search = FlowSearch {
            instance,
            values: vec![0; instance.edges.len()],
            inflow: vec![0; n],
            outflow: vec![0; n],
            rem_in: vec![0; n],
            rem_out: vec![0; n],
            meter: self.meter(),
        };
        for e in &instance.edges {
            search.rem_out[e.tail.0] += e.capacity;
            search.rem_in[e.head.0] += e.capacity;
        }
        search.run(0, &mut visit).map(|_| ())
    }

    pub fn enumerate_feasible_flows(&self, instance: &Instance) -> Result<Vec<Flow>, OracleError> {
        let mut out = Vec::new();
        self.for_each_feasible_flow(instance, |f| {
            out.push(f.clone());
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    pub fn enumerate_stable_flows(
        &self,
        instance: &Instance,
        free: &BTreeSet<EdgeId>,
    ) -> Result<Vec<Flow>, OracleError> {
        let mut out = Vec::new();
        self.for_each_feasible_flow(instance, |f| {
            if is_stable(instance, f, free) {
                out.push(f.clone());
            }
            ControlFlow::Continue(())
        })?;
        Ok(out)
    }

    /// First stable flow (no free edges) meeting the forced and forbidden
    /// bounds of `instance`, if any.
    pub fn find_restricted_stable_flow(&self, instance: &Instance) -> Result<Option<Flow>, OracleError> {
        let mut found = None;
        let none = BTreeSet::new();
        self.for_each_feasible_flow(instance, |f| {
            if check_feasible(instance, f, BoundCheck::Restrictions).is_ok() && is_stable(instance, f, &none) {
                found = Some(f.clone());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        Ok(found)
    }

    /// Extreme total value over stable flows with `free` edges, with the
    /// first flow attaining it. Every instance has a stable flow, so the
    /// result exists whenever the search finishes.
    pub fn optimal_free_stable_value(
        &self,
        instance: &Instance,
        free: &BTreeSet<EdgeId>,
        objective: Objective,
    ) -> Result<(u64, Flow), OracleError> {
        let mut best: Option<(u64, Flow)> = None;
        self.for_each_feasible_flow(instance, |f| {
            if is_stable(instance, f, free) {
                let v = flow_value(instance, f);
                let better = match (&best, objective) {
                    (None, _) => true,
                    (Some((b, _)), Objective::Max) => v > *b,
                    (Some((b, _)), Objective::Min) => v < *b,
                };
                if better {
                    best = Some((v, f.clone()));
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(best.expect("every instance has a stable flow"))
    }

    /// Compares the terminal profiles of all stable flows with `free` edges.
    pub fn check_terminal_invariance(
        &self,
        instance: &Instance,
        free: &BTreeSet<EdgeId>,
    ) -> Result<Invariance, OracleError> {
        let mut first: Option<Flow> = None;
        let mut count = 0usize;
        let mut clash = None;
        self.for_each_feasible_flow(instance, |f| {
            if !is_stable(instance, f, free) {
                return ControlFlow::Continue(());
            }
            count += 1;
            match &first {
                None => first = Some(f.clone()),
                Some(g) => {
                    if terminal_profile(instance, g) != terminal_profile(instance, f) {
                        clash = Some((g.clone(), f.clone()));
                        return ControlFlow::Break(());
                    }
                }
            }
            ControlFlow::Continue(())
        })?;
        Ok(match clash {
            Some((a, b)) => Invariance::Counterexample(a, b),
            None => Invariance::Holds { stable_flows: count },
        })
    }

    /// All matchings of `mi` that are stable, weakly so when ties are
    /// present, honouring free pairs when asked.
    pub fn enumerate_stable_matchings(
        &self,
        mi: &MatchingInstance,
        honour_free: bool,
    ) -> Result<Vec<Matching>, OracleError> {
        mi.validate()?;
        let mut meter = self.meter();
        let mut out = Vec::new();
        let mut failure = None;
        mi.for_each_matching(|m| {
            if let Err(e) = meter.tick() {
                failure = Some(e);
                return false;
            }
            if mi.is_stable(m, honour_free) {
                out.push(m.clone());
            }
            true
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Weakly stable matchings; ties count as indifference.
    pub fn enumerate_weakly_stable_matchings(&self, mi: &MatchingInstance) -> Result<Vec<Matching>, OracleError> {
        self.enumerate_stable_matchings(mi, false)
    }

    pub fn max_weakly_stable_size(&self, mi: &MatchingInstance) -> Result<usize, OracleError> {
        Ok(max_len(&self.enumerate_weakly_stable_matchings(mi)?))
    }

    /// Largest stable matching when free pairs never block.
    pub fn max_free_stable_size(&self, mi: &MatchingInstance) -> Result<usize, OracleError> {
        Ok(max_len(&self.enumerate_stable_matchings(mi, true)?))
    }
}

fn max_len(ms: &[Matching]) -> usize {
    ms.iter().map(Matching::len).max().unwrap_or(0)
}

struct FlowSearch<'a, 'c> {
    instance: &'a Instance,
    values: Vec<u64>,
    inflow: Vec<u64>,
    outflow: Vec<u64>,
    /// Capacity of undecided edges entering / leaving each vertex.
    rem_in: Vec<u64>,
    rem_out: Vec<u64>,
    meter: Meter<'c>,
}

impl FlowSearch<'_, '_> {
    fn balance_possible(&self, v: usize) -> bool {
        if self.instance.vertices[v].terminal {
            return true;
        }
        self.inflow[v] + self.rem_in[v] >= self.outflow[v]
            && self.outflow[v] + self.rem_out[v] >= self.inflow[v]
    }

    fn run(
        &mut self,
        i: usize,
        visit: &mut impl FnMut(&Flow) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, OracleError> {
        self.meter.tick()?;
        if i == self.values.len() {
            let flow = Flow::from_values(self.values.clone());
            return Ok(visit(&flow));
        }
        let e = &self.instance.edges[i];
        let (t, h, c) = (e.tail.0, e.head.0, e.capacity);
        self.rem_out[t] -= c;
        self.rem_in[h] -= c;
        let mut result = ControlFlow::Continue(());
        for x in 0..=c {
            self.values[i] = x;
            self.outflow[t] += x;
            self.inflow[h] += x;
            if self.balance_possible(t) && self.balance_possible(h) {
                result = self.run(i + 1, visit)?;
            }
            self.outflow[t] -= x;
            self.inflow[h] -= x;
            if result.is_break() {
                break;
            }
        }
        self.values[i] = 0;
        self.rem_out[t] += c;
        self.rem_in[h] += c;
        Ok(result)
    }
}

fn position(list: &[EdgeId], e: EdgeId) -> Option<usize> {
    list.iter().position(|&x| x == e)
}

/// Start condition read directly off the preference lists.
fn starts(instance: &Instance, flow: &Flow, free: &BTreeSet<EdgeId>, e: EdgeId, rule: WitnessRule) -> bool {
    let v = instance.edges[e.0].tail;
    if instance.vertices[v.0].terminal {
        return true;
    }
    let list = &instance.preferences[v.0].outgoing;
    let Some(r) = position(list, e) else {
        return false;
    };
    list[r + 1..]
        .iter()
        .any(|&w| flow[w] > 0 && (rule == WitnessRule::AnyEdge || !free.contains(&w)))
}

fn ends(instance: &Instance, flow: &Flow, free: &BTreeSet<EdgeId>, e: EdgeId, rule: WitnessRule) -> bool {
    let v = instance.edges[e.0].head;
    if instance.vertices[v.0].terminal {
        return true;
    }
    let list = &instance.preferences[v.0].incoming;
    let Some(r) = position(list, e) else {
        return false;
    };
    list[r + 1..]
        .iter()
        .any(|&w| flow[w] > 0 && (rule == WitnessRule::AnyEdge || !free.contains(&w)))
}

/// Searches walks of at most `2m` edges for one that blocks `flow`, checking
/// the definition edge by edge. Walks are extended depth-first in edge-id
/// order; a walk prefix ending in edge `e` with `r` steps left is abandoned
/// when an earlier prefix ending in `e` with at least `r` steps left failed.
pub fn literal_blocking_walk(
    instance: &Instance,
    flow: &Flow,
    free: &BTreeSet<EdgeId>,
    rule: WitnessRule,
) -> Option<Vec<EdgeId>> {
    let m = instance.edges.len();
    let max_len = 2 * m;
    let usable = |e: EdgeId| flow[e] < instance.edges[e.0].capacity && !free.contains(&e);
    let mut failed_with: Vec<Option<usize>> = vec![None; m];
    let mut walk = Vec::new();
    for e in instance.edge_ids() {
        if usable(e) && starts(instance, flow, free, e, rule) {
            walk.push(e);
            if extend(instance, flow, free, rule, &usable, max_len, &mut walk, &mut failed_with) {
                return Some(walk);
            }
            walk.pop();
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn extend(
    instance: &Instance,
    flow: &Flow,
    free: &BTreeSet<EdgeId>,
    rule: WitnessRule,
    usable: &impl Fn(EdgeId) -> bool,
    max_len: usize,
    walk: &mut Vec<EdgeId>,
    failed_with: &mut [Option<usize>],
) -> bool {
    let last = *walk.last().expect("walk is non-empty");
    if ends(instance, flow, free, last, rule) {
        return true;
    }
    let left = max_len - walk.len();
    if failed_with[last.0].is_some_and(|r| r >= left) {
        return false;
    }
    if left > 0 {
        let head = instance.edges[last.0].head;
        for next in instance.edge_ids() {
            if instance.edges[next.0].tail == head && usable(next) {
                walk.push(next);
                if extend(instance, flow, free, rule, usable, max_len, walk, failed_with) {
                    return true;
                }
                walk.pop();
            }
        }
    }
    failed_with[last.0] = Some(failed_with[last.0].map_or(left, |r| r.max(left)));
    false
}

/// Why a claimed blocking walk is not one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkDefect {
    Empty,
    NotContiguous(usize),
    Saturated(EdgeId),
    FreeEdge(EdgeId),
    BadStartWitness,
    BadEndWitness,
}

/// Re-checks a certificate against the definition.
pub fn validate_walk(
    instance: &Instance,
    flow: &Flow,
    free: &BTreeSet<EdgeId>,
    walk: &BlockingWalk,
) -> Result<(), WalkDefect> {
    let (Some(&first), Some(&last)) = (walk.edges.first(), walk.edges.last()) else {
        return Err(WalkDefect::Empty);
    };
    for (i, pair) in walk.edges.windows(2).enumerate() {
        if instance.edges[pair[0].0].head != instance.edges[pair[1].0].tail {
            return Err(WalkDefect::NotContiguous(i));
        }
    }
    for &e in &walk.edges {
        if flow[e] >= instance.edges[e.0].capacity {
            return Err(WalkDefect::Saturated(e));
        }
        if free.contains(&e) {
            return Err(WalkDefect::FreeEdge(e));
        }
    }
    let v1 = instance.edges[first.0].tail;
    let start_ok = match walk.start_witness {
        Witness::Terminal => instance.vertices[v1.0].terminal,
        Witness::Edge(w) => {
            let list = &instance.preferences[v1.0].outgoing;
            !instance.vertices[v1.0].terminal
                && flow[w] > 0
                && matches!((position(list, first), position(list, w)), (Some(a), Some(b)) if a < b)
        }
    };
    if !start_ok {
        return Err(WalkDefect::BadStartWitness);
    }
    let vk = instance.edges[last.0].head;
    let end_ok = match walk.end_witness {
        Witness::Terminal => instance.vertices[vk.0].terminal,
        Witness::Edge(w) => {
            let list = &instance.preferences[vk.0].incoming;
            !instance.vertices[vk.0].terminal
                && flow[w] > 0
                && matches!((position(list, last), position(list, w)), (Some(a), Some(b)) if a < b)
        }
    };
    if !end_ok {
        return Err(WalkDefect::BadEndWitness);
    }
    Ok(())
}
