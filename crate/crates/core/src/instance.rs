//! Networks with preferences.
//!
//! An [`Instance`] is a directed multigraph with a set of terminal vertices,
//! positive integer capacities and, at every non-terminal vertex, a strict
//! order over its incoming edges and one over its outgoing edges. Ranks are
//! list positions: index 0 is the most preferred edge.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::error::InstanceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub capacity: u64,
}

/// Preference orders of one vertex, best first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Preference {
    pub incoming: Vec<EdgeId>,
    pub outgoing: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    In,
    Out,
}

impl Preference {
    pub fn list(&self, side: Side) -> &Vec<EdgeId> {
        match side {
            Side::In => &self.incoming,
            Side::Out => &self.outgoing,
        }
    }

    pub fn list_mut(&mut self, side: Side) -> &mut Vec<EdgeId> {
        match side {
            Side::In => &mut self.incoming,
            Side::Out => &mut self.outgoing,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.incoming.is_empty() && self.outgoing.is_empty()
    }
}

/// Edge restrictions.
///
/// `forced_lower[e] = u` demands `f(e) >= u`; `forbidden_upper[e] = u` demands
/// `f(e) <= u` (with `u < c(e)`). Free edges never take part in blocking walks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RestrictionSet {
    pub forced_lower: BTreeMap<EdgeId, u64>,
    pub forbidden_upper: BTreeMap<EdgeId, u64>,
    pub free: BTreeSet<EdgeId>,
}

impl RestrictionSet {
    /// Edges with a positive lower bound.
    pub fn forced(&self) -> impl Iterator<Item = (EdgeId, u64)> + '_ {
        self.forced_lower.iter().filter(|(_, &u)| u > 0).map(|(&e, &u)| (e, u))
    }

    pub fn forbidden(&self) -> impl Iterator<Item = (EdgeId, u64)> + '_ {
        self.forbidden_upper.iter().map(|(&e, &u)| (e, u))
    }

    pub fn is_empty(&self) -> bool {
        self.forced().next().is_none() && self.forbidden_upper.is_empty() && self.free.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// Indexed by vertex; terminals keep empty orders.
    pub preferences: Vec<Preference>,
    pub restrictions: RestrictionSet,
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, terminal: bool) -> VertexId {
        self.vertices.push(Vertex {
            name: name.into(),
            terminal,
        });
        self.preferences.push(Preference::default());
        VertexId(self.vertices.len() - 1)
    }

    /// Adds an edge ranked last on both of its endpoint lists.
    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        tail: VertexId,
        head: VertexId,
        capacity: u64,
    ) -> EdgeId {
        let e = self.add_edge_unranked(name, tail, head, capacity);
        if !self.vertices[tail.0].terminal {
            self.preferences[tail.0].outgoing.push(e);
        }
        if !self.vertices[head.0].terminal {
            self.preferences[head.0].incoming.push(e);
        }
        e
    }

    /// Adds an edge without placing it on any preference list.
    pub fn add_edge_unranked(
        &mut self,
        name: impl Into<String>,
        tail: VertexId,
        head: VertexId,
        capacity: u64,
    ) -> EdgeId {
        self.edges.push(Edge {
            name: name.into(),
            tail,
            head,
            capacity,
        });
        EdgeId(self.edges.len() - 1)
    }

    pub fn set_preferences(&mut self, v: VertexId, incoming: Vec<EdgeId>, outgoing: Vec<EdgeId>) {
        self.preferences[v.0] = Preference { incoming, outgoing };
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.vertices[v.0].terminal
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    /// A vertex name not used yet, derived from `base` by appending primes.
    pub fn fresh_vertex_name(&self, base: &str) -> String {
        let mut name = String::from(base);
        while self.vertices.iter().any(|v| v.name == name) {
            name.push('\'');
        }
        name
    }

    pub fn fresh_edge_name(&self, base: &str) -> String {
        let mut name = String::from(base);
        while self.edges.iter().any(|e| e.name == name) {
            name.push('\'');
        }
        name
    }

    /// Outgoing and incoming edges of every vertex, in edge-id order.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.vertices.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail.0 < n {
                out[e.tail.0].push(EdgeId(i));
            }
            if e.head.0 < n {
                inc[e.head.0].push(EdgeId(i));
            }
        }
        Adjacency { out, inc }
    }

    /// Ranks of every edge at its tail (outgoing order) and at its head
    /// (incoming order). `None` at terminals.
    pub fn ranks(&self) -> Ranks {
        let m = self.edges.len();
        let mut at_tail = vec![None; m];
        let mut at_head = vec![None; m];
        for pref in &self.preferences {
            for (pos, e) in pref.outgoing.iter().enumerate() {
                if e.0 < m {
                    at_tail[e.0] = Some(pos);
                }
            }
            for (pos, e) in pref.incoming.iter().enumerate() {
                if e.0 < m {
                    at_head[e.0] = Some(pos);
                }
            }
        }
        Ranks { at_tail, at_head }
    }

    /// Places `new_edge` on `v`'s `side` list directly before `anchor`.
    pub fn insert_rank_before(
        &mut self,
        v: VertexId,
        side: Side,
        anchor: EdgeId,
        new_edge: EdgeId,
    ) -> Result<(), InstanceError> {
        let pref = self
            .preferences
            .get_mut(v.0)
            .ok_or(InstanceError::UnknownVertex(v.0))?;
        let list = pref.list_mut(side);
        if list.contains(&new_edge) {
            let name = self
                .edges
                .get(new_edge.0)
                .map(|e| e.name.clone())
                .unwrap_or_else(|| format!("#{}", new_edge.0));
            return Err(InstanceError::AlreadyRanked(name));
        }
        let pos = list
            .iter()
            .position(|&e| e == anchor)
            .ok_or(InstanceError::AnchorMissing)?;
        list.insert(pos, new_edge);
        Ok(())
    }

    /// Places `new_edge` directly after `anchor`.
    pub fn insert_rank_after(
        &mut self,
        v: VertexId,
        side: Side,
        anchor: EdgeId,
        new_edge: EdgeId,
    ) -> Result<(), InstanceError> {
        let list = self
            .preferences
            .get_mut(v.0)
            .ok_or(InstanceError::UnknownVertex(v.0))?
            .list_mut(side);
        let pos = list
            .iter()
            .position(|&e| e == anchor)
            .ok_or(InstanceError::AnchorMissing)?;
        list.insert(pos + 1, new_edge);
        Ok(())
    }

    /// The same network without any restriction annotations.
    pub fn unrestricted(&self) -> Instance {
        Instance {
            restrictions: RestrictionSet::default(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Adjacency {
    pub out: Vec<Vec<EdgeId>>,
    pub inc: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone)]
pub struct Ranks {
    pub at_tail: Vec<Option<usize>>,
    pub at_head: Vec<Option<usize>>,
}

impl Ranks {
    /// Does the tail of `a` prefer `a` to `b`? Both must leave the same vertex.
    pub fn tail_prefers(&self, a: EdgeId, b: EdgeId) -> bool {
        matches!((self.at_tail[a.0], self.at_tail[b.0]), (Some(x), Some(y)) if x < y)
    }

    pub fn head_prefers(&self, a: EdgeId, b: EdgeId) -> bool {
        matches!((self.at_head[a.0], self.at_head[b.0]), (Some(x), Some(y)) if x < y)
    }
}

/// Integral edge values, indexed by [`EdgeId`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Flow {
    values: Vec<u64>,
}

impl Flow {
    pub fn zero(edges: usize) -> Self {
        Flow {
            values: vec![0; edges],
        }
    }

    pub fn from_values(values: Vec<u64>) -> Self {
        Flow { values }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> u64 {
        self.values[e.0]
    }

    /// Keeps only the first `edges` values.
    pub fn truncated(&self, edges: usize) -> Flow {
        Flow {
            values: self.values[..edges.min(self.values.len())].to_vec(),
        }
    }
}

impl Index<EdgeId> for Flow {
    type Output = u64;
    fn index(&self, e: EdgeId) -> &u64 {
        &self.values[e.0]
    }
}

impl IndexMut<EdgeId> for Flow {
    fn index_mut(&mut self, e: EdgeId) -> &mut u64 {
        &mut self.values[e.0]
    }
}

/// Net outflow summed over the terminals whose outflow exceeds their inflow.
pub fn flow_value(instance: &Instance, flow: &Flow) -> u64 {
    let n = instance.vertices.len();
    let mut out = vec![0u64; n];
    let mut inc = vec![0u64; n];
    for (i, e) in instance.edges.iter().enumerate() {
        out[e.tail.0] += flow.values[i];
        inc[e.head.0] += flow.values[i];
    }
    (0..n)
        .filter(|&v| instance.vertices[v].terminal)
        .map(|v| out[v].saturating_sub(inc[v]))
        .sum()
}

/// Flow on every edge incident to a terminal, keyed by edge id.
pub fn terminal_profile(instance: &Instance, flow: &Flow) -> BTreeMap<EdgeId, u64> {
    instance
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| instance.is_terminal(e.tail) || instance.is_terminal(e.head))
        .map(|(i, _)| (EdgeId(i), flow.values[i]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingEndpoint { edge: String },
    ZeroCapacity { edge: String },
    PreferenceTableSize { expected: usize, found: usize },
    IncompletePreference { vertex: String, side: Side },
    TerminalHasPreferences { vertex: String },
    UnknownRestrictedEdge { index: usize },
    LowerBoundExceedsCapacity { edge: String },
    UpperBoundNotBelowCapacity { edge: String },
    ForcedAndForbidden { edge: String },
    DuplicateVertexName { name: String },
    DuplicateEdgeName { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEndpoint { edge } => {
                write!(f, "edge {edge} has an undeclared endpoint")
            }
            Violation::ZeroCapacity { edge } => write!(f, "edge {edge} has zero capacity"),
            Violation::PreferenceTableSize { expected, found } => write!(
                f,
                "preference table has {found} entries for {expected} vertices"
            ),
            Violation::IncompletePreference { vertex, side } => {
                let side = match side {
                    Side::In => "incoming",
                    Side::Out => "outgoing",
                };
                write!(f, "incomplete preference order at {vertex} ({side})")
            }
            Violation::TerminalHasPreferences { vertex } => {
                write!(f, "terminal {vertex} carries a preference order")
            }
            Violation::UnknownRestrictedEdge { index } => {
                write!(f, "restriction names unknown edge #{index}")
            }
            Violation::LowerBoundExceedsCapacity { edge } => {
                write!(f, "lower bound exceeds capacity at {edge}")
            }
            Violation::UpperBoundNotBelowCapacity { edge } => {
                write!(f, "forbidden upper bound is not below capacity at {edge}")
            }
            Violation::ForcedAndForbidden { edge } => {
                write!(f, "edge {edge} is both forced and forbidden")
            }
            Violation::DuplicateVertexName { name } => write!(f, "duplicate vertex id {name}"),
            Violation::DuplicateEdgeName { name } => write!(f, "duplicate edge id {name}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of an instance and its restrictions.
pub fn validate(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let n = instance.vertices.len();
    let m = instance.edges.len();

    let mut names = BTreeSet::new();
    for v in &instance.vertices {
        if !names.insert(v.name.as_str()) {
            violations.push(Violation::DuplicateVertexName {
                name: v.name.clone(),
            });
        }
    }
    let mut names = BTreeSet::new();
    for e in &instance.edges {
        if !names.insert(e.name.as_str()) {
            violations.push(Violation::DuplicateEdgeName {
                name: e.name.clone(),
            });
        }
        if e.tail.0 >= n || e.head.0 >= n {
            violations.push(Violation::DanglingEndpoint {
                edge: e.name.clone(),
            });
        }
        if e.capacity == 0 {
            violations.push(Violation::ZeroCapacity {
                edge: e.name.clone(),
            });
        }
    }

    if instance.preferences.len() != n {
        violations.push(Violation::PreferenceTableSize {
            expected: n,
            found: instance.preferences.len(),
        });
    } else {
        let adj = instance.adjacency();
        for (v, vertex) in instance.vertices.iter().enumerate() {
            let pref = &instance.preferences[v];
            if vertex.terminal {
                if !pref.is_empty() {
                    violations.push(Violation::TerminalHasPreferences {
                        vertex: vertex.name.clone(),
                    });
                }
                continue;
            }
            for (side, incident) in [(Side::In, &adj.inc[v]), (Side::Out, &adj.out[v])] {
                if !is_permutation_of(pref.list(side), incident) {
                    violations.push(Violation::IncompletePreference {
                        vertex: vertex.name.clone(),
                        side,
                    });
                }
            }
        }
    }

    let r = &instance.restrictions;
    let name_of = |e: EdgeId| instance.edges[e.0].name.clone();
    for (&e, &u) in &r.forced_lower {
        if e.0 >= m {
            violations.push(Violation::UnknownRestrictedEdge { index: e.0 });
        } else if u > instance.edges[e.0].capacity {
            violations.push(Violation::LowerBoundExceedsCapacity { edge: name_of(e) });
        }
    }
    for (&e, &u) in &r.forbidden_upper {
        if e.0 >= m {
            violations.push(Violation::UnknownRestrictedEdge { index: e.0 });
            continue;
        }
        if u >= instance.edges[e.0].capacity {
            violations.push(Violation::UpperBoundNotBelowCapacity { edge: name_of(e) });
        }
        if r.forced_lower.get(&e).is_some_and(|&l| l > 0) {
            violations.push(Violation::ForcedAndForbidden { edge: name_of(e) });
        }
    }
    for &e in &r.free {
        if e.0 >= m {
            violations.push(Violation::UnknownRestrictedEdge { index: e.0 });
        }
    }

    ValidationReport { violations }
}

fn is_permutation_of(order: &[EdgeId], incident: &[EdgeId]) -> bool {
    if order.len() != incident.len() {
        return false;
    }
    let mut a = order.to_vec();
    a.sort_unstable();
    // `incident` is already in id order
    a == incident
}

/// Correspondence between the edges of an instance and those of a transformed
/// copy. Each original edge maps to the ordered list of edges that replace it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    parts: Vec<Vec<EdgeId>>,
    target_edges: usize,
}

impl EdgeMap {
    pub fn identity(edges: usize) -> Self {
        EdgeMap {
            parts: (0..edges).map(|i| vec![EdgeId(i)]).collect(),
            target_edges: edges,
        }
    }

    pub fn parts(&self, original: EdgeId) -> &[EdgeId] {
        &self.parts[original.0]
    }

    pub fn source_edges(&self) -> usize {
        self.parts.len()
    }

    pub fn target_edges(&self) -> usize {
        self.target_edges
    }

    pub fn is_identity(&self) -> bool {
        self.target_edges == self.parts.len()
            && self
                .parts
                .iter()
                .enumerate()
                .all(|(i, p)| p.len() == 1 && p[0].0 == i)
    }

    /// The original edge a transformed edge came from.
    pub fn origin(&self, target: EdgeId) -> Option<EdgeId> {
        self.parts
            .iter()
            .position(|p| p.contains(&target))
            .map(EdgeId)
    }

    /// Translates a flow on the transformed instance back to the original by
    /// summing over the parts of every edge.
    pub fn pull_back(&self, flow: &Flow) -> Flow {
        Flow::from_values(
            self.parts
                .iter()
                .map(|p| p.iter().map(|&e| flow.values[e.0]).sum())
                .collect(),
        )
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &EdgeMap) -> EdgeMap {
        EdgeMap {
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().flat_map(|&e| next.parts[e.0].iter().copied()).collect())
                .collect(),
            target_edges: next.target_edges,
        }
    }
}

/// Splits `e` into two parallel edges ranked consecutively. The first part
/// keeps `e`'s id and gets capacity `first`; the second is appended.
fn split_edge(instance: &mut Instance, e: EdgeId, first: u64) -> EdgeId {
    let edge = instance.edges[e.0].clone();
    let rest = edge.capacity - first;
    instance.edges[e.0].capacity = first;
    instance.edges[e.0].name = format!("{}/1", edge.name);
    let second_name = instance.fresh_edge_name(&format!("{}/2", edge.name));
    let second = instance.add_edge_unranked(second_name, edge.tail, edge.head, rest);
    if !instance.is_terminal(edge.tail) {
        instance
            .insert_rank_after(edge.tail, Side::Out, e, second)
            .expect("edge is ranked at its tail");
    }
    if !instance.is_terminal(edge.head) {
        instance
            .insert_rank_after(edge.head, Side::In, e, second)
            .expect("edge is ranked at its head");
    }
    if instance.restrictions.free.contains(&e) {
        instance.restrictions.free.insert(second);
    }
    second
}

/// Replaces every forbidden edge with `0 < u(e) < c(e)` by an unrestricted
/// part of capacity `u(e)` followed by a completely forbidden part of
/// capacity `c(e) - u(e)`.
pub fn split_forbidden_lower(instance: &Instance) -> (Instance, EdgeMap) {
    let mut out = instance.clone();
    let mut map = EdgeMap::identity(instance.edges.len());
    let targets: Vec<(EdgeId, u64)> = instance
        .restrictions
        .forbidden()
        .filter(|&(_, u)| u > 0)
        .collect();
    for (e, u) in targets {
        let second = split_edge(&mut out, e, u);
        out.restrictions.forbidden_upper.remove(&e);
        out.restrictions.forbidden_upper.insert(second, 0);
        map.parts[e.0].push(second);
    }
    map.target_edges = out.edges.len();
    (out, map)
}

/// Replaces every forced edge with `0 < u(e) < c(e)` by a completely forced
/// part of capacity `u(e)` followed by an unrestricted part of capacity
/// `c(e) - u(e)`.
pub fn split_forced_lower(instance: &Instance) -> (Instance, EdgeMap) {
    let mut out = instance.clone();
    let mut map = EdgeMap::identity(instance.edges.len());
    out.restrictions.forced_lower.retain(|_, u| *u > 0);
    let targets: Vec<(EdgeId, u64)> = instance
        .restrictions
        .forced()
        .filter(|&(e, u)| u < instance.edges[e.0].capacity)
        .collect();
    for (e, u) in targets {
        let second = split_edge(&mut out, e, u);
        map.parts[e.0].push(second);
    }
    map.target_edges = out.edges.len();
    (out, map)
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::In => "in",
            Side::Out => "out",
        })
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Name of an edge, for messages.
pub fn edge_label(instance: &Instance, e: EdgeId) -> String {
    instance
        .edges
        .get(e.0)
        .map(|x| x.name.clone())
        .unwrap_or_else(|| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Instance {
        let mut i = Instance::new();
        let s = i.add_vertex("s", true);
        let u = i.add_vertex("u", false);
        let v = i.add_vertex("v", false);
        let t = i.add_vertex("t", true);
        i.add_edge("su", s, u, 2);
        i.add_edge("uv", u, v, 5);
        i.add_edge("vt", v, t, 4);
        i.add_edge("uv'", u, v, 1);
        i
    }

    #[test]
    fn terminal_pair_is_valid() {
        let mut i = Instance::new();
        let s = i.add_vertex("s", true);
        let t = i.add_vertex("t", true);
        i.add_edge("st", s, t, 1);
        assert!(validate(&i).is_ok());
    }

    #[test]
    fn incomplete_order_is_reported() {
        let mut i = path();
        i.preferences[1].outgoing.pop();
        let report = validate(&i);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0].to_string(),
            "incomplete preference order at u (outgoing)"
        );
    }

    #[test]
    fn lower_bound_above_capacity_is_reported() {
        let mut i = path();
        i.restrictions.forced_lower.insert(EdgeId(0), 3);
        let report = validate(&i);
        assert_eq!(
            report.violations,
            vec![Violation::LowerBoundExceedsCapacity { edge: "su".into() }]
        );
    }

    #[test]
    fn forced_and_forbidden_is_rejected() {
        let mut i = path();
        i.restrictions.forced_lower.insert(EdgeId(1), 1);
        i.restrictions.forbidden_upper.insert(EdgeId(1), 2);
        assert!(validate(&i)
            .violations
            .contains(&Violation::ForcedAndForbidden { edge: "uv".into() }));
    }

    #[test]
    fn terminal_preferences_are_rejected() {
        let mut i = path();
        i.preferences[0].outgoing.push(EdgeId(0));
        assert_eq!(
            validate(&i).violations,
            vec![Violation::TerminalHasPreferences { vertex: "s".into() }]
        );
    }

    #[test]
    fn forbidden_split_places_parts_adjacently() {
        let mut i = path();
        i.restrictions.forbidden_upper.insert(EdgeId(1), 2);
        let (out, map) = split_forbidden_lower(&i);
        assert!(validate(&out).is_ok());
        assert_eq!(out.edges[1].capacity, 2);
        assert_eq!(out.edges[4].capacity, 3);
        assert_eq!(out.restrictions.forbidden_upper.get(&EdgeId(4)), Some(&0));
        assert!(!out.restrictions.forbidden_upper.contains_key(&EdgeId(1)));
        assert_eq!(
            out.preferences[1].outgoing,
            vec![EdgeId(1), EdgeId(4), EdgeId(3)]
        );
        assert_eq!(
            out.preferences[2].incoming,
            vec![EdgeId(1), EdgeId(4), EdgeId(3)]
        );
        assert_eq!(map.parts(EdgeId(1)), &[EdgeId(1), EdgeId(4)]);
        let merged = map.pull_back(&Flow::from_values(vec![2, 2, 4, 0, 0]));
        assert_eq!(merged.values(), &[2, 2, 4, 0]);
    }

    #[test]
    fn zero_upper_bound_is_not_split() {
        let mut i = path();
        i.restrictions.forbidden_upper.insert(EdgeId(1), 0);
        let (out, map) = split_forbidden_lower(&i);
        assert_eq!(out, i);
        assert!(map.is_identity());
    }

    #[test]
    fn no_restrictions_split_is_identity() {
        let i = path();
        let (a, ma) = split_forbidden_lower(&i);
        let (b, mb) = split_forced_lower(&i);
        assert_eq!(a, i);
        assert_eq!(b, i);
        assert!(ma.is_identity() && mb.is_identity());
    }

    #[test]
    fn forced_split_gives_saturated_first_part() {
        let mut i = path();
        i.restrictions.forced_lower.insert(EdgeId(2), 1);
        let (out, map) = split_forced_lower(&i);
        assert!(validate(&out).is_ok());
        assert_eq!(out.edges[2].capacity, 1);
        assert_eq!(out.edges[4].capacity, 3);
        assert_eq!(out.restrictions.forced_lower.get(&EdgeId(2)), Some(&1));
        assert!(!out.restrictions.forced_lower.contains_key(&EdgeId(4)));
        assert_eq!(out.preferences[2].outgoing, vec![EdgeId(2), EdgeId(4)]);
        assert_eq!(map.parts(EdgeId(2)), &[EdgeId(2), EdgeId(4)]);
    }

    #[test]
    fn completely_forced_edge_is_not_split() {
        let mut i = path();
        i.restrictions.forced_lower.insert(EdgeId(2), 4);
        let (out, map) = split_forced_lower(&i);
        assert_eq!(out, i);
        assert!(map.is_identity());
    }

    #[test]
    fn insert_rank_before_splices() {
        let mut i = Instance::new();
        let v = i.add_vertex("v", false);
        let s = i.add_vertex("s", true);
        let e1 = i.add_edge("e1", s, v, 1);
        let e2 = i.add_edge("e2", s, v, 1);
        let e3 = i.add_edge("e3", s, v, 1);
        let e9 = i.add_edge_unranked("e9", s, v, 1);
        i.insert_rank_before(v, Side::In, e2, e9).unwrap();
        assert_eq!(i.preferences[0].incoming, vec![e1, e9, e2, e3]);

        let e10 = i.add_edge_unranked("e10", s, v, 1);
        i.insert_rank_before(v, Side::In, e1, e10).unwrap();
        assert_eq!(i.preferences[0].incoming[0], e10);

        assert_eq!(
            i.insert_rank_before(v, Side::In, EdgeId(42), EdgeId(3)),
            Err(InstanceError::AlreadyRanked("e9".into()))
        );
        let e11 = i.add_edge_unranked("e11", s, v, 1);
        assert_eq!(
            i.insert_rank_before(v, Side::In, EdgeId(42), e11),
            Err(InstanceError::AnchorMissing)
        );
    }

    #[test]
    fn value_and_profile() {
        let i = path();
        let f = Flow::from_values(vec![2, 1, 2, 1]);
        assert_eq!(flow_value(&i, &f), 2);
        let p = terminal_profile(&i, &f);
        assert_eq!(p.into_iter().collect::<Vec<_>>(), vec![(EdgeId(0), 2), (EdgeId(2), 2)]);
        assert_eq!(flow_value(&i, &Flow::zero(4)), 0);
    }
}
