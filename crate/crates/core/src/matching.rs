//! Bipartite matching instances with optional ties and restricted pairs.
//!
//! Ties may only appear on the men's side, have length two and sit at the
//! bottom of the man's list. With ties present, stability means weak
//! stability: a pair blocks only if both sides strictly prefer it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::MatchingError;
use crate::instance::{EdgeId, Flow, Instance, VertexId};

/// `(man, woman)` indices.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tie {
    pub man: usize,
    pub women: [usize; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchingInstance {
    pub men: Vec<String>,
    pub women: Vec<String>,
    /// Women acceptable to each man, best first.
    pub man_prefs: Vec<Vec<usize>>,
    /// Men acceptable to each woman, best first.
    pub woman_prefs: Vec<Vec<usize>>,
    pub ties: Vec<Tie>,
    pub forced: BTreeSet<Pair>,
    pub forbidden: BTreeSet<Pair>,
    pub free: BTreeSet<Pair>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    pub pairs: BTreeSet<Pair>,
}

impl Matching {
    pub fn new(pairs: impl IntoIterator<Item = Pair>) -> Self {
        Matching {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, man: usize, woman: usize) -> bool {
        self.pairs.contains(&(man, woman))
    }

    pub fn partner_of_man(&self, man: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == man).map(|p| p.1)
    }

    pub fn partner_of_woman(&self, woman: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == woman).map(|p| p.0)
    }
}

impl MatchingInstance {
    pub fn add_man(&mut self, name: impl Into<String>) -> usize {
        self.men.push(name.into());
        self.man_prefs.push(Vec::new());
        self.men.len() - 1
    }

    pub fn add_woman(&mut self, name: impl Into<String>) -> usize {
        self.women.push(name.into());
        self.woman_prefs.push(Vec::new());
        self.women.len() - 1
    }

    pub fn man_by_name(&self, name: &str) -> Option<usize> {
        self.men.iter().position(|m| m == name)
    }

    pub fn woman_by_name(&self, name: &str) -> Option<usize> {
        self.women.iter().position(|w| w == name)
    }

    pub fn is_acceptable(&self, man: usize, woman: usize) -> bool {
        self.man_prefs.get(man).is_some_and(|l| l.contains(&woman))
    }

    /// Acceptable pairs, men in index order and each man's list best first.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.man_prefs
            .iter()
            .enumerate()
            .flat_map(|(m, list)| list.iter().map(move |&w| (m, w)))
    }

    pub fn tie_of(&self, man: usize) -> Option<&Tie> {
        self.ties.iter().find(|t| t.man == man)
    }

    /// Rank of `woman` on `man`'s list; tied women share a rank.
    pub fn man_rank(&self, man: usize, woman: usize) -> Option<usize> {
        let list = self.man_prefs.get(man)?;
        let pos = list.iter().position(|&w| w == woman)?;
        match self.tie_of(man) {
            Some(t) if t.women.contains(&woman) => Some(list.len() - 2),
            _ => Some(pos),
        }
    }

    pub fn woman_rank(&self, woman: usize, man: usize) -> Option<usize> {
        self.woman_prefs.get(woman)?.iter().position(|&m| m == man)
    }

    pub fn validate(&self) -> Result<(), MatchingError> {
        if self.man_prefs.len() != self.men.len() {
            return Err(MatchingError::OutOfRange(String::from("men")));
        }
        if self.woman_prefs.len() != self.women.len() {
            return Err(MatchingError::OutOfRange(String::from("women")));
        }
        for (m, list) in self.man_prefs.iter().enumerate() {
            check_list(list, self.women.len(), &self.men[m])?;
        }
        for (w, list) in self.woman_prefs.iter().enumerate() {
            check_list(list, self.men.len(), &self.women[w])?;
        }
        for (m, list) in self.man_prefs.iter().enumerate() {
            for &w in list {
                if !self.woman_prefs[w].contains(&m) {
                    return Err(self.asymmetric(m, w));
                }
            }
        }
        for (w, list) in self.woman_prefs.iter().enumerate() {
            for &m in list {
                if !self.man_prefs[m].contains(&w) {
                    return Err(self.asymmetric(m, w));
                }
            }
        }
        let mut tied_men = BTreeSet::new();
        for tie in &self.ties {
            let name = || {
                self.men
                    .get(tie.man)
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", tie.man))
            };
            let Some(list) = self.man_prefs.get(tie.man) else {
                return Err(MatchingError::MalformedTie(name()));
            };
            let n = list.len();
            let bottom_ok = n >= 2
                && tie.women[0] != tie.women[1]
                && tie.women.contains(&list[n - 1])
                && tie.women.contains(&list[n - 2]);
            if !bottom_ok || !tied_men.insert(tie.man) {
                return Err(MatchingError::MalformedTie(name()));
            }
        }
        for &(m, w) in self.forced.iter().chain(&self.forbidden).chain(&self.free) {
            if !self.is_acceptable(m, w) {
                return Err(MatchingError::OutOfRange(format!("restricted pair ({m}, {w})")));
            }
        }
        Ok(())
    }

    fn asymmetric(&self, m: usize, w: usize) -> MatchingError {
        MatchingError::Asymmetric {
            man: self.men[m].clone(),
            woman: self.women[w].clone(),
        }
    }

    /// A degree-bounded set of acceptable pairs.
    pub fn is_matching(&self, matching: &Matching) -> bool {
        let mut men = BTreeSet::new();
        let mut women = BTreeSet::new();
        matching
            .pairs
            .iter()
            .all(|&(m, w)| self.is_acceptable(m, w) && men.insert(m) && women.insert(w))
    }

    /// First pair, in [`pairs`](Self::pairs) order, that both sides strictly
    /// prefer to their partners. Free pairs are skipped when `honour_free`.
    pub fn blocking_pair(&self, matching: &Matching, honour_free: bool) -> Option<Pair> {
        let man_partner = self.partners_of_men(matching);
        let woman_partner = self.partners_of_women(matching);
        self.pairs().find(|&(m, w)| {
            if matching.contains(m, w) || (honour_free && self.free.contains(&(m, w))) {
                return false;
            }
            let man_wants = match man_partner[m] {
                None => true,
                Some(p) => self.man_rank(m, w) < self.man_rank(m, p),
            };
            let woman_wants = match woman_partner[w] {
                None => true,
                Some(p) => self.woman_rank(w, m) < self.woman_rank(w, p),
            };
            man_wants && woman_wants
        })
    }

    /// Weakly stable when ties are present; stable with free pairs when
    /// `honour_free`.
    pub fn is_stable(&self, matching: &Matching, honour_free: bool) -> bool {
        self.is_matching(matching) && self.blocking_pair(matching, honour_free).is_none()
    }

    fn partners_of_men(&self, matching: &Matching) -> Vec<Option<usize>> {
        let mut p = vec![None; self.men.len()];
        for &(m, w) in &matching.pairs {
            p[m] = Some(w);
        }
        p
    }

    fn partners_of_women(&self, matching: &Matching) -> Vec<Option<usize>> {
        let mut p = vec![None; self.women.len()];
        for &(m, w) in &matching.pairs {
            p[w] = Some(m);
        }
        p
    }

    /// Calls `visit` on every matching, men deciding in index order, each
    /// first staying single and then trying his list best first.
    pub fn for_each_matching(&self, mut visit: impl FnMut(&Matching) -> bool) {
        let mut taken = vec![false; self.women.len()];
        let mut current = Vec::new();
        self.matchings_from(0, &mut taken, &mut current, &mut visit);
    }

    fn matchings_from(
        &self,
        man: usize,
        taken: &mut Vec<bool>,
        current: &mut Vec<Pair>,
        visit: &mut impl FnMut(&Matching) -> bool,
    ) -> bool {
        if man == self.men.len() {
            return visit(&Matching::new(current.iter().copied()));
        }
        if !self.matchings_from(man + 1, taken, current, visit) {
            return false;
        }
        for &w in &self.man_prefs[man] {
            if taken[w] {
                continue;
            }
            taken[w] = true;
            current.push((man, w));
            let go_on = self.matchings_from(man + 1, taken, current, visit);
            current.pop();
            taken[w] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn check_list(list: &[usize], bound: usize, owner: &str) -> Result<(), MatchingError> {
    let mut seen = BTreeSet::new();
    for &x in list {
        if x >= bound {
            return Err(MatchingError::OutOfRange(String::from(owner)));
        }
        if !seen.insert(x) {
            return Err(MatchingError::Duplicate(String::from(owner)));
        }
    }
    Ok(())
}

/// Links a matching instance to the flow instance built from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCorrespondence {
    pub source: VertexId,
    pub sink: VertexId,
    pub man_vertices: Vec<VertexId>,
    pub woman_vertices: Vec<VertexId>,
    pub source_edges: Vec<EdgeId>,
    pub sink_edges: Vec<EdgeId>,
    pub pair_edges: BTreeMap<Pair, EdgeId>,
}

impl FlowCorrespondence {
    pub fn flow_to_matching(&self, flow: &Flow) -> Matching {
        Matching::new(
            self.pair_edges
                .iter()
                .filter(|(_, &e)| flow[e] > 0)
                .map(|(&p, _)| p),
        )
    }

    pub fn flow_of_matching(&self, matching: &Matching, edges: usize) -> Flow {
        let mut flow = Flow::zero(edges);
        for &(m, w) in &matching.pairs {
            flow[self.pair_edges[&(m, w)]] = 1;
            flow[self.source_edges[m]] = 1;
            flow[self.sink_edges[w]] = 1;
        }
        flow
    }

    pub fn pair_of_edge(&self, e: EdgeId) -> Option<Pair> {
        self.pair_edges.iter().find(|(_, &x)| x == e).map(|(&p, _)| p)
    }
}

/// Unit-capacity flow network of a tie-free matching instance: a source
/// feeding every man, an edge per acceptable pair, and every woman feeding
/// a sink. Pair edges keep both ranks and restriction flags.
pub fn matching_to_flow(
    mi: &MatchingInstance,
) -> Result<(Instance, FlowCorrespondence), MatchingError> {
    mi.validate()?;
    if !mi.ties.is_empty() {
        return Err(MatchingError::TiesPresent);
    }
    let mut inst = Instance::new();
    let source_name = fresh_among(&mi.men, &mi.women, "s");
    let sink_name = fresh_among(&mi.men, &mi.women, "t");
    let source = inst.add_vertex(source_name.clone(), true);
    let man_vertices: Vec<VertexId> = mi
        .men
        .iter()
        .map(|m| {
            let name = inst.fresh_vertex_name(m);
            inst.add_vertex(name, false)
        })
        .collect();
    let woman_vertices: Vec<VertexId> = mi
        .women
        .iter()
        .map(|w| {
            let name = inst.fresh_vertex_name(w);
            inst.add_vertex(name, false)
        })
        .collect();
    let sink = inst.add_vertex(sink_name.clone(), true);

    let source_edges: Vec<EdgeId> = (0..mi.men.len())
        .map(|m| {
            let name = format!("{}-{}", source_name, inst.vertices[man_vertices[m].0].name);
            inst.add_edge_unranked(name, source, man_vertices[m], 1)
        })
        .collect();
    let mut pair_edges = BTreeMap::new();
    for (m, w) in mi.pairs() {
        let name = format!(
            "{}-{}",
            inst.vertices[man_vertices[m].0].name, inst.vertices[woman_vertices[w].0].name
        );
        let e = inst.add_edge_unranked(name, man_vertices[m], woman_vertices[w], 1);
        pair_edges.insert((m, w), e);
    }
    let sink_edges: Vec<EdgeId> = (0..mi.women.len())
        .map(|w| {
            let name = format!("{}-{}", inst.vertices[woman_vertices[w].0].name, sink_name);
            inst.add_edge_unranked(name, woman_vertices[w], sink, 1)
        })
        .collect();

    for m in 0..mi.men.len() {
        let out = mi.man_prefs[m].iter().map(|&w| pair_edges[&(m, w)]).collect();
        inst.set_preferences(man_vertices[m], vec![source_edges[m]], out);
    }
    for w in 0..mi.women.len() {
        let inc = mi.woman_prefs[w].iter().map(|&m| pair_edges[&(m, w)]).collect();
        inst.set_preferences(woman_vertices[w], inc, vec![sink_edges[w]]);
    }
    for p in &mi.forced {
        inst.restrictions.forced_lower.insert(pair_edges[p], 1);
    }
    for p in &mi.forbidden {
        inst.restrictions.forbidden_upper.insert(pair_edges[p], 0);
    }
    for p in &mi.free {
        inst.restrictions.free.insert(pair_edges[p]);
    }

    Ok((
        inst,
        FlowCorrespondence {
            source,
            sink,
            man_vertices,
            woman_vertices,
            source_edges,
            sink_edges,
            pair_edges,
        },
    ))
}

fn fresh_among(men: &[String], women: &[String], base: &str) -> String {
    let mut name = String::from(base);
    while men.iter().chain(women).any(|x| *x == name) {
        name.push('\'');
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gale_shapley::solve_stable_flow;
    use crate::instance::{flow_value, validate};

    fn build(men: &[&[usize]], women: &[&[usize]]) -> MatchingInstance {
        let mut mi = MatchingInstance::default();
        for i in 0..men.len() {
            mi.add_man(format!("m{}", i + 1));
        }
        for i in 0..women.len() {
            mi.add_woman(format!("w{}", i + 1));
        }
        mi.man_prefs = men.iter().map(|l| l.to_vec()).collect();
        mi.woman_prefs = women.iter().map(|l| l.to_vec()).collect();
        mi
    }

    #[test]
    fn single_pair_becomes_a_path() {
        let mi = build(&[&[0]], &[&[0]]);
        let (inst, corr) = matching_to_flow(&mi).unwrap();
        assert!(validate(&inst).is_ok());
        assert_eq!(inst.edges.len(), 3);
        let f = solve_stable_flow(&inst).unwrap();
        assert_eq!(flow_value(&inst, &f), 1);
        assert_eq!(corr.flow_to_matching(&f), Matching::new([(0, 0)]));
    }

    #[test]
    fn empty_instance_has_value_zero() {
        let mi = MatchingInstance::default();
        let (inst, _) = matching_to_flow(&mi).unwrap();
        assert_eq!(inst.vertices.len(), 2);
        assert!(inst.edges.is_empty());
        let f = solve_stable_flow(&inst).unwrap();
        assert_eq!(flow_value(&inst, &f), 0);
    }

    #[test]
    fn two_by_two_has_one_stable_matching() {
        let mi = build(&[&[0, 1], &[1, 0]], &[&[0, 1], &[1, 0]]);
        let mut all = 0;
        let mut stable = Vec::new();
        mi.for_each_matching(|m| {
            all += 1;
            if mi.is_stable(m, false) {
                stable.push(m.clone());
            }
            true
        });
        assert_eq!(all, 7);
        assert_eq!(stable, vec![Matching::new([(0, 0), (1, 1)])]);
        let (inst, corr) = matching_to_flow(&mi).unwrap();
        let f = solve_stable_flow(&inst).unwrap();
        assert_eq!(flow_value(&inst, &f), 2);
        assert_eq!(corr.flow_to_matching(&f), stable[0]);
    }

    #[test]
    fn ties_must_be_gadgetized_first() {
        let mut mi = build(&[&[0, 1]], &[&[0], &[0]]);
        mi.ties.push(Tie {
            man: 0,
            women: [0, 1],
        });
        assert_eq!(mi.validate(), Ok(()));
        assert_eq!(matching_to_flow(&mi), Err(MatchingError::TiesPresent));
    }

    #[test]
    fn tie_above_bottom_is_malformed() {
        let mut mi = build(&[&[0, 1, 2]], &[&[0], &[0], &[0]]);
        mi.ties.push(Tie {
            man: 0,
            women: [0, 1],
        });
        assert_eq!(mi.validate(), Err(MatchingError::MalformedTie("m1".into())));
    }

    #[test]
    fn asymmetric_lists_are_rejected() {
        let mi = build(&[&[0]], &[&[]]);
        assert!(matches!(mi.validate(), Err(MatchingError::Asymmetric { .. })));
    }

    #[test]
    fn tied_women_are_both_weakly_stable_partners() {
        let mut mi = build(&[&[0, 1]], &[&[0], &[0]]);
        mi.ties.push(Tie {
            man: 0,
            women: [0, 1],
        });
        assert!(mi.is_stable(&Matching::new([(0, 0)]), false));
        assert!(mi.is_stable(&Matching::new([(0, 1)]), false));
        assert!(!mi.is_stable(&Matching::default(), false));
    }

    #[test]
    fn free_pair_does_not_block() {
        let mut mi = build(&[&[0]], &[&[0]]);
        assert!(!mi.is_stable(&Matching::default(), true));
        mi.free.insert((0, 0));
        assert!(mi.is_stable(&Matching::default(), true));
        assert!(!mi.is_stable(&Matching::default(), false));
    }
}
