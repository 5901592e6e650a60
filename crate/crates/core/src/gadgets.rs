//! Worked instances and the tie-removal gadget.
//!
//! A tie `{w1, w2}` at the bottom of man `m`'s list is removed by keeping
//! `mw1` and replacing `mw2` with two paths `m-a-b-w2` and `m-c-d-w2`, where
//! `a`, `c` are new women and `b`, `d` new men. Pairs `mc`, `dw2` and `ab`
//! are free. Weakly stable matchings of size `K` then correspond to stable
//! matchings with free pairs of size `K + 2` per tie.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::MatchingError;
use crate::instance::Instance;
use crate::matching::{Matching, MatchingInstance, Pair, Tie};

/// Unit-capacity network on `s, u, v, t` with edges `su, sv, ut, vt, uv`.
/// `u` ranks `uv` above `ut`, `v` ranks `uv` above `sv`, and `uv` is free.
/// Its stable flows with the free edge have value 1 or 2; without it, 1.
pub fn build_section4_example() -> Instance {
    let mut i = Instance::new();
    let s = i.add_vertex("s", true);
    let u = i.add_vertex("u", false);
    let v = i.add_vertex("v", false);
    let t = i.add_vertex("t", true);
    let su = i.add_edge_unranked("su", s, u, 1);
    let sv = i.add_edge_unranked("sv", s, v, 1);
    let ut = i.add_edge_unranked("ut", u, t, 1);
    let vt = i.add_edge_unranked("vt", v, t, 1);
    let uv = i.add_edge_unranked("uv", u, v, 1);
    i.set_preferences(u, vec![su], vec![uv, ut]);
    i.set_preferences(v, vec![uv, sv], vec![vt]);
    i.restrictions.free.insert(uv);
    i
}

/// The one-tie matching instance drawn next to the gadget: `m` ranks `x1`,
/// `x2` and then the tie `{w1, w2}`; `w1` ranks `m` first, `w2` ranks `m`
/// second between `q` and `p`.
pub fn build_figure_matching() -> MatchingInstance {
    let mut mi = MatchingInstance::default();
    let m = mi.add_man("m");
    let p = mi.add_man("p");
    let q = mi.add_man("q");
    let x1 = mi.add_woman("x1");
    let x2 = mi.add_woman("x2");
    let w1 = mi.add_woman("w1");
    let w2 = mi.add_woman("w2");
    mi.man_prefs[m] = vec![x1, x2, w1, w2];
    mi.man_prefs[p] = vec![w1, w2];
    mi.man_prefs[q] = vec![w2];
    mi.woman_prefs[x1] = vec![m];
    mi.woman_prefs[x2] = vec![m];
    mi.woman_prefs[w1] = vec![m, p];
    mi.woman_prefs[w2] = vec![q, m, p];
    mi.ties.push(Tie {
        man: m,
        women: [w1, w2],
    });
    mi
}

/// Vertices of one gadget in the output instance. `m`, `w1`, `w2` keep their
/// input indices; `a`, `c` are new women and `b`, `d` new men.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieGadget {
    pub m: usize,
    pub w1: usize,
    pub w2: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl TieGadget {
    pub fn mw1(&self) -> Pair {
        (self.m, self.w1)
    }
    pub fn ma(&self) -> Pair {
        (self.m, self.a)
    }
    pub fn mc(&self) -> Pair {
        (self.m, self.c)
    }
    pub fn ab(&self) -> Pair {
        (self.b, self.a)
    }
    pub fn cd(&self) -> Pair {
        (self.d, self.c)
    }
    pub fn bw2(&self) -> Pair {
        (self.b, self.w2)
    }
    pub fn dw2(&self) -> Pair {
        (self.d, self.w2)
    }

    /// The seven gadget pairs with their free flags.
    pub fn pairs(&self) -> [(Pair, bool); 7] {
        [
            (self.mw1(), false),
            (self.ma(), false),
            (self.mc(), true),
            (self.ab(), true),
            (self.cd(), false),
            (self.bw2(), false),
            (self.dw2(), true),
        ]
    }

    fn new_men(&self) -> [usize; 2] {
        [self.b, self.d]
    }

    fn new_women(&self) -> [usize; 2] {
        [self.a, self.c]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GadgetMap {
    pub gadgets: Vec<TieGadget>,
    pub original_men: usize,
    pub original_women: usize,
}

impl GadgetMap {
    /// Cardinality offset between the two sides of the correspondence.
    pub fn offset(&self) -> usize {
        2 * self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }
}

fn fresh(names: &[String], base: String) -> String {
    let mut name = base;
    while names.contains(&name) {
        name.push('\'');
    }
    name
}

/// Replaces every tie by the gadget. The result has no ties; original men
/// and women keep their indices.
pub fn gadgetize_ties(mi: &MatchingInstance) -> Result<(MatchingInstance, GadgetMap), MatchingError> {
    mi.validate()?;
    let mut out = mi.clone();
    out.ties.clear();
    let mut map = GadgetMap {
        gadgets: Vec::with_capacity(mi.ties.len()),
        original_men: mi.men.len(),
        original_women: mi.women.len(),
    };
    for tie in &mi.ties {
        let m = tie.man;
        let [w1, w2] = tie.women;
        let mw2 = (m, w2);
        if out.forced.contains(&mw2) || out.forbidden.contains(&mw2) || out.free.contains(&mw2) {
            return Err(MatchingError::MalformedTie(mi.men[m].clone()));
        }
        let man = mi.men[m].clone();
        let a_name = fresh(&out.women, format!("{man}.a"));
        let a = out.add_woman(a_name);
        let c_name = fresh(&out.women, format!("{man}.c"));
        let c = out.add_woman(c_name);
        let b_name = fresh(&out.men, format!("{man}.b"));
        let b = out.add_man(b_name);
        let d_name = fresh(&out.men, format!("{man}.d"));
        let d = out.add_man(d_name);
        let g = TieGadget {
            m,
            w1,
            w2,
            a,
            b,
            c,
            d,
        };

        let list = &mut out.man_prefs[m];
        list.retain(|&w| w != w1 && w != w2);
        list.extend([c, w1, a]);
        out.woman_prefs[a] = vec![m, b];
        out.woman_prefs[c] = vec![d, m];
        out.man_prefs[b] = vec![a, w2];
        out.man_prefs[d] = vec![w2, c];
        let w2_list = &mut out.woman_prefs[w2];
        let slot = w2_list
            .iter()
            .position(|&x| x == m)
            .ok_or_else(|| MatchingError::MalformedTie(man.clone()))?;
        w2_list[slot] = d;
        w2_list.insert(slot, b);
        out.free.extend([g.mc(), g.ab(), g.dw2()]);
        map.gadgets.push(g);
    }
    Ok((out, map))
}

/// How a weakly stable matching treats the tied man of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `mw2` is matched.
    TiePairMatched,
    /// `m` is single.
    Unmatched,
    /// `m` is matched to someone other than `w2`.
    MatchedElsewhere,
}

pub fn classify(gadget: &TieGadget, matching: &Matching) -> Scenario {
    match matching.partner_of_man(gadget.m) {
        Some(w) if w == gadget.w2 => Scenario::TiePairMatched,
        Some(_) => Scenario::MatchedElsewhere,
        None => Scenario::Unmatched,
    }
}

/// Pairs added inside the gadget for a scenario.
pub fn scenario_pairs(gadget: &TieGadget, scenario: Scenario) -> Vec<Pair> {
    match scenario {
        Scenario::TiePairMatched => vec![gadget.mc(), gadget.dw2(), gadget.ab()],
        Scenario::Unmatched => vec![gadget.ma(), gadget.cd()],
        Scenario::MatchedElsewhere => vec![gadget.cd(), gadget.ab()],
    }
}

/// Lifts a matching of the tied instance to the gadgetized one: every pair
/// but `mw2` is copied and each gadget is completed per its scenario.
pub fn complete_matching_scenarios(map: &GadgetMap, matching: &Matching) -> Matching {
    let tie_pairs: BTreeSet<Pair> = map.gadgets.iter().map(|g| (g.m, g.w2)).collect();
    let mut pairs: BTreeSet<Pair> = matching
        .pairs
        .iter()
        .copied()
        .filter(|p| !tie_pairs.contains(p))
        .collect();
    for g in &map.gadgets {
        pairs.extend(scenario_pairs(g, classify(g, matching)));
    }
    Matching { pairs }
}

/// Projects a matching of the gadgetized instance back: gadget pairs are
/// dropped and `mw2` is reinstated when `m` is matched to `a` or `c` and
/// `w2` to `b` or `d`.
pub fn back_map(map: &GadgetMap, matching: &Matching) -> Matching {
    let mut pairs: BTreeSet<Pair> = matching
        .pairs
        .iter()
        .copied()
        .filter(|&(m, w)| m < map.original_men && w < map.original_women)
        .collect();
    for g in &map.gadgets {
        let m_in = matching
            .partner_of_man(g.m)
            .is_some_and(|w| g.new_women().contains(&w));
        let w2_in = matching
            .partner_of_woman(g.w2)
            .is_some_and(|m| g.new_men().contains(&m));
        if m_in && w2_in {
            pairs.insert((g.m, g.w2));
        }
    }
    Matching { pairs }
}

/// End of a pair: the man or the woman.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Man,
    Woman,
}

/// Why a candidate blocking pair does not block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    InMatching,
    DominatedAt(End),
}

/// Candidate blockers examined by the dominance table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Ma,
    Cd,
    Bw2,
    Mw1,
}

impl Candidate {
    pub const ALL: [Candidate; 4] = [Candidate::Ma, Candidate::Cd, Candidate::Bw2, Candidate::Mw1];

    pub fn pair(self, g: &TieGadget) -> Pair {
        match self {
            Candidate::Ma => g.ma(),
            Candidate::Cd => g.cd(),
            Candidate::Bw2 => g.bw2(),
            Candidate::Mw1 => g.mw1(),
        }
    }
}

/// Accepted reasons per candidate and scenario.
pub fn dominance_table(candidate: Candidate, scenario: Scenario) -> &'static [Reason] {
    use Reason::*;
    use Scenario::*;
    match (candidate, scenario) {
        (Candidate::Ma, TiePairMatched) => &[DominatedAt(End::Man)],
        (Candidate::Ma, Unmatched) => &[InMatching],
        (Candidate::Ma, MatchedElsewhere) => &[DominatedAt(End::Man)],
        (Candidate::Cd, TiePairMatched) => &[DominatedAt(End::Man)],
        (Candidate::Cd, Unmatched) => &[InMatching],
        (Candidate::Cd, MatchedElsewhere) => &[InMatching],
        (Candidate::Bw2, TiePairMatched) => &[DominatedAt(End::Man)],
        (Candidate::Bw2, Unmatched) => &[DominatedAt(End::Woman)],
        (Candidate::Bw2, MatchedElsewhere) => &[DominatedAt(End::Man)],
        (Candidate::Mw1, TiePairMatched) => &[DominatedAt(End::Man)],
        (Candidate::Mw1, Unmatched) => &[DominatedAt(End::Woman)],
        (Candidate::Mw1, MatchedElsewhere) => &[InMatching, DominatedAt(End::Man)],
    }
}

/// Whether `reason` holds for `pair` under `matching` in `mi`.
pub fn reason_holds(mi: &MatchingInstance, matching: &Matching, pair: Pair, reason: Reason) -> bool {
    let (m, w) = pair;
    match reason {
        Reason::InMatching => matching.contains(m, w),
        Reason::DominatedAt(End::Man) => matching
            .partner_of_man(m)
            .is_some_and(|p| p != w && mi.man_rank(m, p) < mi.man_rank(m, w)),
        Reason::DominatedAt(End::Woman) => matching
            .partner_of_woman(w)
            .is_some_and(|p| p != m && mi.woman_rank(w, p) < mi.woman_rank(w, m)),
    }
}

/// Audits the table for one gadget: every candidate meets one of its
/// tabulated reasons. Returns the first candidate that does not.
pub fn audit_dominance(
    gadgetized: &MatchingInstance,
    gadget: &TieGadget,
    scenario: Scenario,
    lifted: &Matching,
) -> Result<(), Candidate> {
    for c in Candidate::ALL {
        let pair = c.pair(gadget);
        let ok = dominance_table(c, scenario)
            .iter()
            .any(|&r| reason_holds(gadgetized, lifted, pair, r));
        if !ok {
            return Err(c);
        }
    }
    Ok(())
}
