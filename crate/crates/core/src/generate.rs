//! Seeded random instances.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{EdgeId, Instance, VertexId};
use crate::matching::{MatchingInstance, Tie};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceParams {
    pub vertices: usize,
    pub edges: usize,
    pub min_capacity: u64,
    pub max_capacity: u64,
    /// Share of vertices that are terminals, rounded, at least one when
    /// there are vertices.
    pub terminal_fraction: f64,
    pub allow_loops: bool,
    /// Chance per edge of being forced, up to `max_forced` edges.
    pub forced_density: f64,
    pub max_forced: usize,
    /// Chance per edge of being forbidden, up to `max_forbidden` edges.
    pub forbidden_density: f64,
    pub max_forbidden: usize,
    /// When false, forced edges get `u = c` and forbidden edges `u = 0`.
    pub partial_bounds: bool,
    pub free_density: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            vertices: 6,
            edges: 8,
            min_capacity: 1,
            max_capacity: 2,
            terminal_fraction: 0.35,
            allow_loops: false,
            forced_density: 0.0,
            max_forced: 0,
            forbidden_density: 0.0,
            max_forbidden: 0,
            partial_bounds: true,
            free_density: 0.0,
        }
    }
}

/// A valid instance determined by `params` and `seed`. Edges are uniform
/// random vertex pairs; every preference list is a random permutation.
pub fn random_instance(params: &InstanceParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.vertices;
    let mut inst = Instance::new();
    if n == 0 {
        return inst;
    }
    let terminals = ((params.terminal_fraction * n as f64 + 0.5) as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut is_terminal = alloc::vec![false; n];
    for &v in &order[..terminals] {
        is_terminal[v] = true;
    }
    for (v, &terminal) in is_terminal.iter().enumerate() {
        inst.add_vertex(format!("v{v}"), terminal);
    }
    for k in 0..params.edges {
        let tail = rng.gen_range(0..n);
        let mut head = rng.gen_range(0..n);
        if !params.allow_loops && n > 1 {
            while head == tail {
                head = rng.gen_range(0..n);
            }
        }
        let cap = rng.gen_range(params.min_capacity.max(1)..=params.max_capacity.max(params.min_capacity).max(1));
        inst.add_edge_unranked(format!("e{k}"), VertexId(tail), VertexId(head), cap);
    }
    let adj = inst.adjacency();
    for (v, &terminal) in is_terminal.iter().enumerate() {
        if terminal {
            continue;
        }
        let mut inc = adj.inc[v].clone();
        let mut out = adj.out[v].clone();
        inc.shuffle(&mut rng);
        out.shuffle(&mut rng);
        inst.set_preferences(VertexId(v), inc, out);
    }
    let mut edges: Vec<EdgeId> = inst.edge_ids().collect();
    edges.shuffle(&mut rng);
    let (mut forced, mut forbidden) = (0, 0);
    for e in edges {
        let c = inst.edges[e.0].capacity;
        let r = &mut inst.restrictions;
        if forced < params.max_forced && rng.gen_bool(params.forced_density) {
            let u = if params.partial_bounds { rng.gen_range(1..=c) } else { c };
            r.forced_lower.insert(e, u);
            forced += 1;
        } else if forbidden < params.max_forbidden && rng.gen_bool(params.forbidden_density) {
            let u = if params.partial_bounds { rng.gen_range(0..c) } else { 0 };
            r.forbidden_upper.insert(e, u);
            forbidden += 1;
        } else if rng.gen_bool(params.free_density) {
            r.free.insert(e);
        }
    }
    inst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingParams {
    pub men: usize,
    pub women: usize,
    /// Chance that a man-woman pair is mutually acceptable.
    pub density: f64,
    /// Upper bound on ties; each goes to a distinct man with at least two
    /// acceptable women.
    pub max_ties: usize,
    pub free_density: f64,
}

impl Default for MatchingParams {
    fn default() -> Self {
        MatchingParams {
            men: 4,
            women: 4,
            density: 0.6,
            max_ties: 0,
            free_density: 0.0,
        }
    }
}

/// A valid matching instance determined by `params` and `seed`. Ties take
/// the last two women of a man's list.
pub fn random_matching_instance(params: &MatchingParams, seed: u64) -> MatchingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mi = MatchingInstance::default();
    for m in 0..params.men {
        mi.add_man(format!("m{m}"));
    }
    for w in 0..params.women {
        mi.add_woman(format!("w{w}"));
    }
    for m in 0..params.men {
        for w in 0..params.women {
            if rng.gen_bool(params.density) {
                mi.man_prefs[m].push(w);
                mi.woman_prefs[w].push(m);
            }
        }
    }
    for list in mi.man_prefs.iter_mut().chain(mi.woman_prefs.iter_mut()) {
        list.shuffle(&mut rng);
    }
    let mut candidates: Vec<usize> = (0..params.men).filter(|&m| mi.man_prefs[m].len() >= 2).collect();
    candidates.shuffle(&mut rng);
    let ties = rng.gen_range(0..=params.max_ties.min(candidates.len()));
    let mut tied: Vec<usize> = candidates[..ties].to_vec();
    tied.sort_unstable();
    for m in tied {
        let list = &mi.man_prefs[m];
        let k = list.len();
        mi.ties.push(Tie {
            man: m,
            women: [list[k - 2], list[k - 1]],
        });
    }
    if params.free_density > 0.0 {
        let pairs: Vec<_> = mi.pairs().collect();
        for p in pairs {
            if rng.gen_bool(params.free_density) {
                mi.free.insert(p);
            }
        }
    }
    mi
}
