#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stableflow_core::generate::{random_instance, random_matching_instance, InstanceParams, MatchingParams};
use stableflow_core::{EdgeId, Instance, MatchingInstance};

fn shape(seed: u64, max_vertices: usize, max_edges: usize, max_capacity: u64) -> InstanceParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    InstanceParams {
        vertices: rng.gen_range(2..=max_vertices),
        edges: rng.gen_range(1..=max_edges),
        min_capacity: 1,
        max_capacity,
        terminal_fraction: rng.gen_range(0.2..0.6),
        allow_loops: rng.gen_bool(0.2),
        ..InstanceParams::default()
    }
}

/// Instances for the classic solver: up to 10 vertices, 16 edges,
/// capacity 3.
pub fn solver_instance(seed: u64) -> Instance {
    random_instance(&shape(seed, 10, 16, 3), seed)
}

/// Instances small enough for exhaustive enumeration: up to 8 edges,
/// capacity 2.
pub fn oracle_instance(seed: u64) -> Instance {
    random_instance(&shape(seed, 6, 8, 2), seed)
}

pub fn forced_instance(seed: u64) -> Instance {
    let p = InstanceParams {
        forced_density: 0.35,
        max_forced: 2,
        ..shape(seed, 6, 8, 2)
    };
    random_instance(&p, seed)
}

pub fn forbidden_instance(seed: u64) -> Instance {
    let p = InstanceParams {
        forbidden_density: 0.4,
        max_forbidden: 3,
        ..shape(seed, 6, 8, 2)
    };
    random_instance(&p, seed)
}

pub fn mixed_instance(seed: u64) -> Instance {
    let p = InstanceParams {
        forced_density: 0.3,
        max_forced: 2,
        forbidden_density: 0.3,
        max_forbidden: 2,
        ..shape(seed, 6, 8, 2)
    };
    random_instance(&p, seed)
}

pub fn random_free_set(instance: &Instance, seed: u64) -> BTreeSet<EdgeId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf7ee);
    instance.edge_ids().filter(|_| rng.gen_bool(0.3)).collect()
}

pub fn tied_matching(seed: u64) -> MatchingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x71e5);
    let p = MatchingParams {
        men: rng.gen_range(1..=4),
        women: rng.gen_range(2..=4),
        density: rng.gen_range(0.4..0.9),
        max_ties: 2,
        free_density: 0.0,
    };
    random_matching_instance(&p, seed)
}

/// Tie-free matching instances. Odd seeds give complete instances with
/// cyclic lists, which have at least two stable matchings.
pub fn plain_matching(seed: u64) -> MatchingInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a7c);
    if seed % 2 == 1 {
        let n = rng.gen_range(2..=4);
        let shift = rng.gen_range(1..n);
        let mut mi = MatchingInstance::default();
        for k in 0..n {
            mi.add_man(format!("m{k}"));
            mi.add_woman(format!("w{k}"));
        }
        for i in 0..n {
            mi.man_prefs[i] = (0..n).map(|k| (i + k) % n).collect();
            mi.woman_prefs[i] = (0..n).map(|k| (i + shift + k) % n).collect();
        }
        return mi;
    }
    let p = MatchingParams {
        men: rng.gen_range(0..=4),
        women: rng.gen_range(0..=4),
        density: rng.gen_range(0.4..1.0),
        max_ties: 0,
        free_density: 0.0,
    };
    random_matching_instance(&p, seed)
}
