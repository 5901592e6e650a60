use std::collections::BTreeSet;

use stableflow_core::gadgets::{
    back_map, build_figure_matching, build_section4_example, complete_matching_scenarios,
    gadgetize_ties,
};
use stableflow_core::instance::{split_forbidden_lower, split_forced_lower};
use stableflow_core::matching::{matching_to_flow, Tie};
use stableflow_core::oracle::{Invariance, Objective};
use stableflow_core::restricted::{InfeasibleReason, Infeasibility};
use stableflow_core::*;

fn flow_of(i: &Instance, named: &[(&str, u64)]) -> Flow {
    let mut f = Flow::zero(i.edges.len());
    for &(n, x) in named {
        f[i.edge_by_name(n).unwrap()] = x;
    }
    f
}

#[test]
fn free_edge_has_five_feasible_flows() {
    // frozen after hand-listing: zero, s-u-t, s-v-t, s-u-v-t, s-u-t + s-v-t
    let i = build_section4_example();
    let flows = Oracle::default().enumerate_feasible_flows(&i).unwrap();
    assert_eq!(flows.len(), 5);
}

#[test]
fn free_edge_classic_stable_flows() {
    let i = build_section4_example();
    let stable = Oracle::default()
        .enumerate_stable_flows(&i, &BTreeSet::new())
        .unwrap();
    assert_eq!(stable, vec![flow_of(&i, &[("su", 1), ("uv", 1), ("vt", 1)])]);
    let profile = terminal_profile(&i, &stable[0]);
    let expected = [("su", 1), ("sv", 0), ("ut", 0), ("vt", 1)]
        .map(|(n, x)| (i.edge_by_name(n).unwrap(), x));
    assert_eq!(profile.into_iter().collect::<Vec<_>>(), expected.to_vec());
    assert_eq!(flow_value(&i, &stable[0]), 1);
}

#[test]
fn free_edge_free_stable_flows() {
    let i = build_section4_example();
    let free = i.restrictions.free.clone();
    let stable = Oracle::default().enumerate_stable_flows(&i, &free).unwrap();
    let values: BTreeSet<u64> = stable.iter().map(|f| flow_value(&i, f)).collect();
    assert_eq!(values, [1, 2].into_iter().collect());
    let two = flow_of(&i, &[("su", 1), ("sv", 1), ("ut", 1), ("vt", 1)]);
    assert!(stable.contains(&two));
    let profile = terminal_profile(&i, &two);
    assert!(profile.values().all(|&x| x == 1));
    let (best, witness) = Oracle::default()
        .optimal_free_stable_value(&i, &free, Objective::Max)
        .unwrap();
    assert_eq!((best, witness), (2, two));
}

#[test]
fn free_edge_invariance_counterexample() {
    let i = build_section4_example();
    let free = i.restrictions.free.clone();
    match Oracle::default().check_terminal_invariance(&i, &free).unwrap() {
        Invariance::Counterexample(a, b) => {
            assert_ne!(flow_value(&i, &a), flow_value(&i, &b));
        }
        other => panic!("expected a counterexample, got {other:?}"),
    }
}

#[test]
fn free_edge_checker_values() {
    let i = build_section4_example();
    let path = flow_of(&i, &[("su", 1), ("uv", 1), ("vt", 1)]);
    assert_eq!(check_feasible(&i, &path, BoundCheck::Capacity), Ok(()));
    assert!(!is_stable(&i, &Flow::zero(5), &BTreeSet::new()));
}

#[test]
fn forbidding_uv_in_free_edge_is_infeasible() {
    let mut i = build_section4_example();
    let uv = i.edge_by_name("uv").unwrap();
    i.restrictions.free.clear();
    i.restrictions.forbidden_upper.insert(uv, 0);
    assert_eq!(Oracle::default().find_restricted_stable_flow(&i).unwrap(), None);
    assert_eq!(
        solve_forbidden(&i).unwrap(),
        Verdict::Infeasible(Infeasibility {
            edge: uv,
            reason: InfeasibleReason::ForbiddenUnavoidable
        })
    );
}

/// `u` sends its unit to `x` in every stable flow, so `uv` stays empty. A
/// source edge at `v` would fill `v`, but a sink edge at `u` stays empty.
fn sink_edge_instance() -> Instance {
    let mut i = Instance::new();
    let s = i.add_vertex("s", true);
    let u = i.add_vertex("u", false);
    let x = i.add_vertex("x", false);
    let v = i.add_vertex("v", false);
    let t = i.add_vertex("t", true);
    i.add_edge("su", s, u, 1);
    i.add_edge("ux", u, x, 1);
    i.add_edge("xt", x, t, 1);
    let uv = i.add_edge("uv", u, v, 1);
    i.add_edge("vt", v, t, 1);
    i.restrictions.forbidden_upper.insert(uv, 0);
    i
}

#[test]
fn forbidden_edge_lands_in_p2() {
    let i = sink_edge_instance();
    let uv = i.edge_by_name("uv").unwrap();
    assert!(Oracle::default().find_restricted_stable_flow(&i).unwrap().is_some());
    let Verdict::Feasible(sol) = solve_forbidden(&i).unwrap() else {
        panic!("expected a feasible verdict");
    };
    assert_eq!(sol.p1, vec![]);
    assert_eq!(sol.p2, vec![uv]);
    assert_eq!(sol.flow, flow_of(&i, &[("su", 1), ("ux", 1), ("xt", 1)]));
    let state = sol.state.unwrap();
    assert!(state.zero_on_handled());
}

#[test]
fn forced_only_and_forbidden_only_match_the_combined_solver() {
    let mut forced = build_section4_example();
    forced.restrictions.free.clear();
    let ut = forced.edge_by_name("ut").unwrap();
    forced.restrictions.forced_lower.insert(ut, 1);
    assert_eq!(solve_restricted(&forced).unwrap(), solve_forced(&forced).unwrap());
    assert!(!solve_forced(&forced).unwrap().is_feasible());

    let forbidden = sink_edge_instance();
    assert_eq!(
        solve_restricted(&forbidden).unwrap(),
        solve_forbidden(&forbidden).unwrap()
    );
}

#[test]
fn split_examples() {
    let mut i = Instance::new();
    let s = i.add_vertex("s", true);
    let u = i.add_vertex("u", false);
    let t = i.add_vertex("t", true);
    i.add_edge("su", s, u, 5);
    let ut = i.add_edge("ut", u, t, 5);
    i.restrictions.forbidden_upper.insert(ut, 2);
    let (out, map) = split_forbidden_lower(&i);
    let parts = map.parts(ut);
    assert_eq!(parts.len(), 2);
    assert_eq!(out.edges[parts[0].0].capacity, 2);
    assert_eq!(out.edges[parts[1].0].capacity, 3);
    assert_eq!(out.restrictions.forbidden_upper.get(&parts[1]), Some(&0));
    assert!(!out.restrictions.forbidden_upper.contains_key(&parts[0]));
    assert_eq!(out.preferences[u.0].outgoing, parts.to_vec());
    assert!(validate(&out).is_ok());

    let mut j = i.unrestricted();
    let e = j.edge_by_name("su").unwrap();
    j.edges[e.0].capacity = 4;
    j.restrictions.forced_lower.insert(e, 1);
    let (out, map) = split_forced_lower(&j);
    let parts = map.parts(e);
    assert_eq!(out.edges[parts[0].0].capacity, 1);
    assert_eq!(out.edges[parts[1].0].capacity, 3);
    assert_eq!(out.restrictions.forced_lower.get(&parts[0]), Some(&1));
    assert_eq!(out.preferences[u.0].incoming, parts.to_vec());

    j.restrictions.forced_lower.insert(e, 4);
    let (out, map) = split_forced_lower(&j);
    assert!(map.is_identity());
    assert_eq!(out, j);
}

#[test]
fn cyclic_two_by_two_transition() {
    let mut mi = MatchingInstance::default();
    let m1 = mi.add_man("m1");
    let m2 = mi.add_man("m2");
    let w1 = mi.add_woman("w1");
    let w2 = mi.add_woman("w2");
    mi.man_prefs[m1] = vec![w1, w2];
    mi.man_prefs[m2] = vec![w2, w1];
    mi.woman_prefs[w1] = vec![m1, m2];
    mi.woman_prefs[w2] = vec![m2, m1];
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
    assert_eq!(stable, vec![Matching::new([(m1, w1), (m2, w2)])]);
    let (inst, corr) = matching_to_flow(&mi).unwrap();
    let f = solve_stable_flow(&inst).unwrap();
    assert_eq!(flow_value(&inst, &f), 2);
    assert_eq!(corr.flow_to_matching(&f), stable[0]);
}

#[test]
fn figure_instance_weakly_stable_size() {
    // frozen from enumeration: m takes x1, p takes w1, q takes w2
    let mi = build_figure_matching();
    let oracle = Oracle::default();
    assert_eq!(oracle.max_weakly_stable_size(&mi).unwrap(), 3);
    let (g, map) = gadgetize_ties(&mi).unwrap();
    assert_eq!(oracle.max_free_stable_size(&g).unwrap(), 5);
    for m in oracle.enumerate_weakly_stable_matchings(&mi).unwrap() {
        let lifted = complete_matching_scenarios(&map, &m);
        assert!(g.is_stable(&lifted, true));
        assert_eq!(back_map(&map, &lifted), m);
    }
}

#[test]
fn two_ties_add_four() {
    // two men share the bottom pair of women, in opposite orders
    let mut mi = MatchingInstance::default();
    let m1 = mi.add_man("m1");
    let m2 = mi.add_man("m2");
    let w1 = mi.add_woman("w1");
    let w2 = mi.add_woman("w2");
    let w3 = mi.add_woman("w3");
    mi.man_prefs[m1] = vec![w3, w1, w2];
    mi.man_prefs[m2] = vec![w2, w1];
    mi.woman_prefs[w1] = vec![m2, m1];
    mi.woman_prefs[w2] = vec![m1, m2];
    mi.woman_prefs[w3] = vec![m1];
    mi.ties.push(Tie { man: m1, women: [w1, w2] });
    mi.ties.push(Tie { man: m2, women: [w2, w1] });
    let oracle = Oracle::default();
    let k = oracle.max_weakly_stable_size(&mi).unwrap();
    let (g, map) = gadgetize_ties(&mi).unwrap();
    assert_eq!(map.offset(), 4);
    assert_eq!(oracle.max_free_stable_size(&g).unwrap(), k + 4);
}

#[test]
fn all_terminal_instances_saturate_everything() {
    let p = stableflow_core::generate::InstanceParams {
        vertices: 4,
        edges: 6,
        terminal_fraction: 1.0,
        ..Default::default()
    };
    for seed in 0..20 {
        let i = stableflow_core::generate::random_instance(&p, seed);
        let caps: Vec<u64> = i.edges.iter().map(|e| e.capacity).collect();
        let stable = Oracle::default()
            .enumerate_stable_flows(&i, &BTreeSet::new())
            .unwrap();
        assert_eq!(stable, vec![Flow::from_values(caps)]);
    }
}

#[test]
fn back_map_can_strand_w2() {
    // w3 is held by d through the free pair while m1 sits outside the
    // gadget; dropping d leaves w3 single and m0 w3 blocks
    let mut mi = MatchingInstance::default();
    for k in 0..3 {
        mi.add_man(format!("m{k}"));
    }
    for k in 0..4 {
        mi.add_woman(format!("w{k}"));
    }
    mi.man_prefs = vec![vec![3, 1, 2, 0], vec![1, 2, 0, 3], vec![1, 0, 3, 2]];
    mi.woman_prefs = vec![vec![1, 2, 0], vec![0, 2, 1], vec![1, 2, 0], vec![1, 2, 0]];
    mi.ties.push(Tie { man: 1, women: [0, 3] });
    let (g, map) = gadgetize_ties(&mi).unwrap();
    let gadget = map.gadgets[0];
    let stranded = Matching::new([(0, 1), (1, 2), (2, 0), gadget.ab(), gadget.dw2()]);
    assert!(g.is_stable(&stranded, true));
    let m = back_map(&map, &stranded);
    assert_eq!(m, Matching::new([(0, 1), (1, 2), (2, 0)]));
    assert_eq!(mi.blocking_pair(&m, false), Some((0, 3)));

    let good = Matching::new([(0, 3), (1, 2), (2, 1), gadget.ab(), gadget.cd()]);
    assert!(g.is_stable(&good, true));
    assert!(mi.is_stable(&back_map(&map, &good), false));
    assert_eq!(Oracle::default().max_weakly_stable_size(&mi).unwrap(), 3);
    assert_eq!(Oracle::default().max_free_stable_size(&g).unwrap(), 5);
}
