use stableflow::format::{
    instance_to_json, matching_instance_to_json, parse_flow, parse_instance, parse_matching, InstanceFile,
};
use stableflow::FormatError;
use stableflow_core::generate::{random_instance, random_matching_instance, InstanceParams, MatchingParams};
use stableflow_core::{solve_stable_flow, Flow};

#[test]
fn instances_round_trip() {
    let p = InstanceParams {
        forced_density: 0.3,
        max_forced: 2,
        forbidden_density: 0.3,
        max_forbidden: 2,
        free_density: 0.3,
        allow_loops: true,
        ..Default::default()
    };
    for seed in 0..100 {
        let inst = random_instance(&p, seed);
        let text = instance_to_json(&inst).to_string();
        assert_eq!(parse_instance(&text).unwrap(), inst, "seed {seed}");
    }
}

#[test]
fn matchings_round_trip() {
    let p = MatchingParams {
        max_ties: 2,
        free_density: 0.3,
        ..Default::default()
    };
    for seed in 0..100 {
        let mi = random_matching_instance(&p, seed);
        let text = matching_instance_to_json(&mi).to_string();
        assert_eq!(parse_matching(&text).unwrap(), mi, "seed {seed}");
    }
}

#[test]
fn absent_restriction_fields_mean_unrestricted() {
    let text = r#"{
        "vertices": [{"id": "s", "terminal": true}, {"id": "u"}, {"id": "t", "terminal": true}],
        "edges": [
            {"id": "a", "tail": "s", "head": "u", "capacity": 2},
            {"id": "b", "tail": "u", "head": "t", "capacity": 1}
        ],
        "preferences": {"u": {"in": ["a"], "out": ["b"]}}
    }"#;
    let inst = parse_instance(text).unwrap();
    assert!(inst.restrictions.is_empty());
    let file = InstanceFile::from_instance(&inst);
    assert_eq!(file.edges[0].forced_lower, 0);
    assert_eq!(file.edges[0].forbidden_upper, None);
    let f = solve_stable_flow(&inst).unwrap();
    assert_eq!(f, Flow::from_values(vec![1, 1]));
}

#[test]
fn flows_accept_both_shapes() {
    let inst = random_instance(&InstanceParams::default(), 1);
    let names: Vec<String> = inst.edges.iter().map(|e| e.name.clone()).collect();
    let bare = format!(r#"{{"{}": 1}}"#, names[0]);
    let wrapped = format!(r#"{{"flow": {bare}, "value": 9}}"#);
    let a = parse_flow(&inst, &bare).unwrap();
    assert_eq!(a, parse_flow(&inst, &wrapped).unwrap());
    assert_eq!(a.get(stableflow_core::EdgeId(0)), 1);
    assert_eq!(a.values().iter().sum::<u64>(), 1);
    assert!(matches!(parse_flow(&inst, r#"{"zz": 1}"#), Err(FormatError::UnknownEdge { .. })));
    assert!(matches!(
        parse_flow(&inst, &format!(r#"{{"{}": -1}}"#, names[0])),
        Err(FormatError::FlowValue(_))
    ));
    assert!(matches!(parse_flow(&inst, "[1, 2]"), Err(FormatError::FlowShape)));
}

#[test]
fn duplicates_and_unknown_fields_are_rejected() {
    let dup = r#"{"vertices": [{"id": "s"}, {"id": "s"}], "edges": []}"#;
    assert!(matches!(parse_instance(dup), Err(FormatError::DuplicateVertex(_))));
    let extra = r#"{"vertices": [], "edges": [], "colour": 1}"#;
    assert!(matches!(parse_instance(extra), Err(FormatError::Json(_))));
}
