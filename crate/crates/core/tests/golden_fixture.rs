use creamkit::fixtures::{DEFAULT_TAXONOMY_JSON, SYNTHETIC_FULL_HTA, TABLE4_HTA};
use creamkit::{
    analyze, collect_assignments, default_taxonomy, demand_profile, load_taxonomy, parse_hta, rank_critical,
    serialize_hta, validate_hta, CfpSource, CognitiveFunction, CpcAssessment, NodeNumber, Scope,
};

// Printed CFP column, row by row.
const PRINTED_CFPS: [(&str, &str, f64); 31] = [
    ("3.1.1", "P1", 1e-2),
    ("3.1.2", "P1", 1e-2),
    ("3.2", "O2", 7e-2),
    ("3.2", "P1", 1e-2),
    ("3.3.1", "O2", 7e-2),
    ("3.3.1", "E5", 3e-2),
    ("3.3.2", "P2", 1e-2),
    ("3.3.2", "E3", 5e-4),
    ("3.3.3", "O2", 7e-2),
    ("3.3.3", "P1", 1e-2),
    ("3.3.3", "E3", 5e-4),
    ("3.3.4.1", "P2", 1e-2),
    ("3.3.4.2", "P2", 1e-2),
    ("3.3.4.2", "E1", 3e-3),
    ("3.3.4.3", "O2", 7e-2),
    ("3.3.4.3", "P2", 1e-2),
    ("3.3.4.3", "E1", 3e-3),
    ("3.3.4.4", "E4", 3e-3),
    ("3.3.4.5", "O1", 1e-3),
    ("3.3.4.5", "P2", 1e-2),
    ("3.3.4.5", "E5", 3e-2),
    ("3.3.5", "O3", 7e-2),
    ("3.3.5", "P1", 1e-2),
    ("3.3.5", "E4", 3e-3),
    ("3.3.5.1", "E5", 3e-2),
    ("3.3.6", "O3", 7e-2),
    ("3.3.6", "P2", 1e-2),
    ("3.3.6", "E5", 3e-2),
    ("3.3.7", "O1", 1e-3),
    ("3.3.7", "P2", 1e-2),
    ("3.3.7", "E5", 3e-2),
];

fn num(s: &str) -> NodeNumber {
    s.parse().unwrap()
}

#[test]
fn step3_structure() {
    let tree = parse_hta(TABLE4_HTA).unwrap();
    assert_eq!(tree.node_count(), 19);
    assert_eq!(tree.assignment_count(), 31);
    assert_eq!(collect_assignments(&tree).len(), 31);
    assert!(validate_hta(&tree, &default_taxonomy()).is_valid());
    let n335 = tree.find(&num("3.3.5")).unwrap();
    assert_eq!(n335.assignments.len(), 3);
    assert_eq!(n335.children.len(), 1);
    assert_eq!(n335.assignments[0].function, CognitiveFunction::Observation);
    assert_eq!(tree.metadata.name, "#3 Check the quality of the film");
}

#[test]
fn step3_roundtrip() {
    let tree = parse_hta(TABLE4_HTA).unwrap();
    let text = serialize_hta(&tree);
    assert_eq!(parse_hta(&text).unwrap(), tree);
    // canonical form is a fixed point
    assert_eq!(serialize_hta(&parse_hta(&text).unwrap()), text);
    assert!(text.contains("3.1.1 \"Open paper folder\" cf=Planning:P1@0.01\n"));
}

#[test]
fn step3_analysis_reproduces_printed_cfps() {
    let t = default_taxonomy();
    let tree = parse_hta(TABLE4_HTA).unwrap();
    for ctx in [CpcAssessment::all_best(&t), CpcAssessment::all_worst(&t), CpcAssessment::all_neutral(&t).unwrap()] {
        let r = analyze(&tree, &ctx, &t).unwrap();
        assert_eq!(r.per_assignment.len(), 31);
        for (got, (node, cff, cfp)) in r.per_assignment.iter().zip(PRINTED_CFPS) {
            assert_eq!(got.node.to_string(), node);
            assert_eq!(got.cff.as_str(), cff);
            assert_eq!(got.adjusted_cfp, cfp, "{node} {cff}");
            assert_eq!(got.source, CfpSource::Override);
        }
        let worst = &r.per_node_worst[&num("3.3.2")];
        assert_eq!((worst.cff.as_str(), worst.adjusted_cfp), ("P2", 0.01));
        assert_eq!(r.per_node_worst.len(), 15);
        assert!(r.per_node_worst.iter().all(|(n, a)| &a.node == n));
    }
}

#[test]
fn step3_profile_and_ranking() {
    let t = default_taxonomy();
    let tree = parse_hta(TABLE4_HTA).unwrap();
    let p = demand_profile(&tree, &Scope::Node(num("3"))).unwrap();
    assert_eq!(p.as_array(), [8, 0, 12, 11]);
    let r = analyze(&tree, &CpcAssessment::all_neutral(&t).unwrap(), &t).unwrap();
    let top = rank_critical(&r, 1);
    assert_eq!(top[0].adjusted_cfp, 0.07);
    assert_eq!(top[0].node.to_string(), "3.2");
    assert_eq!(rank_critical(&r, 100).len(), 31);
}

#[test]
fn synthetic_tree_matches_declared_sizes() {
    let tree = parse_hta(SYNTHETIC_FULL_HTA).unwrap();
    assert!(validate_hta(&tree, &default_taxonomy()).is_valid());
    let subtasks: Vec<usize> = tree.roots.iter().map(|r| tree_size(r) - 1).collect();
    assert_eq!(subtasks, [11, 9, 18, 22]);
    assert_eq!(subtasks.iter().sum::<usize>(), 60);

    let whole = demand_profile(&tree, &Scope::WholeTree).unwrap();
    let mut summed = [0usize; 4];
    for r in &tree.roots {
        let p = demand_profile(&tree, &Scope::Node(r.number.clone())).unwrap();
        for (s, c) in summed.iter_mut().zip(p.as_array()) {
            *s += c;
        }
    }
    assert_eq!(whole.as_array(), summed);
    assert_eq!(parse_hta(&serialize_hta(&tree)).unwrap(), tree);
}

fn tree_size(n: &creamkit::TaskNode) -> usize {
    1 + n.children.iter().map(tree_size).sum::<usize>()
}

#[test]
fn shipped_taxonomy_document_is_the_default() {
    let t = load_taxonomy(DEFAULT_TAXONOMY_JSON).unwrap();
    assert_eq!(t, default_taxonomy());
    assert_eq!(t.to_json(), DEFAULT_TAXONOMY_JSON);
}

#[test]
fn json_export_roundtrips() {
    let tree = parse_hta(TABLE4_HTA).unwrap();
    let json = serde_json::to_string(&tree).unwrap();
    let back: creamkit::TaskTree = serde_json::from_str(&json).unwrap();
    assert_eq!(back, tree);
}
