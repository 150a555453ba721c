//! Acceptance gate. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::collection::vec;
use proptest::test_runner::{Config, TestRunner};

use creamkit::fixtures::TABLE4_HTA;
use creamkit::reporting::{csv_report, json_report, markdown_report, profile_svg};
use creamkit::taxonomy::HepInterval;
use creamkit::{
    adjusted_cfp, aggregate_failure_probability, analyze, default_taxonomy, demand_profile, nominal_cfp, parse_hta,
    screen, serialize_hta, CfAssignment, CognitiveFunction, ControlMode, CpcAssessment, Effect, NodeNumber, Provenance,
    ReportBundle, ReportOptions, Scope, TaskNode, TaskTree, WeightTable,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn nominal_cfps() -> Outcome {
    let t = default_taxonomy();
    let printed = [
        ("O1", 0.001),
        ("O2", 0.007),
        ("O3", 0.007),
        ("I1", 0.02),
        ("I2", 0.01),
        ("I3", 0.01),
        ("P1", 0.01),
        ("P2", 0.01),
        ("E1", 0.003),
        ("E2", 0.003),
        ("E3", 0.0005),
        ("E4", 0.003),
        ("E5", 0.003),
    ];
    let start = Instant::now();
    let got: Vec<f64> = printed.iter().map(|(c, _)| nominal_cfp(&t, c).unwrap()).collect();
    let elapsed = start.elapsed();
    for ((code, want), got) in printed.iter().zip(&got) {
        check(got == want, || format!("{code}: {got} != {want}"))?;
    }
    check(t.failure_types.len() == 13, || "expected 13 failure types".into())?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("13/13 exact in {elapsed:?}"))
}

fn hep_intervals() -> Outcome {
    let t = default_taxonomy();
    let printed = [
        (ControlMode::Strategic, 0.00005, 0.01),
        (ControlMode::Tactical, 0.001, 0.1),
        (ControlMode::Opportunistic, 0.01, 0.5),
        (ControlMode::Scrambled, 0.1, 1.0),
    ];
    for (mode, lower, upper) in printed {
        let got = t.interval(mode);
        check(got == HepInterval { lower, upper }, || format!("{mode}: {got}"))?;
    }
    Ok("4/4 intervals exact".into())
}

fn cpc_catalog() -> Outcome {
    let t = default_taxonomy();
    let printed: [&[(&str, &str)]; 8] = [
        &[("Appropriate", "+"), ("Acceptable", "0"), ("Inappropriate", "-")],
        &[("Less than capacity", "0"), ("At capacity", "0"), ("More than capacity", "-")],
        &[("Advantageous", "+"), ("Compatible", "0"), ("Incompatible", "-")],
        &[("Adequate", "+"), ("Temporarily inadequate", "0"), ("Continually inadequate", "-")],
        &[("Adequate, verified", "0"), ("Satisfactory", "0"), ("Inadequate", "-")],
        &[("Adequate training, experienced", "+"), ("Adequate training, little experience", "0"), ("Inadequate", "-")],
        &[("Very efficient", "+"), ("Efficient", "0"), ("Inefficient", "-"), ("Undesirable", "-")],
        &[
            ("Day, mid-week", "0"),
            ("Day, early or late week", "0"),
            ("Night, mid-week", "+"),
            ("Night, beginning or end of week", "-"),
        ],
    ];
    check(t.cpcs.len() == 8, || format!("{} CPCs", t.cpcs.len()))?;
    for (cpc, states) in t.cpcs.iter().zip(printed) {
        let got: Vec<(&str, &str)> = cpc.states.iter().map(|s| (s.name.as_str(), s.effect.sign())).collect();
        check(got == states, || format!("CPC {}: {got:?}", cpc.id))?;
    }
    // maxima by scanning effects
    let improve = printed.iter().filter(|s| s.iter().any(|(_, e)| *e == "+")).count();
    let reduce = printed.iter().filter(|s| s.iter().any(|(_, e)| *e == "-")).count();
    check((improve, reduce) == (6, 8), || format!("scan gave ({improve},{reduce})"))?;
    check((t.max_improve(), t.max_reduce()) == (6, 8), || "taxonomy maxima differ".into())?;
    Ok("8 CPCs as printed; max improve 6, max reduce 8".into())
}

fn step3_fixture() -> Outcome {
    let printed = [
        1e-2, 1e-2, 7e-2, 1e-2, 7e-2, 3e-2, 1e-2, 5e-4, 7e-2, 1e-2, 5e-4, 1e-2, 1e-2, 3e-3, 7e-2, 1e-2, 3e-3, 3e-3,
        1e-3, 1e-2, 3e-2, 7e-2, 1e-2, 3e-3, 3e-2, 7e-2, 1e-2, 3e-2, 1e-3, 1e-2, 3e-2,
    ];
    let t = default_taxonomy();
    let ctx = CpcAssessment::all_neutral(&t).unwrap();
    let start = Instant::now();
    let tree = parse_hta(TABLE4_HTA).map_err(|e| e.to_string())?;
    let result = analyze(&tree, &ctx, &t).map_err(|e| e.to_string())?;
    let profile = demand_profile(&tree, &Scope::Node("3".parse().unwrap())).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    check(result.per_assignment.len() == 31, || format!("{} assignments", result.per_assignment.len()))?;
    for (i, (r, want)) in result.per_assignment.iter().zip(printed).enumerate() {
        check(r.adjusted_cfp == want, || format!("row {i} ({}): {} != {want}", r.node, r.adjusted_cfp))?;
    }
    let counts = profile.as_array();
    check(counts == [8, 0, 12, 11], || format!("profile {counts:?}"))?;
    let interp = profile.count(CognitiveFunction::Interpretation);
    check(
        CognitiveFunction::ALL
            .into_iter()
            .filter(|f| *f != CognitiveFunction::Interpretation)
            .all(|f| profile.count(f) > interp),
        || "interpretation is not strictly the smallest".into(),
    )?;
    within(elapsed, Duration::from_millis(10))?;
    Ok(format!("31/31 CFPs exact, profile (8,0,12,11), {elapsed:?}"))
}

fn unit_weights() -> Outcome {
    let mut t = default_taxonomy();
    t.weights = WeightTable::unit();
    let contexts = [CpcAssessment::all_best(&t), CpcAssessment::all_worst(&t), CpcAssessment::all_neutral(&t).unwrap()];
    for ctx in &contexts {
        for g in &t.failure_types {
            let p = adjusted_cfp(g.nominal_cfp, g.function, ctx, &t);
            check(p == g.nominal_cfp, || format!("{}: {p} != {}", g.id, g.nominal_cfp))?;
        }
    }
    Ok("13/13 identical under 3 contexts".into())
}

/// P(at least one failure) by enumerating every outcome vector.
fn brute_force_any_failure(ps: &[f64]) -> f64 {
    let n = ps.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut prob = 1.0;
        for (i, p) in ps.iter().enumerate() {
            prob *= if mask & (1 << i) != 0 { *p } else { 1.0 - p };
        }
        total += prob;
    }
    total
}

fn aggregation_oracle() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 200, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let worst = std::cell::Cell::new(0.0f64);
    let cases = std::cell::Cell::new(0usize);
    let res = runner.run(&vec(0.0f64..=1.0, 0..=12), |ps| {
        let diff = (aggregate_failure_probability(&ps) - brute_force_any_failure(&ps)).abs();
        worst.set(worst.get().max(diff));
        cases.set(cases.get() + 1);
        proptest::prop_assert!(diff <= 1e-9, "{ps:?}: diff {diff}");
        Ok(())
    });
    res.map_err(|e| e.to_string())?;
    let (cases, worst) = (cases.get(), worst.get());
    check(cases >= 200, || format!("only {cases} cases"))?;
    Ok(format!("{cases} lists, max |diff| {worst:.2e} <= 1e-9"))
}

fn cocom_monotonicity() -> Outcome {
    let t = default_taxonomy();
    let start = Instant::now();
    let sizes: Vec<usize> = t.cpcs.iter().map(|c| c.states.len()).collect();
    let mut idx = vec![0usize; sizes.len()];
    let mut assessments = 0usize;
    let mut comparisons = 0usize;
    let mut seen_modes = std::collections::BTreeSet::new();
    loop {
        let a = CpcAssessment::from_fn("sweep", &t, {
            let mut k = 0;
            let idx = idx.clone();
            move |c| {
                let s = &c.states[idx[k]];
                k += 1;
                s
            }
        });
        let base = screen(&a, &t).map_err(|e| e.to_string())?;
        check(base.hep_interval == t.interval(base.mode), || "interval mismatch".into())?;
        seen_modes.insert(base.mode);
        assessments += 1;
        for (ci, cpc) in t.cpcs.iter().enumerate() {
            let current: Effect = cpc.states[idx[ci]].effect;
            for s in cpc.states.iter().filter(|s| s.effect > current) {
                let better = screen(&a.with_choice(cpc.id, &s.name), &t).map_err(|e| e.to_string())?;
                comparisons += 1;
                check(better.mode >= base.mode, || {
                    format!("CPC {} -> {} degraded {} to {}", cpc.id, s.name, base.mode, better.mode)
                })?;
            }
        }
        // odometer increment
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    let elapsed = start.elapsed();
    check(assessments == 11_664, || format!("{assessments} assessments"))?;
    check(seen_modes.len() == 4, || format!("modes covered: {seen_modes:?}"))?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("{assessments} assessments, {comparisons} improvements, no degradation, {elapsed:?}"))
}

fn random_trees(n: usize) -> Vec<TaskTree> {
    // small deterministic generator; the proptest suite covers shrinking
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move |m: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % m
    };
    let t = default_taxonomy();
    let mut out = Vec::new();
    for _ in 0..n {
        let mut tree = TaskTree::default();
        let roots = next(4) as u32;
        let first = 1 + next(5) as u32;
        fn grow(node: &mut TaskNode, depth: u32, next: &mut dyn FnMut(u64) -> u64, t: &creamkit::Taxonomy) {
            for _ in 0..next(4) {
                let f = CognitiveFunction::ALL[next(4) as usize];
                let mut a = CfAssignment::new(f);
                if next(2) == 0 {
                    let codes: Vec<_> = t.failure_types_of(f).collect();
                    a.cff = Some(codes[next(codes.len() as u64) as usize].id.clone());
                }
                if next(2) == 0 {
                    a.cfp_override = Some((1 + next(1_000_000)) as f64 / 1_000_000.0);
                }
                node.assignments.push(a);
            }
            if depth < 4 {
                for c in 0..next(4) as u32 {
                    let mut child = TaskNode::new(node.number.child(c + 1), format!("task \"{}\" {depth}", next(1000)));
                    grow(&mut child, depth + 1, next, t);
                    node.children.push(child);
                }
            }
        }
        for r in 0..roots {
            let mut node = TaskNode::new(NodeNumber::new(vec![first + r]).unwrap(), format!("step {r}"));
            grow(&mut node, 1, &mut next, &t);
            tree.roots.push(node);
        }
        out.push(tree);
    }
    out
}

fn parser_roundtrip() -> Outcome {
    let fixtures = [TABLE4_HTA, creamkit::fixtures::SYNTHETIC_FULL_HTA];
    for text in fixtures {
        let tree = parse_hta(text).map_err(|e| e.to_string())?;
        let back = parse_hta(&serialize_hta(&tree)).map_err(|e| e.to_string())?;
        check(back == tree, || "fixture roundtrip mismatch".into())?;
    }
    let step3 = parse_hta(TABLE4_HTA).unwrap();
    check(step3.node_count() == 19, || format!("{} nodes", step3.node_count()))?;
    check(step3.assignment_count() == 31, || format!("{} assignments", step3.assignment_count()))?;
    let trees = random_trees(500);
    let mut nodes = 0;
    for (i, tree) in trees.iter().enumerate() {
        let text = serialize_hta(tree);
        let back = parse_hta(&text).map_err(|e| format!("tree {i}: {e}"))?;
        check(&back == tree, || format!("tree {i} differs after roundtrip"))?;
        nodes += tree.node_count();
    }
    Ok(format!("2 fixtures + 500 random trees ({nodes} nodes); step-3 fixture has 19 nodes, 31 assignments"))
}

fn determinism() -> Outcome {
    let t = default_taxonomy();
    let render = || -> Result<[String; 4], String> {
        let tree = parse_hta(TABLE4_HTA).map_err(|e| e.to_string())?;
        let ctx = CpcAssessment::all_neutral(&t).unwrap();
        let prov = Provenance::new(&t, "fixed").with_input("table4.hta", TABLE4_HTA.as_bytes());
        let b = ReportBundle::build(&tree, &ctx, &t, prov, &ReportOptions::default()).map_err(|e| e.to_string())?;
        Ok([json_report(&b), csv_report(&b), profile_svg(&b), markdown_report(&b)])
    };
    let first = render()?;
    for _ in 0..3 {
        check(render()? == first, || "report output differs between runs".into())?;
    }
    let md = &first[3];
    check(md.contains("Tactical") && md.contains("[0.001, 0.1]"), || "markdown lacks screening line".into())?;
    let bytes: usize = first.iter().map(String::len).sum();
    Ok(format!("4 artifacts, {bytes} bytes, identical over 4 runs"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Nominal CFP catalog", nominal_cfps),
        ("Control-mode HEP intervals", hep_intervals),
        ("CPC catalog", cpc_catalog),
        ("Step-3 golden fixture", step3_fixture),
        ("Unit-weight identity", unit_weights),
        ("Aggregation oracle", aggregation_oracle),
        ("COCOM monotonicity", cocom_monotonicity),
        ("Parser roundtrip", parser_roundtrip),
        ("Determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
