use creamkit::fixtures::{SYNTHETIC_FULL_HTA, TABLE4_HTA};
use creamkit::reporting::{csv_report, json_report, profile_svg, CSV_HEADER, SVG_PLOT_HEIGHT};
use creamkit::{
    default_taxonomy, demand_profile, histogram_svg, parse_hta, CpcAssessment, DemandProfile, Provenance, ReportBundle,
    ReportOptions, Scope, TaskTree,
};

fn bundle(text: &str, label: &str) -> ReportBundle {
    let t = default_taxonomy();
    let tree = parse_hta(text).unwrap();
    let prov = Provenance::new(&t, "2019-05-14T02:00:00Z").with_input("fixture.hta", text.as_bytes());
    let ctx = CpcAssessment::all_neutral(&t).unwrap();
    let mut b = ReportBundle::build(&tree, &ctx, &t, prov, &ReportOptions::default()).unwrap();
    b.title = label.to_string();
    b
}

/// Bars of an SVG as (group label, function, data-count, height).
fn bars(svg: &str) -> Vec<(String, String, usize, f64)> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    let mut out = Vec::new();
    for g in doc.descendants().filter(|n| n.attribute("class") == Some("group")) {
        let label = g.attribute("data-label").unwrap().to_string();
        for bar in g.children().filter(|n| n.attribute("class") == Some("bar")) {
            out.push((
                label.clone(),
                bar.attribute("data-function").unwrap().to_string(),
                bar.attribute("data-count").unwrap().parse().unwrap(),
                bar.attribute("height").unwrap().parse().unwrap(),
            ));
        }
    }
    out
}

#[test]
fn csv_parses_with_constant_header_and_one_row_per_assignment() {
    for text in [TABLE4_HTA, SYNTHETIC_FULL_HTA] {
        let b = bundle(text, "x");
        let csv_text = csv_report(&b);
        let body: String = csv_text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
        assert_eq!(header.join(","), CSV_HEADER);
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), parse_hta(text).unwrap().assignment_count());
        for (row, r) in rows.iter().zip(&b.extended.per_assignment) {
            assert_eq!(&row[0], r.node.to_string());
            assert_eq!(row[4].parse::<f64>().unwrap(), r.adjusted_cfp);
        }
    }
}

#[test]
fn step3_svg_is_well_formed_and_planning_is_tallest() {
    let b = bundle(TABLE4_HTA, "x");
    let svg = profile_svg(&b);
    let bars = bars(&svg);
    // step 3 group, then the whole-tree group
    assert_eq!(bars.len(), 8);
    let step3: Vec<_> = bars.iter().filter(|b| b.0.starts_with("#3 ")).collect();
    let counts: Vec<(&str, usize)> = step3.iter().map(|b| (b.1.as_str(), b.2)).collect();
    assert_eq!(counts, [("Observation", 8), ("Interpretation", 0), ("Planning", 12), ("Execution", 11)]);
    let tallest = step3.iter().max_by(|a, b| a.3.total_cmp(&b.3)).unwrap();
    assert_eq!(tallest.1, "Planning");
    assert!(tallest.3 <= SVG_PLOT_HEIGHT as f64);
    // heights proportional to counts
    for b in &step3 {
        assert!((b.3 - tallest.3 * b.2 as f64 / 12.0).abs() < 0.01, "{b:?}");
    }
}

#[test]
fn two_profiles_make_two_groups_in_order() {
    let tree = parse_hta(SYNTHETIC_FULL_HTA).unwrap();
    let p = |n: &str| demand_profile(&tree, &Scope::Node(n.parse().unwrap())).unwrap();
    let svg = histogram_svg(&[p("1"), p("4")], &["first".into(), "fourth & last".into()]).unwrap();
    let bars = bars(&svg);
    let labels: Vec<&str> = bars.iter().map(|b| b.0.as_str()).collect();
    assert_eq!(labels, ["first"; 4].into_iter().chain(["fourth & last"; 4]).collect::<Vec<_>>());
    let counts: Vec<usize> = bars.iter().map(|b| b.2).collect();
    assert_eq!(counts[..4], p("1").as_array());
    assert_eq!(counts[4..], p("4").as_array());
}

#[test]
fn empty_profile_still_renders() {
    let empty = DemandProfile::empty(Scope::WholeTree);
    let svg = histogram_svg(&[empty], &["none".into()]).unwrap();
    assert!(bars(&svg).iter().all(|b| b.2 == 0 && b.3 == 0.0));
    assert!(histogram_svg(&[], &[]).is_err());
}

#[test]
fn provenance_in_svg_desc_is_escaped() {
    let mut b = bundle(TABLE4_HTA, "x");
    b.provenance.timestamp = "<late> & \"odd\"".into();
    let svg = profile_svg(&b);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let desc = doc.descendants().find(|n| n.has_tag_name("desc")).unwrap();
    assert!(desc.text().unwrap().contains("<late> & \"odd\""));
}

#[test]
fn json_report_roundtrips_into_bundle() {
    let b = bundle(TABLE4_HTA, "x");
    let back: ReportBundle = serde_json::from_str(&json_report(&b)).unwrap();
    assert_eq!(back, b);
    let empty = ReportBundle::build(
        &TaskTree::default(),
        &CpcAssessment::all_best(&default_taxonomy()),
        &default_taxonomy(),
        Provenance::new(&default_taxonomy(), "t"),
        &ReportOptions::default(),
    )
    .unwrap();
    assert_eq!(empty.extended.aggregate_failure_p, 0.0);
    assert_eq!(serde_json::from_str::<ReportBundle>(&json_report(&empty)).unwrap(), empty);
}
