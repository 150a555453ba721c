//! Renders analysis results as `report.json`, `report.csv`, `profile.svg`
//! and `report.md`. All output is a pure function of the bundle, so equal
//! inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{AnalysisError, ReportError};
use crate::extended::{analyze, demand_profile, rank_critical, DemandProfile, ExtendedResult, Scope};
use crate::fmt_prob;
use crate::hta::TaskTree;
use crate::screening::{screen, CpcAssessment, ScreeningResult};
use crate::taxonomy::{CognitiveFunction, Taxonomy};
use crate::whatif::{best_improvement, single_cpc_sweep, sweep_is_flat, WhatIfDelta};

pub const CSV_HEADER: &str = "node,function,cff,nominal,adjusted,source";

// SVG layout, in user units.
pub const SVG_MARGIN_LEFT: u32 = 56;
pub const SVG_MARGIN_RIGHT: u32 = 24;
pub const SVG_MARGIN_TOP: u32 = 48;
pub const SVG_MARGIN_BOTTOM: u32 = 72;
pub const SVG_PLOT_HEIGHT: u32 = 240;
pub const SVG_BAR_WIDTH: u32 = 22;
pub const SVG_BAR_GAP: u32 = 4;
pub const SVG_GROUP_GAP: u32 = 36;
const SVG_COLORS: [&str; 4] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub taxonomy_name: String,
    pub taxonomy_version: String,
    /// Input name to SHA-256 hex digest.
    pub input_hashes: BTreeMap<String, String>,
    pub timestamp: String,
}

impl Provenance {
    pub fn new(taxonomy: &Taxonomy, timestamp: impl Into<String>) -> Self {
        Provenance {
            tool: format!("creamkit {}", env!("CARGO_PKG_VERSION")),
            taxonomy_name: taxonomy.name.clone(),
            taxonomy_version: taxonomy.version.clone(),
            input_hashes: BTreeMap::new(),
            timestamp: timestamp.into(),
        }
    }

    pub fn with_input(mut self, name: impl Into<String>, bytes: &[u8]) -> Self {
        self.input_hashes.insert(name.into(), sha256_hex(bytes));
        self
    }

    fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool: {}", self.tool),
            format!("taxonomy: {} ({})", self.taxonomy_name, self.taxonomy_version),
            format!("timestamp: {}", self.timestamp),
        ];
        for (name, hash) in &self.input_hashes {
            out.push(format!("input {name}: sha256 {hash}"));
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledProfile {
    pub label: String,
    pub profile: DemandProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub title: String,
    pub provenance: Provenance,
    pub context_states: Vec<ContextRow>,
    pub screening: ScreeningResult,
    pub extended: ExtendedResult,
    pub critical: Vec<crate::extended::AssignmentResult>,
    /// One profile per top-level step, then the whole tree.
    pub profiles: Vec<LabeledProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<WhatIfDelta>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRow {
    pub cpc: u32,
    pub name: String,
    pub state: String,
    pub effect: String,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub top_k: usize,
    pub include_sweep: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { top_k: 10, include_sweep: true }
    }
}

impl ReportBundle {
    pub fn build(
        tree: &TaskTree,
        context: &CpcAssessment,
        taxonomy: &Taxonomy,
        provenance: Provenance,
        options: &ReportOptions,
    ) -> Result<Self, AnalysisError> {
        let screening = screen(context, taxonomy)?;
        let extended = analyze(tree, context, taxonomy)?;
        let context_states = context
            .effects(taxonomy)?
            .into_iter()
            .map(|(c, s)| ContextRow {
                cpc: c.id,
                name: c.name.clone(),
                state: s.name.clone(),
                effect: s.effect.sign().to_string(),
            })
            .collect();
        let mut profiles = Vec::new();
        for root in &tree.roots {
            profiles.push(LabeledProfile {
                label: format!("#{} {}", root.number, root.title),
                profile: demand_profile(tree, &Scope::Node(root.number.clone()))?,
            });
        }
        profiles.push(LabeledProfile { label: "All steps".to_string(), profile: extended.profile.clone() });
        let sweep = if options.include_sweep { Some(single_cpc_sweep(tree, context, taxonomy)?) } else { None };
        Ok(ReportBundle {
            title: if tree.metadata.name.is_empty() { "Task analysis".to_string() } else { tree.metadata.name.clone() },
            provenance,
            context_states,
            screening,
            critical: rank_critical(&extended, options.top_k),
            extended,
            profiles,
            sweep,
        })
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Grouped bar chart, one group per profile and one bar per function in
/// fixed order.
pub fn histogram_svg(profiles: &[DemandProfile], labels: &[String]) -> Result<String, ReportError> {
    render_svg(profiles, labels, None)
}

fn render_svg(
    profiles: &[DemandProfile],
    labels: &[String],
    provenance: Option<&Provenance>,
) -> Result<String, ReportError> {
    if profiles.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if profiles.len() != labels.len() {
        return Err(ReportError::LabelMismatch { profiles: profiles.len(), labels: labels.len() });
    }
    let group_width = 4 * SVG_BAR_WIDTH + 3 * SVG_BAR_GAP;
    let plot_width = profiles.len() as u32 * group_width + (profiles.len() as u32 + 1) * SVG_GROUP_GAP;
    let width = SVG_MARGIN_LEFT + plot_width + SVG_MARGIN_RIGHT;
    let height = SVG_MARGIN_TOP + SVG_PLOT_HEIGHT + SVG_MARGIN_BOTTOM;
    let base_y = SVG_MARGIN_TOP + SVG_PLOT_HEIGHT;
    let max = profiles.iter().flat_map(|p| p.as_array()).max().unwrap_or(0);
    let step = (max.div_ceil(5)).max(1);
    let top = (max.div_ceil(step) * step).max(step);
    let scale = SVG_PLOT_HEIGHT as f64 / top as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    if let Some(p) = provenance {
        let _ = writeln!(s, "<desc>{}</desc>", xml_escape(&p.lines().join("; ")));
    }
    let _ = writeln!(s, r#"<text x="{}" y="20" font-size="14">Cognitive demand profile</text>"#, SVG_MARGIN_LEFT);

    // y axis with count ticks
    let _ = writeln!(
        s,
        r#"<line x1="{x}" y1="{t}" x2="{x}" y2="{b}" stroke="black"/>"#,
        x = SVG_MARGIN_LEFT,
        t = SVG_MARGIN_TOP,
        b = base_y
    );
    let _ = writeln!(
        s,
        r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        l = SVG_MARGIN_LEFT,
        r = SVG_MARGIN_LEFT + plot_width,
        b = base_y
    );
    let mut tick = 0;
    while tick <= top {
        let y = base_y as f64 - tick as f64 * scale;
        let _ = writeln!(
            s,
            r#"<line x1="{x1}" y1="{y:.2}" x2="{x2}" y2="{y:.2}" stroke="black"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{tick}</text>"#,
            x1 = SVG_MARGIN_LEFT - 4,
            x2 = SVG_MARGIN_LEFT,
            tx = SVG_MARGIN_LEFT - 8,
            ty = y + 4.0
        );
        tick += step;
    }

    for (g, (profile, label)) in profiles.iter().zip(labels).enumerate() {
        let gx = SVG_MARGIN_LEFT + SVG_GROUP_GAP + g as u32 * (group_width + SVG_GROUP_GAP);
        let _ = writeln!(s, r#"<g class="group" data-label="{}">"#, xml_escape(label));
        for (i, f) in CognitiveFunction::ALL.into_iter().enumerate() {
            let count = profile.count(f);
            let h = count as f64 * scale;
            let x = gx + i as u32 * (SVG_BAR_WIDTH + SVG_BAR_GAP);
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-function="{f}" data-count="{count}" x="{x}" y="{y:.2}" width="{SVG_BAR_WIDTH}" height="{h:.2}" fill="{c}"><title>{f}: {count}</title></rect>"#,
                y = base_y as f64 - h,
                c = SVG_COLORS[i]
            );
            let _ = writeln!(
                s,
                r#"<text x="{cx}" y="{ty:.2}" text-anchor="middle">{count}</text>"#,
                cx = x + SVG_BAR_WIDTH / 2,
                ty = base_y as f64 - h - 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{ty}" text-anchor="middle">{l}</text>"#,
            cx = gx + group_width / 2,
            ty = base_y + 18,
            l = xml_escape(label)
        );
        let _ = writeln!(s, "</g>");
    }

    for (i, f) in CognitiveFunction::ALL.into_iter().enumerate() {
        let x = SVG_MARGIN_LEFT + i as u32 * 110;
        let y = base_y + 44;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{ry}" width="10" height="10" fill="{c}"/><text x="{tx}" y="{y}">{f}</text>"#,
            ry = y - 9,
            c = SVG_COLORS[i],
            tx = x + 14
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Figure for the bundle's profiles, provenance in `<desc>`.
pub fn profile_svg(bundle: &ReportBundle) -> String {
    let profiles: Vec<_> = bundle.profiles.iter().map(|p| p.profile.clone()).collect();
    let labels: Vec<_> = bundle.profiles.iter().map(|p| p.label.clone()).collect();
    render_svg(&profiles, &labels, Some(&bundle.provenance)).expect("bundle always has the whole-tree profile")
}

/// One row per assignment, preceded by `#` provenance lines.
pub fn csv_report(bundle: &ReportBundle) -> String {
    let mut s = String::new();
    for line in bundle.provenance.lines() {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &bundle.extended.per_assignment {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.node,
            r.function,
            r.cff,
            fmt_prob(r.nominal),
            fmt_prob(r.adjusted_cfp),
            r.source
        );
    }
    s
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(flatten)]
    bundle: &'a ReportBundle,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_improvement: Option<&'a WhatIfDelta>,
}

pub fn json_report(bundle: &ReportBundle) -> String {
    let best = bundle.sweep.as_deref().and_then(best_improvement);
    let mut s =
        serde_json::to_string_pretty(&JsonReport { bundle, best_improvement: best }).expect("report serializes");
    s.push('\n');
    s
}

pub fn markdown_report(bundle: &ReportBundle) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Human reliability analysis: {}\n", bundle.title);
    for line in bundle.provenance.lines() {
        let _ = writeln!(s, "- {line}");
    }

    s.push_str("\n## Working context\n\n| CPC | Condition | State | Effect |\n|---|---|---|---|\n");
    for row in &bundle.context_states {
        let _ = writeln!(s, "| {} | {} | {} | {} |", row.cpc, row.name, row.state, row.effect);
    }

    let sc = &bundle.screening;
    let _ = write!(
        s,
        "\n## Control mode\n\nControl mode: **{}**, HEP interval {}\n\nCombined score: {} reduce, {} neutral, {} improve\n",
        sc.mode, sc.hep_interval, sc.score.sum_reduce, sc.score.sum_neutral, sc.score.sum_improve
    );

    let ex = &bundle.extended;
    let _ = write!(
        s,
        "\n## Extended analysis\n\nAssignments: {}\n\nAggregate failure probability: {} ({})\n",
        ex.per_assignment.len(),
        fmt_prob(ex.aggregate_failure_p),
        ex.aggregation_model
    );

    let _ = write!(
        s,
        "\n## Critical assignments (top {})\n\n| Rank | Node | Function | CFF | Nominal | CFP | Source |\n|---|---|---|---|---|---|---|\n",
        bundle.critical.len()
    );
    for (i, r) in bundle.critical.iter().enumerate() {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            i + 1,
            r.node,
            r.function,
            r.cff,
            fmt_prob(r.nominal),
            fmt_prob(r.adjusted_cfp),
            r.source
        );
    }

    s.push_str("\n## Cognitive demand profile\n\n| Scope | Observation | Interpretation | Planning | Execution | Total |\n|---|---|---|---|---|---|\n");
    for p in &bundle.profiles {
        let [o, i, pl, e] = p.profile.as_array();
        let _ = writeln!(s, "| {} | {o} | {i} | {pl} | {e} | {} |", p.label, p.profile.total());
    }

    if let Some(sweep) = &bundle.sweep {
        s.push_str("\n## What-if ranking\n\n");
        if sweep_is_flat(sweep) {
            s.push_str(
                "Notice: every assignment probability is fixed by an override, so no change moves the aggregate; \
                 rows are ranked by control mode only.\n\n",
            );
        }
        s.push_str("| Rank | CPC | From | To | Mode | HEP interval | Aggregate |\n|---|---|---|---|---|---|---|\n");
        for (i, d) in sweep.iter().enumerate() {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} -> {} | {} | {} -> {} |",
                i + 1,
                d.cpc_id,
                d.from_state,
                d.to_state,
                d.mode_before,
                d.mode_after,
                d.interval_after,
                fmt_prob(d.aggregate_before),
                fmt_prob(d.aggregate_after)
            );
        }
        match best_improvement(sweep) {
            Some(d) => {
                let _ = writeln!(
                    s,
                    "\nBest single improvement: CPC {} from {} to {} (aggregate {} -> {}).",
                    d.cpc_id,
                    d.from_state,
                    d.to_state,
                    fmt_prob(d.aggregate_before),
                    fmt_prob(d.aggregate_after)
                );
            }
            None => s.push_str("\nNo single-CPC change strictly lowers the aggregate failure probability.\n"),
        }
    }
    s
}

/// Summary line used by the CLI: `Tactical [0.001, 0.1]`.
pub fn screening_line(result: &ScreeningResult) -> String {
    format!("{} {}", result.mode, result.hep_interval)
}
