//! CREAM human reliability analysis for radiographic film interpretation.
//!
//! * [`taxonomy`]: reference data (failure types, CPC catalog, COCOM grid,
//!   weights) with a built-in default and a JSON loader.
//! * [`hta`]: hierarchical task analyses in the `.hta` text format.
//! * [`screening`]: basic mode, from CPC assessment to control mode and HEP interval.
//! * [`extended`]: extended mode, per-assignment failure probabilities.
//! * [`whatif`]: single-CPC sensitivity sweep.
//! * [`reporting`]: JSON, CSV, SVG and markdown output.

pub mod error;
pub mod extended;
pub mod fixtures;
pub mod hta;
pub mod reporting;
pub mod screening;
pub mod taxonomy;
pub mod whatif;

pub use error::{
    AnalysisError, AssessmentError, HtaParseError, ReportError, ScreeningError, TaxonomyError, ValidationIssue,
};
pub use extended::{
    adjusted_cfp, aggregate_failure_probability, analyze, assign_cff, demand_profile, rank_critical, AssignmentResult,
    CfpSource, DemandProfile, ExtendedResult, Scope,
};
pub use hta::{
    collect_assignments, parse_hta, serialize_hta, validate_hta, CfAssignment, NodeNumber, TaskNode, TaskTree,
    ValidationReport,
};
pub use reporting::{histogram_svg, markdown_report, Provenance, ReportBundle, ReportOptions};
pub use screening::{determine_control_mode, score_assessment, screen, CombinedScore, CpcAssessment, ScreeningResult};
pub use taxonomy::{
    default_taxonomy, load_taxonomy, nominal_cfp, CognitiveFunction, ControlMode, Effect, GftCode, HepInterval,
    Taxonomy, WeightTable,
};
pub use whatif::{best_improvement, single_cpc_sweep, WhatIfDelta};

/// Shortest exact decimal, always with a fractional part (`1.0`, `0.00005`).
pub fn fmt_decimal(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') || s.contains('e') || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

/// Fixed six-significant-digit scientific form, e.g. `7.00000e-02`.
pub fn fmt_prob(x: f64) -> String {
    let s = format!("{x:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}
