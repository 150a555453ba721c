//! Extended-mode analysis over a task tree: which cognitive functions the
//! work draws on, the most likely failure of each assignment and its
//! probability under the working context.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::hta::{collect_assignments, validate_hta, CfAssignment, NodeNumber, TaskTree};
use crate::screening::{score_assessment, CpcAssessment};
use crate::taxonomy::{CognitiveFunction, GftCode, Taxonomy};

/// Lower clamp on computed probabilities.
pub const CFP_FLOOR: f64 = 1e-6;
/// Upper clamp on computed probabilities.
pub const CFP_CEILING: f64 = 1.0;

pub const AGGREGATION_MODEL: &str = "independent assignments: P = 1 - prod(1 - cfp_i)";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    WholeTree,
    Node(NodeNumber),
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::WholeTree => f.write_str("all"),
            Scope::Node(n) => write!(f, "{n}"),
        }
    }
}

/// Number of assignments per cognitive function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandProfile {
    pub counts: BTreeMap<CognitiveFunction, usize>,
    pub scope: Scope,
}

impl DemandProfile {
    pub fn empty(scope: Scope) -> Self {
        DemandProfile { counts: CognitiveFunction::ALL.into_iter().map(|f| (f, 0)).collect(), scope }
    }

    pub fn from_counts(scope: Scope, counts: [usize; 4]) -> Self {
        DemandProfile { counts: CognitiveFunction::ALL.into_iter().zip(counts).collect(), scope }
    }

    pub fn count(&self, f: CognitiveFunction) -> usize {
        self.counts.get(&f).copied().unwrap_or(0)
    }

    /// Counts in fixed function order.
    pub fn as_array(&self) -> [usize; 4] {
        CognitiveFunction::ALL.map(|f| self.count(f))
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn demand_profile(tree: &TaskTree, scope: &Scope) -> Result<DemandProfile, AnalysisError> {
    if let Scope::Node(n) = scope {
        if tree.find(n).is_none() {
            return Err(AnalysisError::UnknownNode(n.to_string()));
        }
    }
    let mut profile = DemandProfile::empty(scope.clone());
    for (number, a) in collect_assignments(tree) {
        let in_scope = match scope {
            Scope::WholeTree => true,
            Scope::Node(n) => number.is_within(n),
        };
        if in_scope {
            *profile.counts.entry(a.function).or_default() += 1;
        }
    }
    Ok(profile)
}

/// Product of the weights of every chosen CPC state for `function`.
pub fn weight_product(function: CognitiveFunction, context: &CpcAssessment, taxonomy: &Taxonomy) -> f64 {
    taxonomy
        .cpcs
        .iter()
        .filter_map(|c| context.state_of(c.id).map(|s| taxonomy.weights.get(c.id, s, function)))
        .product()
}

pub fn adjusted_cfp(nominal: f64, function: CognitiveFunction, context: &CpcAssessment, taxonomy: &Taxonomy) -> f64 {
    (nominal * weight_product(function, context, taxonomy)).clamp(CFP_FLOOR, CFP_CEILING)
}

/// The analyst's failure type if given, else the function's failure type
/// with the largest adjusted CFP (first listed wins ties).
pub fn assign_cff(assignment: &CfAssignment, taxonomy: &Taxonomy, context: &CpcAssessment) -> GftCode {
    if let Some(code) = &assignment.cff {
        return code.clone();
    }
    let weight = weight_product(assignment.function, context, taxonomy);
    let mut best: Option<(&GftCode, f64)> = None;
    for g in taxonomy.failure_types_of(assignment.function) {
        let p = (g.nominal_cfp * weight).clamp(CFP_FLOOR, CFP_CEILING);
        if best.is_none_or(|(_, b)| p > b) {
            best = Some((&g.id, p));
        }
    }
    best.expect("validated taxonomy has failure types for every function").0.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CfpSource {
    Override,
    Computed,
}

impl fmt::Display for CfpSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CfpSource::Override => "override",
            CfpSource::Computed => "computed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult {
    pub node: NodeNumber,
    pub function: CognitiveFunction,
    pub cff: GftCode,
    pub nominal: f64,
    pub adjusted_cfp: f64,
    pub source: CfpSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedResult {
    pub per_assignment: Vec<AssignmentResult>,
    pub per_node_worst: BTreeMap<NodeNumber, AssignmentResult>,
    pub profile: DemandProfile,
    pub aggregate_failure_p: f64,
    pub aggregation_model: String,
    pub context: CpcAssessment,
}

/// Runs the extended method over every assignment of `tree`.
pub fn analyze(tree: &TaskTree, context: &CpcAssessment, taxonomy: &Taxonomy) -> Result<ExtendedResult, AnalysisError> {
    score_assessment(context, taxonomy)?;
    let report = validate_hta(tree, taxonomy);
    if !report.is_valid() {
        return Err(AnalysisError::InvalidTree(report.issues));
    }

    let per_assignment: Vec<AssignmentResult> = collect_assignments(tree)
        .into_iter()
        .map(|(node, a)| {
            let cff = assign_cff(a, taxonomy, context);
            let nominal =
                taxonomy.failure_type(cff.as_str()).expect("validated tree refers to known failure types").nominal_cfp;
            let (adjusted_cfp, source) = match a.cfp_override {
                Some(p) => (p.clamp(CFP_FLOOR, CFP_CEILING), CfpSource::Override),
                None => (adjusted_cfp(nominal, a.function, context, taxonomy), CfpSource::Computed),
            };
            AssignmentResult { node: node.clone(), function: a.function, cff, nominal, adjusted_cfp, source }
        })
        .collect();

    let mut per_node_worst: BTreeMap<NodeNumber, AssignmentResult> = BTreeMap::new();
    for r in &per_assignment {
        match per_node_worst.get(&r.node) {
            Some(cur) if cur.adjusted_cfp >= r.adjusted_cfp => {}
            _ => {
                per_node_worst.insert(r.node.clone(), r.clone());
            }
        }
    }

    let cfps: Vec<f64> = per_assignment.iter().map(|r| r.adjusted_cfp).collect();
    Ok(ExtendedResult {
        profile: demand_profile(tree, &Scope::WholeTree)?,
        aggregate_failure_p: aggregate_failure_probability(&cfps),
        aggregation_model: AGGREGATION_MODEL.to_string(),
        per_assignment,
        per_node_worst,
        context: context.clone(),
    })
}

/// Probability that at least one of independent events occurs.
pub fn aggregate_failure_probability(cfps: &[f64]) -> f64 {
    // 1 - prod(1 - p) evaluated in log space to keep small totals exact
    let log_survival: f64 = cfps.iter().map(|p| (-p).ln_1p()).sum();
    (-log_survival.exp_m1()).clamp(0.0, 1.0)
}

/// Top `k` assignments by adjusted CFP, ties in document order.
pub fn rank_critical(result: &ExtendedResult, k: usize) -> Vec<AssignmentResult> {
    let mut ranked = result.per_assignment.clone();
    ranked.sort_by(|a, b| b.adjusted_cfp.total_cmp(&a.adjusted_cfp));
    ranked.truncate(k);
    ranked
}
