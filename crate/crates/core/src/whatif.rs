//! Single-CPC sensitivity sweep: move one CPC to each of its other states
//! and see how the control mode and aggregate failure probability react.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::extended::analyze;
use crate::hta::TaskTree;
use crate::screening::{screen, CombinedScore, CpcAssessment};
use crate::taxonomy::{ControlMode, HepInterval, Taxonomy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfDelta {
    pub cpc_id: u32,
    pub from_state: String,
    pub to_state: String,
    pub score_before: CombinedScore,
    pub score_after: CombinedScore,
    pub mode_before: ControlMode,
    pub mode_after: ControlMode,
    pub aggregate_before: f64,
    pub aggregate_after: f64,
    pub interval_before: HepInterval,
    pub interval_after: HepInterval,
}

impl WhatIfDelta {
    pub fn improves_aggregate(&self) -> bool {
        self.aggregate_after < self.aggregate_before
    }
}

/// One delta per (CPC, alternative state), sorted by `aggregate_after`
/// ascending, then better mode first, then CPC id and state order.
pub fn single_cpc_sweep(
    tree: &TaskTree,
    baseline: &CpcAssessment,
    taxonomy: &Taxonomy,
) -> Result<Vec<WhatIfDelta>, AnalysisError> {
    let base_screen = screen(baseline, taxonomy)?;
    let base_analysis = analyze(tree, baseline, taxonomy)?;

    let mut deltas = Vec::new();
    for cpc in &taxonomy.cpcs {
        let from = baseline.state_of(cpc.id).expect("baseline validated by screen");
        for (order, state) in cpc.states.iter().enumerate() {
            if state.name == from {
                continue;
            }
            let variant = baseline.with_choice(cpc.id, &state.name);
            let s = screen(&variant, taxonomy)?;
            let a = analyze(tree, &variant, taxonomy)?;
            deltas.push((
                order,
                WhatIfDelta {
                    cpc_id: cpc.id,
                    from_state: from.to_string(),
                    to_state: state.name.clone(),
                    score_before: base_screen.score,
                    score_after: s.score,
                    mode_before: base_screen.mode,
                    mode_after: s.mode,
                    aggregate_before: base_analysis.aggregate_failure_p,
                    aggregate_after: a.aggregate_failure_p,
                    interval_before: base_screen.hep_interval,
                    interval_after: s.hep_interval,
                },
            ));
        }
    }
    deltas.sort_by(|(oa, a), (ob, b)| {
        a.aggregate_after
            .total_cmp(&b.aggregate_after)
            .then(b.mode_after.cmp(&a.mode_after))
            .then(a.cpc_id.cmp(&b.cpc_id))
            .then(oa.cmp(ob))
    });
    Ok(deltas.into_iter().map(|(_, d)| d).collect())
}

/// Delta with the lowest `aggregate_after` among strict improvements;
/// ties go to the lowest CPC id.
pub fn best_improvement(sweep: &[WhatIfDelta]) -> Option<&WhatIfDelta> {
    sweep.iter().filter(|d| d.improves_aggregate()).min_by(|a, b| {
        match a.aggregate_after.total_cmp(&b.aggregate_after) {
            Ordering::Equal => a.cpc_id.cmp(&b.cpc_id),
            o => o,
        }
    })
}

/// True when no delta moves the aggregate, as happens when every
/// assignment carries an override.
pub fn sweep_is_flat(sweep: &[WhatIfDelta]) -> bool {
    sweep.iter().all(|d| d.aggregate_after == d.aggregate_before)
}
