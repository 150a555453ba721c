//! Basic-mode screening: count CPC effects, look the counts up in the
//! COCOM grid, report the control mode with its HEP interval.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{AssessmentError, ScreeningError};
use crate::taxonomy::{ControlMode, CpcDefinition, CpcState, Effect, HepInterval, Taxonomy};

/// One chosen state per CPC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcAssessment {
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    /// CPC id to state name.
    pub choices: BTreeMap<u32, String>,
}

impl CpcAssessment {
    /// Builds an assessment and checks it against `taxonomy`.
    pub fn new(
        label: impl Into<String>,
        choices: BTreeMap<u32, String>,
        taxonomy: &Taxonomy,
    ) -> Result<Self, AssessmentError> {
        let a = CpcAssessment { label: label.into(), timestamp: None, choices };
        a.check(taxonomy)?;
        Ok(a)
    }

    /// Picks a state for every CPC with `choose`.
    pub fn from_fn<'t>(
        label: impl Into<String>,
        taxonomy: &'t Taxonomy,
        mut choose: impl FnMut(&'t CpcDefinition) -> &'t CpcState,
    ) -> Self {
        let choices = taxonomy.cpcs.iter().map(|c| (c.id, choose(c).name.clone())).collect();
        CpcAssessment { label: label.into(), timestamp: None, choices }
    }

    /// Best available state of every CPC.
    pub fn all_best(taxonomy: &Taxonomy) -> Self {
        Self::from_fn("all best", taxonomy, |c| c.best_state())
    }

    /// Worst available state of every CPC.
    pub fn all_worst(taxonomy: &Taxonomy) -> Self {
        Self::from_fn("all worst", taxonomy, |c| c.worst_state())
    }

    /// First Neutral state of every CPC, or `None` if some CPC has none.
    pub fn all_neutral(taxonomy: &Taxonomy) -> Option<Self> {
        if taxonomy.cpcs.iter().any(|c| c.first_with(Effect::Neutral).is_none()) {
            return None;
        }
        Some(Self::from_fn("all neutral", taxonomy, |c| c.first_with(Effect::Neutral).expect("checked above")))
    }

    pub fn from_json(text: &str) -> Result<Self, AssessmentError> {
        serde_json::from_str(text).map_err(|e| AssessmentError::Malformed(e.to_string()))
    }

    pub fn state_of(&self, cpc: u32) -> Option<&str> {
        self.choices.get(&cpc).map(String::as_str)
    }

    /// Same assessment with one CPC moved to another state.
    pub fn with_choice(&self, cpc: u32, state: &str) -> Self {
        let mut next = self.clone();
        next.choices.insert(cpc, state.to_string());
        next
    }

    /// Effect of each chosen state, in CPC catalog order.
    pub fn effects<'t>(
        &self,
        taxonomy: &'t Taxonomy,
    ) -> Result<Vec<(&'t CpcDefinition, &'t CpcState)>, AssessmentError> {
        self.check(taxonomy)?;
        Ok(taxonomy
            .cpcs
            .iter()
            .map(|c| {
                let name = &self.choices[&c.id];
                (c, c.state(name).expect("checked"))
            })
            .collect())
    }

    pub fn check(&self, taxonomy: &Taxonomy) -> Result<(), AssessmentError> {
        for id in self.choices.keys() {
            if taxonomy.cpc(*id).is_none() {
                return Err(AssessmentError::UnknownCpc(*id));
            }
        }
        for cpc in &taxonomy.cpcs {
            let Some(state) = self.choices.get(&cpc.id) else {
                return Err(AssessmentError::MissingCpc(cpc.id));
            };
            if cpc.state(state).is_none() {
                return Err(AssessmentError::UnknownState { cpc: cpc.id, state: state.clone() });
            }
        }
        Ok(())
    }
}

/// Counts of chosen states by effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CombinedScore {
    pub sum_reduce: usize,
    pub sum_neutral: usize,
    pub sum_improve: usize,
}

impl CombinedScore {
    pub fn new(sum_reduce: usize, sum_neutral: usize, sum_improve: usize) -> Self {
        CombinedScore { sum_reduce, sum_neutral, sum_improve }
    }

    pub fn total(&self) -> usize {
        self.sum_reduce + self.sum_neutral + self.sum_improve
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult {
    pub score: CombinedScore,
    pub mode: ControlMode,
    pub hep_interval: HepInterval,
}

pub fn score_assessment(assessment: &CpcAssessment, taxonomy: &Taxonomy) -> Result<CombinedScore, AssessmentError> {
    let mut score = CombinedScore::new(0, 0, 0);
    for (_, state) in assessment.effects(taxonomy)? {
        match state.effect {
            Effect::Reduce => score.sum_reduce += 1,
            Effect::Neutral => score.sum_neutral += 1,
            Effect::Improve => score.sum_improve += 1,
        }
    }
    Ok(score)
}

pub fn determine_control_mode(score: CombinedScore, taxonomy: &Taxonomy) -> Result<ControlMode, ScreeningError> {
    taxonomy
        .cocom
        .lookup(score.sum_reduce, score.sum_improve)
        .ok_or(ScreeningError::OutOfGrid { reduce: score.sum_reduce, improve: score.sum_improve })
}

pub fn screen(assessment: &CpcAssessment, taxonomy: &Taxonomy) -> Result<ScreeningResult, ScreeningError> {
    let score = score_assessment(assessment, taxonomy)?;
    let mode = determine_control_mode(score, taxonomy)?;
    Ok(ScreeningResult { score, mode, hep_interval: taxonomy.interval(mode) })
}
