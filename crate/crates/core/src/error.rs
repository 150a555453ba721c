use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hta::{HtaIssue, ParseDiagnostic};

/// One violated taxonomy invariant. `at` is a dotted path into the document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub at: String,
    pub message: String,
}

impl ValidationIssue {
    pub fn new(at: &str, message: impl Into<String>) -> Self {
        ValidationIssue { at: at.to_string(), message: message.into() }
    }
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.message)
    }
}

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("malformed taxonomy document: {0}")]
    Malformed(String),
    #[error("invalid taxonomy: {}", join(.0))]
    Invalid(Vec<ValidationIssue>),
    #[error("unknown failure type code `{0}`")]
    UnknownCode(String),
}

#[derive(Debug, Error)]
#[error("{}", join(.0))]
pub struct HtaParseError(pub Vec<ParseDiagnostic>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssessmentError {
    #[error("assessment does not choose a state for CPC {0}")]
    MissingCpc(u32),
    #[error("assessment refers to unknown CPC {0}")]
    UnknownCpc(u32),
    #[error("CPC {cpc} has no state `{state}`")]
    UnknownState { cpc: u32, state: String },
    #[error("malformed assessment: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScreeningError {
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error("score (reduce {reduce}, improve {improve}) lies outside the COCOM grid")]
    OutOfGrid { reduce: usize, improve: usize },
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Screening(#[from] ScreeningError),
    #[error("task analysis is not valid against the taxonomy: {}", join(.0))]
    InvalidTree(Vec<HtaIssue>),
    #[error("no node numbered {0} in the task analysis")]
    UnknownNode(String),
}

impl From<AssessmentError> for AnalysisError {
    fn from(e: AssessmentError) -> Self {
        AnalysisError::Screening(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("histogram needs at least one profile")]
    EmptyInput,
    #[error("got {profiles} profiles but {labels} labels")]
    LabelMismatch { profiles: usize, labels: usize },
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
