//! Shipped fixtures, embedded at compile time.

/// Step 3 of the radiograph interpretation task analysis as printed,
/// 19 nodes and 31 assignments with expert CFPs.
pub const TABLE4_HTA: &str = include_str!("../../../fixtures/table4.hta");

/// Four-step tree; steps 1, 2 and 4 are synthetic placeholders.
pub const SYNTHETIC_FULL_HTA: &str = include_str!("../../../fixtures/synthetic_full.hta");

pub const ALL_NEUTRAL_JSON: &str = include_str!("../../../fixtures/assessments/all_neutral.json");
pub const ALL_BEST_JSON: &str = include_str!("../../../fixtures/assessments/all_best.json");
pub const ALL_REDUCE_JSON: &str = include_str!("../../../fixtures/assessments/all_reduce.json");

/// Built-in taxonomy as a reference document.
pub const DEFAULT_TAXONOMY_JSON: &str = include_str!("../../../data/default_taxonomy.json");
