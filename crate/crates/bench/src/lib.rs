//! Inputs shared by the benchmarks.

use creamkit::fixtures::{SYNTHETIC_FULL_HTA, TABLE4_HTA};
use creamkit::{default_taxonomy, parse_hta, CpcAssessment, TaskTree, Taxonomy};

pub struct Inputs {
    pub taxonomy: Taxonomy,
    pub table4: TaskTree,
    pub synthetic: TaskTree,
    /// Synthetic tree with every CFP override removed, so weights apply.
    pub computed: TaskTree,
    pub neutral: CpcAssessment,
}

pub fn inputs() -> Inputs {
    let taxonomy = default_taxonomy();
    let synthetic = parse_hta(SYNTHETIC_FULL_HTA).expect("fixture parses");
    let mut computed = synthetic.clone();
    for root in &mut computed.roots {
        strip_overrides(root);
    }
    Inputs {
        neutral: CpcAssessment::all_neutral(&taxonomy).expect("every CPC has a neutral state"),
        table4: parse_hta(TABLE4_HTA).expect("fixture parses"),
        synthetic,
        computed,
        taxonomy,
    }
}

fn strip_overrides(node: &mut creamkit::TaskNode) {
    for a in &mut node.assignments {
        a.cfp_override = None;
    }
    for c in &mut node.children {
        strip_overrides(c);
    }
}

/// Every assessment of the taxonomy, in odometer order.
pub fn all_assessments(taxonomy: &Taxonomy) -> Vec<CpcAssessment> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; taxonomy.cpcs.len()];
    loop {
        let mut it = idx.iter();
        out.push(CpcAssessment::from_fn("sweep", taxonomy, |c| &c.states[*it.next().unwrap()]));
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < taxonomy.cpcs[k].states.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
