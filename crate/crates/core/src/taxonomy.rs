//! CREAM reference data: cognitive functions, generic failure types, the
//! common performance condition (CPC) catalog adapted to radiograph
//! interpretation, the COCOM decision grid, control-mode intervals and the
//! CPC weight table used by the extended method.
//!
//! A [`Taxonomy`] is plain data. The built-in dataset comes from
//! [`default_taxonomy`]; alternatives are loaded from JSON with
//! [`load_taxonomy`], which reports every violation it finds rather than
//! stopping at the first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{TaxonomyError, ValidationIssue};

/// Version tag of the built-in dataset.
pub const DEFAULT_TAXONOMY_VERSION: &str = "rt-nde-1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CognitiveFunction {
    Observation,
    Interpretation,
    Planning,
    Execution,
}

impl CognitiveFunction {
    pub const ALL: [CognitiveFunction; 4] = [
        CognitiveFunction::Observation,
        CognitiveFunction::Interpretation,
        CognitiveFunction::Planning,
        CognitiveFunction::Execution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CognitiveFunction::Observation => "Observation",
            CognitiveFunction::Interpretation => "Interpretation",
            CognitiveFunction::Planning => "Planning",
            CognitiveFunction::Execution => "Execution",
        }
    }

    /// Leading letter of the failure-type codes belonging to this function.
    pub fn code_letter(self) -> char {
        match self {
            CognitiveFunction::Observation => 'O',
            CognitiveFunction::Interpretation => 'I',
            CognitiveFunction::Planning => 'P',
            CognitiveFunction::Execution => 'E',
        }
    }

    pub fn from_code_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.code_letter() == c)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CognitiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CognitiveFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown cognitive function `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDef {
    pub id: CognitiveFunction,
    pub display_name: String,
}

/// Generic failure type code such as `O2` or `E5`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GftCode(String);

impl GftCode {
    /// Accepts a function letter (`O`, `I`, `P`, `E`) followed by a positive
    /// decimal index.
    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        let letter = chars.next()?;
        CognitiveFunction::from_code_letter(letter)?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return None;
        }
        Some(GftCode(s.to_string()))
    }

    /// Function implied by the code's letter.
    pub fn function(&self) -> Option<CognitiveFunction> {
        self.0.chars().next().and_then(CognitiveFunction::from_code_letter)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GftCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericFailureType {
    pub id: GftCode,
    pub function: CognitiveFunction,
    pub description: String,
    pub nominal_cfp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Effect {
    Reduce,
    Neutral,
    Improve,
}

impl Effect {
    pub fn sign(self) -> &'static str {
        match self {
            Effect::Improve => "+",
            Effect::Neutral => "0",
            Effect::Reduce => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcState {
    pub name: String,
    pub effect: Effect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcDefinition {
    pub id: u32,
    pub name: String,
    pub description: String,
    pub states: Vec<CpcState>,
}

impl CpcDefinition {
    pub fn state(&self, name: &str) -> Option<&CpcState> {
        self.states.iter().find(|s| s.name == name)
    }

    /// First listed state with the best available effect.
    pub fn best_state(&self) -> &CpcState {
        let best = self.states.iter().map(|s| s.effect).max().unwrap_or(Effect::Neutral);
        self.states.iter().find(|s| s.effect == best).expect("non-empty state list")
    }

    /// First listed state with the worst available effect.
    pub fn worst_state(&self) -> &CpcState {
        let worst = self.states.iter().map(|s| s.effect).min().unwrap_or(Effect::Neutral);
        self.states.iter().find(|s| s.effect == worst).expect("non-empty state list")
    }

    pub fn first_with(&self, effect: Effect) -> Option<&CpcState> {
        self.states.iter().find(|s| s.effect == effect)
    }
}

/// Cognitive control modes, ordered from least to most reliable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ControlMode {
    Scrambled,
    Opportunistic,
    Tactical,
    Strategic,
}

impl ControlMode {
    pub const ALL: [ControlMode; 4] =
        [ControlMode::Scrambled, ControlMode::Opportunistic, ControlMode::Tactical, ControlMode::Strategic];

    pub fn name(self) -> &'static str {
        match self {
            ControlMode::Scrambled => "Scrambled",
            ControlMode::Opportunistic => "Opportunistic",
            ControlMode::Tactical => "Tactical",
            ControlMode::Strategic => "Strategic",
        }
    }
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Human-error-probability interval attached to a control mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HepInterval {
    pub lower: f64,
    pub upper: f64,
}

impl fmt::Display for HepInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", crate::fmt_decimal(self.lower), crate::fmt_decimal(self.upper))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlModeDef {
    pub id: ControlMode,
    pub hep_lower: f64,
    pub hep_upper: f64,
}

/// COCOM decision grid. Row index is the number of CPCs at a Reduce state,
/// column index the number at an Improve state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CocomMap {
    rows: Vec<Vec<ControlMode>>,
}

impl CocomMap {
    pub fn from_rows(rows: Vec<Vec<ControlMode>>) -> Self {
        CocomMap { rows }
    }

    /// Grid where the mode depends only on `improve - reduce` through the
    /// given thresholds: `s <= scrambled_max` is Scrambled, then
    /// Opportunistic up to `opportunistic_max`, Tactical up to
    /// `tactical_max`, Strategic above.
    pub fn from_balance(
        max_reduce: usize,
        max_improve: usize,
        scrambled_max: i64,
        opportunistic_max: i64,
        tactical_max: i64,
    ) -> Self {
        let rows = (0..=max_reduce)
            .map(|r| {
                (0..=max_improve)
                    .map(|i| {
                        let s = i as i64 - r as i64;
                        if s <= scrambled_max {
                            ControlMode::Scrambled
                        } else if s <= opportunistic_max {
                            ControlMode::Opportunistic
                        } else if s <= tactical_max {
                            ControlMode::Tactical
                        } else {
                            ControlMode::Strategic
                        }
                    })
                    .collect()
            })
            .collect();
        CocomMap { rows }
    }

    pub fn rows(&self) -> &[Vec<ControlMode>] {
        &self.rows
    }

    /// Largest Σreduce the grid covers.
    pub fn max_reduce(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Largest Σimprove the grid covers.
    pub fn max_improve(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn lookup(&self, sum_reduce: usize, sum_improve: usize) -> Option<ControlMode> {
        self.rows.get(sum_reduce)?.get(sum_improve).copied()
    }

    fn check(&self, issues: &mut Vec<ValidationIssue>) {
        if self.rows.is_empty() || self.rows[0].is_empty() {
            issues.push(ValidationIssue::new("cocom_grid", "non-total COCOM grid: grid is empty"));
            return;
        }
        let width = self.rows[0].len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                issues.push(ValidationIssue::new(
                    "cocom_grid",
                    format!("non-total COCOM grid: row {r} has {} columns, expected {width}", row.len()),
                ));
                return;
            }
        }
        for r in 0..self.rows.len() {
            for i in 0..width {
                let here = self.rows[r][i];
                if r + 1 < self.rows.len() && self.rows[r + 1][i] > here {
                    issues.push(ValidationIssue::new(
                        "cocom_grid",
                        format!(
                            "non-monotone COCOM grid: ({r},{i}) -> {here} but ({},{i}) -> {}",
                            r + 1,
                            self.rows[r + 1][i]
                        ),
                    ));
                }
                if i + 1 < width && self.rows[r][i + 1] < here {
                    issues.push(ValidationIssue::new(
                        "cocom_grid",
                        format!(
                            "non-monotone COCOM grid: ({r},{i}) -> {here} but ({r},{}) -> {}",
                            i + 1,
                            self.rows[r][i + 1]
                        ),
                    ));
                }
            }
        }
        let worst = self.rows[self.max_reduce()][0];
        if worst != ControlMode::Scrambled {
            issues.push(ValidationIssue::new(
                "cocom_grid",
                format!("COCOM corner ({},0) must be Scrambled, found {worst}", self.max_reduce()),
            ));
        }
        let best = self.rows[0][self.max_improve()];
        if best != ControlMode::Strategic {
            issues.push(ValidationIssue::new(
                "cocom_grid",
                format!("COCOM corner (0,{}) must be Strategic, found {best}", self.max_improve()),
            ));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub cpc: u32,
    pub state: String,
    pub function: CognitiveFunction,
    pub multiplier: f64,
}

/// Multipliers applied to nominal CFPs per (CPC, state, function).
/// Combinations without an entry weigh 1.0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightTable {
    entries: BTreeMap<(u32, String, CognitiveFunction), f64>,
}

impl WeightTable {
    /// Table with no entries: every multiplier is 1.0.
    pub fn unit() -> Self {
        WeightTable::default()
    }

    /// Same multiplier for every function, chosen by state effect.
    pub fn by_effect(cpcs: &[CpcDefinition], improve: f64, neutral: f64, reduce: f64) -> Self {
        let mut table = WeightTable::default();
        for cpc in cpcs {
            for state in &cpc.states {
                let m = match state.effect {
                    Effect::Improve => improve,
                    Effect::Neutral => neutral,
                    Effect::Reduce => reduce,
                };
                for f in CognitiveFunction::ALL {
                    table.set(cpc.id, &state.name, f, m);
                }
            }
        }
        table
    }

    pub fn set(&mut self, cpc: u32, state: &str, function: CognitiveFunction, multiplier: f64) {
        self.entries.insert((cpc, state.to_string(), function), multiplier);
    }

    pub fn get(&self, cpc: u32, state: &str, function: CognitiveFunction) -> f64 {
        self.entries.get(&(cpc, state.to_string(), function)).copied().unwrap_or(1.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = WeightEntry> + '_ {
        self.entries.iter().map(|((cpc, state, function), m)| WeightEntry {
            cpc: *cpc,
            state: state.clone(),
            function: *function,
            multiplier: *m,
        })
    }
}

impl Serialize for WeightTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.entries())
    }
}

impl<'de> Deserialize<'de> for WeightTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let list = Vec::<WeightEntry>::deserialize(deserializer)?;
        let mut table = WeightTable::default();
        for e in list {
            let key = (e.cpc, e.state.clone(), e.function);
            if table.entries.insert(key, e.multiplier).is_some() {
                return Err(serde::de::Error::custom(format!(
                    "duplicate id: weight entry ({}, {}, {}) listed twice",
                    e.cpc, e.state, e.function
                )));
            }
        }
        Ok(table)
    }
}

/// The full CREAM knowledge base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub name: String,
    pub version: String,
    pub functions: Vec<FunctionDef>,
    pub failure_types: Vec<GenericFailureType>,
    pub cpcs: Vec<CpcDefinition>,
    pub control_modes: Vec<ControlModeDef>,
    #[serde(rename = "cocom_grid")]
    pub cocom: CocomMap,
    pub weights: WeightTable,
    pub activity_map: BTreeMap<String, CognitiveFunction>,
}

impl Taxonomy {
    pub fn failure_type(&self, code: &str) -> Option<&GenericFailureType> {
        self.failure_types.iter().find(|g| g.id.as_str() == code)
    }

    /// Failure types of one function, in listing order.
    pub fn failure_types_of(&self, function: CognitiveFunction) -> impl Iterator<Item = &GenericFailureType> {
        self.failure_types.iter().filter(move |g| g.function == function)
    }

    pub fn cpc(&self, id: u32) -> Option<&CpcDefinition> {
        self.cpcs.iter().find(|c| c.id == id)
    }

    pub fn interval(&self, mode: ControlMode) -> HepInterval {
        let def =
            self.control_modes.iter().find(|m| m.id == mode).expect("validated taxonomy defines every control mode");
        HepInterval { lower: def.hep_lower, upper: def.hep_upper }
    }

    /// Number of CPCs that offer at least one Improve state.
    pub fn max_improve(&self) -> usize {
        self.cpcs.iter().filter(|c| c.states.iter().any(|s| s.effect == Effect::Improve)).count()
    }

    /// Number of CPCs that offer at least one Reduce state.
    pub fn max_reduce(&self) -> usize {
        self.cpcs.iter().filter(|c| c.states.iter().any(|s| s.effect == Effect::Reduce)).count()
    }

    /// Every invariant violation, empty when the taxonomy is consistent.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();

        let mut seen_fn = BTreeSet::new();
        for f in &self.functions {
            if !seen_fn.insert(f.id) {
                issues.push(ValidationIssue::new("functions", format!("duplicate id: function {}", f.id)));
            }
            if f.display_name.trim().is_empty() {
                issues.push(ValidationIssue::new("functions", format!("function {} has an empty display name", f.id)));
            }
        }
        for f in CognitiveFunction::ALL {
            if !seen_fn.contains(&f) {
                issues.push(ValidationIssue::new("functions", format!("function {f} is missing")));
            }
        }

        let mut seen_gft = BTreeSet::new();
        for g in &self.failure_types {
            let at = format!("failure_types.{}", g.id);
            if !seen_gft.insert(g.id.clone()) {
                issues.push(ValidationIssue::new(&at, format!("duplicate id: failure type {}", g.id)));
            }
            if GftCode::parse(g.id.as_str()).is_none() {
                issues.push(ValidationIssue::new(&at, format!("malformed failure type code `{}`", g.id)));
            } else if g.id.function() != Some(g.function) {
                issues.push(ValidationIssue::new(
                    &at,
                    format!("failure type {} is listed under {} but its code belongs elsewhere", g.id, g.function),
                ));
            }
            if !(g.nominal_cfp > 0.0 && g.nominal_cfp < 1.0) {
                issues.push(ValidationIssue::new(
                    &at,
                    format!("probability out of range: nominal_cfp {} not in (0,1)", g.nominal_cfp),
                ));
            }
        }
        for f in CognitiveFunction::ALL {
            if self.failure_types_of(f).next().is_none() {
                issues.push(ValidationIssue::new("failure_types", format!("no failure type defined for {f}")));
            }
        }

        let mut seen_cpc = BTreeSet::new();
        for cpc in &self.cpcs {
            let at = format!("cpcs.{}", cpc.id);
            if cpc.id == 0 {
                issues.push(ValidationIssue::new(&at, "CPC ids start at 1"));
            }
            if !seen_cpc.insert(cpc.id) {
                issues.push(ValidationIssue::new(&at, format!("duplicate id: CPC {}", cpc.id)));
            }
            if cpc.name.trim().is_empty() {
                issues.push(ValidationIssue::new(&at, "CPC name is empty"));
            }
            if cpc.states.len() < 2 {
                issues.push(ValidationIssue::new(&at, "a CPC needs at least two states"));
            }
            let mut names = BTreeSet::new();
            for s in &cpc.states {
                if s.name.trim().is_empty() {
                    issues.push(ValidationIssue::new(&at, "state name is empty"));
                }
                if !names.insert(s.name.as_str()) {
                    issues.push(ValidationIssue::new(&at, format!("duplicate id: state `{}`", s.name)));
                }
            }
        }

        let mut seen_mode = BTreeSet::new();
        for m in &self.control_modes {
            let at = format!("control_modes.{}", m.id);
            if !seen_mode.insert(m.id) {
                issues.push(ValidationIssue::new(&at, format!("duplicate id: control mode {}", m.id)));
            }
            let in_range = |p: f64| p > 0.0 && p <= 1.0;
            if !in_range(m.hep_lower) || !in_range(m.hep_upper) {
                issues.push(ValidationIssue::new(&at, "probability out of range: interval bounds must lie in (0,1]"));
            } else if m.hep_lower >= m.hep_upper {
                issues.push(ValidationIssue::new(&at, "interval lower bound must be below the upper bound"));
            }
        }
        for mode in ControlMode::ALL {
            if !seen_mode.contains(&mode) {
                issues.push(ValidationIssue::new("control_modes", format!("control mode {mode} is missing")));
            }
        }

        self.cocom.check(&mut issues);
        if !self.cocom.rows.is_empty()
            && (self.cocom.max_reduce() < self.max_reduce() || self.cocom.max_improve() < self.max_improve())
        {
            issues.push(ValidationIssue::new(
                "cocom_grid",
                format!(
                    "non-total COCOM grid: covers ({},{}) but the CPC catalog reaches ({},{})",
                    self.cocom.max_reduce(),
                    self.cocom.max_improve(),
                    self.max_reduce(),
                    self.max_improve()
                ),
            ));
        }

        for e in self.weights.entries() {
            let at = format!("weights.{}.{}.{}", e.cpc, e.state, e.function);
            if !(e.multiplier > 0.0 && e.multiplier.is_finite()) {
                issues.push(ValidationIssue::new(&at, format!("weight multiplier {} must be positive", e.multiplier)));
            }
            match self.cpc(e.cpc) {
                None => issues.push(ValidationIssue::new(&at, format!("weight refers to unknown CPC {}", e.cpc))),
                Some(cpc) if cpc.state(&e.state).is_none() => issues.push(ValidationIssue::new(
                    &at,
                    format!("weight refers to unknown state `{}` of CPC {}", e.state, e.cpc),
                )),
                Some(_) => {}
            }
        }

        for name in self.activity_map.keys() {
            if name.trim().is_empty() {
                issues.push(ValidationIssue::new("activity_map", "activity name is empty"));
            }
        }

        issues
    }

    /// Canonical pretty-printed JSON document.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("taxonomy serializes");
        s.push('\n');
        s
    }
}

/// Parses and validates a taxonomy document.
pub fn load_taxonomy(source: &str) -> Result<Taxonomy, TaxonomyError> {
    let taxonomy: Taxonomy = serde_json::from_str(source).map_err(|e| TaxonomyError::Malformed(e.to_string()))?;
    let issues = taxonomy.validate();
    if issues.is_empty() {
        Ok(taxonomy)
    } else {
        Err(TaxonomyError::Invalid(issues))
    }
}

/// Nominal probability of a failure type, as tabulated.
pub fn nominal_cfp(taxonomy: &Taxonomy, gft: &str) -> Result<f64, TaxonomyError> {
    taxonomy.failure_type(gft).map(|g| g.nominal_cfp).ok_or_else(|| TaxonomyError::UnknownCode(gft.to_string()))
}

fn gft(id: &str, function: CognitiveFunction, description: &str, nominal_cfp: f64) -> GenericFailureType {
    GenericFailureType { id: GftCode(id.to_string()), function, description: description.to_string(), nominal_cfp }
}

fn cpc(id: u32, name: &str, description: &str, states: &[(&str, Effect)]) -> CpcDefinition {
    CpcDefinition {
        id,
        name: name.to_string(),
        description: description.to_string(),
        states: states.iter().map(|(n, e)| CpcState { name: n.to_string(), effect: *e }).collect(),
    }
}

/// CPC catalog adapted to the radiograph interpretation room.
pub fn default_cpcs() -> Vec<CpcDefinition> {
    use Effect::*;
    vec![
        cpc(
            1,
            "Procedures & technical documentation",
            "History of previous exams, examination protocols, charts, abacus. Available, displayed, up to date \
             (indexes, revisions), manufacturing films (archiving), end of manufacturing report, design plan, \
             welding records.",
            &[("Appropriate", Improve), ("Acceptable", Neutral), ("Inappropriate", Reduce)],
        ),
        cpc(
            2,
            "Number of simultaneous objectives",
            "Number of welds to be interpreted and films per weld, type of problem (additional exposures, \
             meetings), film conformity, diversity of welds, controlled areas and geometries; distribution of \
             the workload over available interpreters.",
            &[("Less than capacity", Neutral), ("At capacity", Neutral), ("More than capacity", Reduce)],
        ),
        cpc(
            3,
            "Local conditions of interpretation",
            "Interpretation room condition (dark, quiet, wall color, 0-10 lux, not used as a checkroom), space \
             to lay out films and fill in reports, room temperature and illuminator fan noise.",
            &[("Advantageous", Improve), ("Compatible", Neutral), ("Incompatible", Reduce)],
        ),
        cpc(
            4,
            "Available time",
            "Number of radiographs to interpret, phase of the shutdown, need to catch up with delays on the \
             critical path, pressure to communicate results quickly, fatigue.",
            &[("Adequate", Improve), ("Temporarily inadequate", Neutral), ("Continually inadequate", Reduce)],
        ),
        cpc(
            5,
            "Quality of the hardware",
            "Collective equipment (illuminators with foot pedal, densitometers, illuminator type) and individual \
             equipment (gloves, ruler, pencil, reading table).",
            &[("Adequate, verified", Neutral), ("Satisfactory", Neutral), ("Inadequate", Reduce)],
        ),
        cpc(
            6,
            "Training and experience",
            "Level of knowledge in the broadest sense, years of experience, frequency of skill maintenance, \
             duration of companionship.",
            &[
                ("Adequate training, experienced", Improve),
                ("Adequate training, little experience", Neutral),
                ("Inadequate", Reduce),
            ],
        ),
        cpc(
            7,
            "Effectiveness of collaboration / communication",
            "Relations between plant, engineering, technical assistants and the provider; negotiations on \
             position and exposure; collaboration or competition between teams; clients present in the \
             interpretation room; independence of judgement.",
            &[("Very efficient", Improve), ("Efficient", Neutral), ("Inefficient", Reduce), ("Undesirable", Reduce)],
        ),
        cpc(
            8,
            "Time of day / period of the week",
            "Day is 8am to 8pm, mid-week is Tuesday to Thursday. End of night is calm with less co-activity but \
             more fatigue; beginning and end of week carry long-distance driving and workload accumulation.",
            &[
                ("Day, mid-week", Neutral),
                ("Day, early or late week", Neutral),
                ("Night, mid-week", Improve),
                ("Night, beginning or end of week", Reduce),
            ],
        ),
    ]
}

/// Default grouping of the fifteen elementary cognitive activities.
pub fn default_activity_map() -> BTreeMap<String, CognitiveFunction> {
    use CognitiveFunction::*;
    [
        ("coordinate", Planning),
        ("communicate", Execution),
        ("compare", Interpretation),
        ("diagnose", Interpretation),
        ("evaluate", Interpretation),
        ("execute", Execution),
        ("identify", Observation),
        ("maintain", Execution),
        ("monitor", Observation),
        ("observe", Observation),
        ("plan", Planning),
        ("record", Execution),
        ("regulate", Execution),
        ("scan", Observation),
        ("verify", Execution),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Built-in dataset for radiograph interpretation.
pub fn default_taxonomy() -> Taxonomy {
    use CognitiveFunction::*;
    let cpcs = default_cpcs();
    let weights = WeightTable::by_effect(&cpcs, 0.5, 1.0, 5.0);
    let max_reduce = cpcs.len();
    Taxonomy {
        name: "CREAM adapted to RT-NDE film interpretation".to_string(),
        version: DEFAULT_TAXONOMY_VERSION.to_string(),
        functions: CognitiveFunction::ALL
            .into_iter()
            .map(|id| FunctionDef { id, display_name: id.name().to_string() })
            .collect(),
        failure_types: vec![
            gft("O1", Observation, "Wrong object observed", 0.001),
            gft("O2", Observation, "Wrong identification", 0.007),
            gft("O3", Observation, "Observation not made", 0.007),
            gft("I1", Interpretation, "Faulty diagnosis", 0.02),
            gft("I2", Interpretation, "Decision error", 0.01),
            gft("I3", Interpretation, "Delayed interpretation", 0.01),
            gft("P1", Planning, "Priority error", 0.01),
            gft("P2", Planning, "Inadequate plan", 0.01),
            gft("E1", Execution, "Action of wrong type", 0.003),
            gft("E2", Execution, "Action at wrong time", 0.003),
            gft("E3", Execution, "Action on wrong object", 0.0005),
            gft("E4", Execution, "Action out of sequence", 0.003),
            gft("E5", Execution, "Missed action", 0.003),
        ],
        control_modes: vec![
            ControlModeDef { id: ControlMode::Strategic, hep_lower: 0.00005, hep_upper: 0.01 },
            ControlModeDef { id: ControlMode::Tactical, hep_lower: 0.001, hep_upper: 0.1 },
            ControlModeDef { id: ControlMode::Opportunistic, hep_lower: 0.01, hep_upper: 0.5 },
            ControlModeDef { id: ControlMode::Scrambled, hep_lower: 0.1, hep_upper: 1.0 },
        ],
        cocom: CocomMap::from_balance(max_reduce, 6, -6, -2, 2),
        weights,
        activity_map: default_activity_map(),
        cpcs,
    }
}
