//! Hierarchical task analyses annotated with cognitive functions.
//!
//! The `.hta` text format is line oriented, one node per line:
//!
//! ```text
//! # comment
//! #! name: Check the quality of the film
//! 3.1.1 "Open paper folder" cf=Planning:P1@0.01
//! ```
//!
//! Hierarchy comes from the dotted numbers alone; indentation is ignored.
//! Each `cf=<Function>[:<GFT>][@<cfp>]` token adds one assignment, in order.
//! The probability accepts either `.` or `,` as decimal separator.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HtaParseError;
use crate::taxonomy::{CognitiveFunction, GftCode, Taxonomy};

const HEADER: &str = "# creamkit task analysis v1";

/// Dotted path of positive integers, e.g. `3.3.4.2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeNumber(Vec<u32>);

impl NodeNumber {
    pub fn new(components: Vec<u32>) -> Option<Self> {
        if components.is_empty() || components.contains(&0) {
            None
        } else {
            Some(NodeNumber(components))
        }
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("node numbers are non-empty")
    }

    pub fn parent(&self) -> Option<NodeNumber> {
        if self.0.len() > 1 {
            Some(NodeNumber(self.0[..self.0.len() - 1].to_vec()))
        } else {
            None
        }
    }

    pub fn child(&self, n: u32) -> NodeNumber {
        let mut c = self.0.clone();
        c.push(n);
        NodeNumber(c)
    }

    /// True if `self` is `other` or one of its descendants.
    pub fn is_within(&self, other: &NodeNumber) -> bool {
        self.0.starts_with(&other.0)
    }
}

impl fmt::Display for NodeNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for NodeNumber {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad dotted number `{s}`");
        let components = s
            .split('.')
            .map(|part| {
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                part.parse::<u32>().map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        NodeNumber::new(components).ok_or_else(bad)
    }
}

impl Serialize for NodeNumber {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeNumber {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfAssignment {
    pub function: CognitiveFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cff: Option<GftCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfp_override: Option<f64>,
}

impl CfAssignment {
    pub fn new(function: CognitiveFunction) -> Self {
        CfAssignment { function, cff: None, cfp_override: None }
    }

    pub fn with_cff(mut self, code: &str) -> Self {
        self.cff = Some(GftCode::parse(code).expect("valid failure type code"));
        self
    }

    pub fn with_cfp(mut self, p: f64) -> Self {
        self.cfp_override = Some(p);
        self
    }
}

impl fmt::Display for CfAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cf={}", self.function)?;
        if let Some(cff) = &self.cff {
            write!(f, ":{cff}")?;
        }
        if let Some(p) = self.cfp_override {
            write!(f, "@{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskNode {
    pub number: NodeNumber,
    pub title: String,
    #[serde(default)]
    pub assignments: Vec<CfAssignment>,
    #[serde(default)]
    pub children: Vec<TaskNode>,
}

impl TaskNode {
    pub fn new(number: NodeNumber, title: impl Into<String>) -> Self {
        TaskNode { number, title: title.into(), assignments: Vec::new(), children: Vec::new() }
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a TaskNode>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMetadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub version: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskTree {
    #[serde(default)]
    pub metadata: TreeMetadata,
    pub roots: Vec<TaskNode>,
}

impl TaskTree {
    /// All nodes in document (pre-)order.
    pub fn nodes(&self) -> Vec<&TaskNode> {
        let mut out = Vec::new();
        for r in &self.roots {
            r.walk(&mut out);
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    pub fn assignment_count(&self) -> usize {
        self.nodes().iter().map(|n| n.assignments.len()).sum()
    }

    pub fn find(&self, number: &NodeNumber) -> Option<&TaskNode> {
        self.nodes().into_iter().find(|n| &n.number == number)
    }
}

/// Parser diagnostic. `node` holds the node number, or the raw token when
/// the number itself could not be read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub node: String,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} [{}]: {}", self.line, self.node, self.message)
    }
}

struct Parser {
    stack: Vec<TaskNode>,
    roots: Vec<TaskNode>,
    seen: HashSet<NodeNumber>,
    last_root: Option<u32>,
    diagnostics: Vec<ParseDiagnostic>,
    metadata: TreeMetadata,
}

impl Parser {
    fn error(&mut self, line: usize, node: impl fmt::Display, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic { line, node: node.to_string(), message: message.into() });
    }

    fn close_top(&mut self) {
        let node = self.stack.pop().expect("close on empty stack");
        match self.stack.last_mut() {
            Some(parent) => parent.children.push(node),
            None => self.roots.push(node),
        }
    }

    fn directive(&mut self, line: usize, body: &str) {
        let Some((key, value)) = body.split_once(':') else {
            self.error(line, "-", format!("directive `#!{body}` lacks a `key: value` form"));
            return;
        };
        let value = value.trim().to_string();
        match key.trim() {
            "name" => self.metadata.name = value,
            "version" => self.metadata.version = value,
            "note" => self.metadata.notes.push(value),
            other => self.error(line, "-", format!("unknown directive `{other}`")),
        }
    }

    fn node_line(&mut self, line: usize, text: &str) {
        let (number_tok, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let number: NodeNumber = match number_tok.parse() {
            Ok(n) => n,
            Err(msg) => return self.error(line, number_tok, msg),
        };
        let rest = rest.trim_start();
        let (title, rest) = match parse_quoted(rest) {
            Ok(v) => v,
            Err(msg) => return self.error(line, &number, msg),
        };
        let mut ok = true;
        if title.trim().is_empty() {
            self.error(line, &number, "title is empty");
            ok = false;
        }
        let mut assignments = Vec::new();
        for tok in rest.split_whitespace() {
            if tok.starts_with('#') {
                break;
            }
            match parse_cf_token(tok) {
                Ok(a) => assignments.push(a),
                Err(msg) => {
                    self.error(line, &number, msg);
                    ok = false;
                }
            }
        }
        if !ok {
            return;
        }
        self.insert(line, TaskNode { number, title, assignments, children: Vec::new() });
    }

    fn insert(&mut self, line: usize, node: TaskNode) {
        let number = node.number.clone();
        if self.seen.contains(&number) {
            return self.error(line, &number, format!("duplicate node number {number}"));
        }
        match number.parent() {
            None => {
                while !self.stack.is_empty() {
                    self.close_top();
                }
                if let Some(prev) = self.last_root {
                    if number.last() != prev + 1 {
                        self.error(
                            line,
                            &number,
                            format!("numbering gap after {prev}: expected {}, found {number}", prev + 1),
                        );
                    }
                }
                self.last_root = Some(number.last());
            }
            Some(parent) => {
                let Some(pos) = self.stack.iter().position(|n| n.number == parent) else {
                    let msg = if self.seen.contains(&parent) {
                        format!("node {number} appears after the subtree of {parent} was closed")
                    } else {
                        format!("node {number} has no parent {parent}")
                    };
                    return self.error(line, &number, msg);
                };
                while self.stack.len() > pos + 1 {
                    self.close_top();
                }
                let prev = self.stack[pos].children.last().map(|c| c.number.clone());
                let expected = prev.as_ref().map_or(1, |p| p.last() + 1);
                if number.last() != expected {
                    let msg = match prev {
                        Some(p) => {
                            format!("numbering gap after {p}: expected {}, found {number}", parent.child(expected))
                        }
                        None => format!(
                            "numbering gap: first child of {parent} must be {}, found {number}",
                            parent.child(1)
                        ),
                    };
                    self.error(line, &number, msg);
                }
            }
        }
        self.seen.insert(number);
        self.stack.push(node);
    }
}

fn parse_quoted(s: &str) -> Result<(String, &str), String> {
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, '"')) => {}
        _ => return Err("expected a quoted title".to_string()),
    }
    let mut out = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                let rest = &s[i + 1..];
                if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                    return Err("expected whitespace after the closing quote".to_string());
                }
                return Ok((out, rest));
            }
            '\\' => match chars.next() {
                Some((_, '"')) => out.push('"'),
                Some((_, '\\')) => out.push('\\'),
                Some((_, 'n')) => out.push('\n'),
                Some((_, other)) => return Err(format!("unknown escape `\\{other}` in title")),
                None => break,
            },
            c => out.push(c),
        }
    }
    Err("unterminated title".to_string())
}

fn parse_function(token: &str) -> Result<CognitiveFunction, String> {
    // One Observation row of the step-3 analysis is spelled "Observer".
    if token == "Observer" {
        return Ok(CognitiveFunction::Observation);
    }
    token.parse()
}

fn parse_cf_token(tok: &str) -> Result<CfAssignment, String> {
    let Some(body) = tok.strip_prefix("cf=") else {
        return Err(format!("unexpected token `{tok}`"));
    };
    let (head, cfp) = match body.split_once('@') {
        Some((h, p)) => (h, Some(p)),
        None => (body, None),
    };
    let (func, cff) = match head.split_once(':') {
        Some((f, g)) => (f, Some(g)),
        None => (head, None),
    };
    let function = parse_function(func)?;
    let cff = match cff {
        None => None,
        Some(code) => {
            let gft = GftCode::parse(code).ok_or_else(|| format!("unknown failure type token `{code}`"))?;
            let owner = gft.function().expect("parsed code has a function letter");
            if owner != function {
                return Err(format!("GFT {gft} belongs to {owner}, not {function}"));
            }
            Some(gft)
        }
    };
    let cfp_override = match cfp {
        None => None,
        Some(raw) => {
            let p: f64 = raw.replace(',', ".").parse().map_err(|_| format!("bad probability `{raw}`"))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(format!("probability must be in (0,1], found {raw}"));
            }
            Some(p)
        }
    };
    Ok(CfAssignment { function, cff, cfp_override })
}

/// Parses an `.hta` document. Either the whole tree is returned or every
/// diagnostic found.
pub fn parse_hta(text: &str) -> Result<TaskTree, HtaParseError> {
    let mut p = Parser {
        stack: Vec::new(),
        roots: Vec::new(),
        seen: HashSet::new(),
        last_root: None,
        diagnostics: Vec::new(),
        metadata: TreeMetadata::default(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(body) = trimmed.strip_prefix("#!") {
            p.directive(line, body);
        } else if !trimmed.starts_with('#') {
            p.node_line(line, trimmed);
        }
    }
    while !p.stack.is_empty() {
        p.close_top();
    }
    if p.diagnostics.is_empty() {
        Ok(TaskTree { metadata: p.metadata, roots: p.roots })
    } else {
        Err(HtaParseError(p.diagnostics))
    }
}

fn quote(title: &str) -> String {
    let mut out = String::with_capacity(title.len() + 2);
    out.push('"');
    for c in title.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text form; `parse_hta` reads it back to an equal tree.
pub fn serialize_hta(tree: &TaskTree) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    if !tree.metadata.name.is_empty() {
        out.push_str(&format!("#! name: {}\n", tree.metadata.name));
    }
    if !tree.metadata.version.is_empty() {
        out.push_str(&format!("#! version: {}\n", tree.metadata.version));
    }
    for note in &tree.metadata.notes {
        out.push_str(&format!("#! note: {note}\n"));
    }
    for node in tree.nodes() {
        out.push_str(&node.number.to_string());
        out.push(' ');
        out.push_str(&quote(&node.title));
        for a in &node.assignments {
            out.push(' ');
            out.push_str(&a.to_string());
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HtaIssue {
    pub node: String,
    pub message: String,
}

impl fmt::Display for HtaIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.node, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<HtaIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, node: &NodeNumber, message: impl Into<String>) {
        self.issues.push(HtaIssue { node: node.to_string(), message: message.into() });
    }
}

/// Checks structure and every assignment against the taxonomy.
pub fn validate_hta(tree: &TaskTree, taxonomy: &Taxonomy) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();

    for pair in tree.roots.windows(2) {
        if pair[0].number.depth() == 1
            && pair[1].number.depth() == 1
            && pair[1].number.last() != pair[0].number.last() + 1
        {
            report.push(&pair[1].number, format!("numbering gap after {}", pair[0].number));
        }
    }
    for r in &tree.roots {
        if r.number.depth() != 1 {
            report.push(&r.number, "top-level node must have a single-component number");
        }
    }

    for node in tree.nodes() {
        if !seen.insert(&node.number) {
            report.push(&node.number, format!("duplicate node number {}", node.number));
        }
        if node.title.trim().is_empty() {
            report.push(&node.number, "title is empty");
        }
        for (i, child) in node.children.iter().enumerate() {
            let expected = node.number.child(i as u32 + 1);
            if child.number != expected {
                report.push(&child.number, format!("expected number {expected} under {}", node.number));
            }
        }
        for a in &node.assignments {
            if let Some(code) = &a.cff {
                match taxonomy.failure_type(code.as_str()) {
                    Some(g) if g.function != a.function => {
                        report.push(&node.number, format!("GFT {code} belongs to {}", g.function));
                    }
                    Some(_) => {}
                    None => report.push(&node.number, format!("unknown GFT {code}")),
                }
            }
            if let Some(p) = a.cfp_override {
                if !(p > 0.0 && p <= 1.0) {
                    report.push(&node.number, format!("probability must be in (0,1], found {p}"));
                }
            }
        }
    }
    report
}

/// Every assignment of every node in document order.
pub fn collect_assignments(tree: &TaskTree) -> Vec<(&NodeNumber, &CfAssignment)> {
    tree.nodes().into_iter().flat_map(|n| n.assignments.iter().map(move |a| (&n.number, a))).collect()
}
