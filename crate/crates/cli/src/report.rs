//! Structured records emitted by each command, and their text rendering.
//!
//! Records carry rationals as `p/q` strings and feature sets as sorted 1-based
//! ids; text mode renders the same values, adding a decimal approximation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fxp_core::rational;
use serde::{Deserialize, Serialize};

/// `{x1,x3}` from 1-based ids.
pub fn name_set(ids: &[usize], names: &[String]) -> String {
    let parts: Vec<&str> = ids.iter().map(|&i| names[i - 1].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

/// `p/q (decimal)` for rationals; anything else (class names) verbatim.
pub fn pretty(value: &str) -> String {
    rational::parse(value).map_or_else(|| value.to_string(), |r| rational::pretty(&r))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub current: Vec<usize>,
    pub dropped: usize,
    /// Node ids of the path the oracle found, if any.
    pub path: Option<Vec<i64>>,
    pub result: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub kind: String,
    pub features: Vec<usize>,
    pub similarity: String,
    pub order: Vec<usize>,
    pub oracle_calls: usize,
    pub fingerprint: String,
    pub trace: Vec<TraceRow>,
}

impl ExplanationRecord {
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.kind, name_set(&self.features, names));
        let _ = writeln!(s, "similarity: {}", self.similarity);
        let order: Vec<String> = self.order.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "order: {}", order.join(","));
        let _ = writeln!(s, "trace:");
        for row in &self.trace {
            let verdict = if row.current == row.result { "keep" } else { "drop" };
            let _ = write!(s, "  {:<16} try {:<6} {}", name_set(&row.current, names), names[row.dropped - 1], verdict);
            if let Some(path) = &row.path {
                let nodes: Vec<String> = path.iter().map(ToString::to_string).collect();
                let _ = write!(s, "  path ⟨{}⟩", nodes.join(","));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "oracle calls: {}", self.oracle_calls);
        s
    }
}

/// Shared by `enumerate` and `relevancy`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationRecord {
    pub axps: Vec<Vec<usize>>,
    pub cxps: Vec<Vec<usize>>,
    pub relevant: Vec<usize>,
    pub necessary: Vec<usize>,
    pub exhausted: bool,
}

impl EnumerationRecord {
    pub fn render(&self, names: &[String], with_irrelevant: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "AXps ({}):", self.axps.len());
        for x in &self.axps {
            let _ = writeln!(s, "  {}", name_set(x, names));
        }
        let _ = writeln!(s, "CXps ({}):", self.cxps.len());
        for y in &self.cxps {
            let _ = writeln!(s, "  {}", name_set(y, names));
        }
        let _ = writeln!(s, "relevant: {}", name_set(&self.relevant, names));
        if with_irrelevant {
            let irrelevant: Vec<usize> = (1..=names.len()).filter(|i| !self.relevant.contains(i)).collect();
            let _ = writeln!(s, "irrelevant: {}", name_set(&irrelevant, names));
        }
        let _ = writeln!(s, "necessary: {}", name_set(&self.necessary, names));
        let _ = writeln!(s, "exhausted: {}", if self.exhausted { "yes" } else { "no" });
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub feature: String,
    pub id: usize,
    pub score: String,
    pub relevant: bool,
    pub flag: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub feature: String,
    pub subset: Vec<usize>,
    pub delta: String,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapRecord {
    pub scores: BTreeMap<String, String>,
    pub baseline: String,
    /// τ(v), the value the scores are explaining away from the baseline.
    pub output: String,
    pub efficiency_check: String,
    pub audit: Vec<AuditEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger: Option<Vec<LedgerRow>>,
}

impl ShapRecord {
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        let width = names.iter().map(String::len).max().unwrap_or(0);
        let _ = writeln!(s, "SHAP scores:");
        for name in names {
            let _ = writeln!(s, "  {:<width$}  {}", name, pretty(&self.scores[name]));
        }
        let _ = writeln!(s, "baseline: {}", pretty(&self.baseline));
        let _ = writeln!(s, "output: {}", pretty(&self.output));
        let _ = writeln!(s, "efficiency: {}", self.efficiency_check);
        if let Some(check) = &self.cross_check {
            let _ = writeln!(s, "brute-force cross-check: {check}");
        }
        if !self.audit.is_empty() {
            let _ = writeln!(s, "audit:");
            for e in &self.audit {
                let relevance = if e.relevant { "relevant" } else { "irrelevant" };
                let _ = writeln!(s, "  {:<width$}  {:<10}  {}", e.feature, relevance, e.flag);
            }
        }
        if let Some(ledger) = &self.ledger {
            let _ = writeln!(s, "ledger:");
            for row in ledger {
                let _ = writeln!(
                    s,
                    "  {:<width$}  S={:<12} Δ={:<24} w={}",
                    row.feature,
                    name_set(&row.subset, names),
                    pretty(&row.delta),
                    pretty(&row.weight)
                );
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub similarity: String,
    pub relevancy_similarity: String,
    pub baseline: String,
    pub efficiency_check: String,
    pub axps: Vec<Vec<usize>>,
    pub findings: Vec<AuditEntry>,
}

impl AuditRecord {
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        let width = names.iter().map(String::len).max().unwrap_or(0);
        let _ = writeln!(s, "attribution similarity: {}", self.similarity);
        let _ = writeln!(s, "relevancy similarity: {}", self.relevancy_similarity);
        let axps: Vec<String> = self.axps.iter().map(|x| name_set(x, names)).collect();
        let _ = writeln!(s, "AXps: {}", axps.join(" "));
        let _ = writeln!(s, "baseline: {}", pretty(&self.baseline));
        let _ = writeln!(s, "efficiency: {}", self.efficiency_check);
        for e in &self.findings {
            let relevance = if e.relevant { "relevant" } else { "irrelevant" };
            let _ = writeln!(s, "  {:<width$}  {:<24}  {:<10}  {}", e.feature, pretty(&e.score), relevance, e.flag);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralRow {
    pub feature: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InflateRecord {
    pub axp: Vec<usize>,
    pub literals: Vec<LiteralRow>,
    pub output: String,
    pub removable: Vec<usize>,
    pub rule: String,
}

impl InflateRecord {
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "AXp: {}", name_set(&self.axp, names));
        let _ = writeln!(s, "{}", self.rule);
        if !self.removable.is_empty() {
            let _ = writeln!(s, "removable (literal covers the whole domain): {}", name_set(&self.removable, names));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    /// Feature values in declaration order.
    pub point: Vec<String>,
    pub output: String,
    pub distance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustRecord {
    pub norm: String,
    pub eps: String,
    pub fixed: Vec<usize>,
    pub found: bool,
    pub witness: Option<WitnessRow>,
}

impl RobustRecord {
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "norm: {}, eps: {}, fixed: {}", self.norm, self.eps, name_set(&self.fixed, names));
        match &self.witness {
            Some(w) => {
                let _ = writeln!(s, "adversarial example: ({})", w.point.join(","));
                let _ = writeln!(s, "output: {}", pretty(&w.output));
                let _ = writeln!(s, "distance: {}", pretty(&w.distance));
            }
            None => {
                let _ = writeln!(s, "no adversarial example");
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateRecord {
    pub valid: bool,
    pub features: usize,
    pub nodes: usize,
    pub paths: usize,
    /// |𝔽| as a decimal string (it may exceed 64 bits).
    pub points: Option<String>,
    pub partition_checked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_output: Option<String>,
}

impl ValidateRecord {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "valid: {} features, {} nodes, {} paths", self.features, self.nodes, self.paths);
        match (&self.points, self.partition_checked) {
            (Some(n), true) => {
                let _ = writeln!(s, "paths partition the feature space (checked on all {n} points)");
            }
            (Some(n), false) => {
                let _ = writeln!(s, "{n} points; exhaustive partition check skipped (above FXP_BRUTE_CAP)");
            }
            (None, _) => {
                let _ = writeln!(s, "feature space too large to count; exhaustive check skipped");
            }
        }
        if let Some(output) = &self.instance_output {
            let _ = writeln!(s, "instance output: {}", pretty(output));
        }
        s
    }
}
