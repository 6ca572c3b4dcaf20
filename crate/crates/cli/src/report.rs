//! Verification reports.

use std::collections::BTreeMap;

use serde::Serialize;

/// How a residual is compared against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub check: String,
    pub anchor: String,
    pub residual: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub detail: String,
}

impl Record {
    pub fn at_most(check: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        Self {
            check: check.into(),
            anchor: anchor.into(),
            residual,
            threshold,
            comparison: Comparison::AtMost,
            pass: residual <= threshold,
            detail: String::new(),
        }
    }

    pub fn at_least(check: &str, anchor: &str, residual: f64, threshold: f64) -> Self {
        Self {
            comparison: Comparison::AtLeast,
            pass: residual >= threshold,
            ..Self::at_most(check, anchor, residual, threshold)
        }
    }

    /// A failed check that produced no residual.
    pub fn failure(check: &str, anchor: &str, detail: impl Into<String>) -> Self {
        Self {
            residual: f64::INFINITY,
            threshold: 0.0,
            pass: false,
            detail: detail.into(),
            ..Self::at_most(check, anchor, 0.0, 0.0)
        }
    }

    /// A check that does not apply to the scene. It passes vacuously and
    /// says so in its detail.
    pub fn skipped(check: &str, anchor: &str, reason: impl Into<String>) -> Self {
        Self {
            detail: format!("skipped: {}", reason.into()),
            ..Self::at_most(check, anchor, 0.0, 0.0)
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reproducibility {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scene: String,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub reproducibility: Reproducibility,
    pub pass: bool,
}

impl Report {
    pub fn new(scene: String, records: Vec<Record>, reproducibility: Reproducibility) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let skipped = records.iter().filter(|r| r.detail.starts_with("skipped:")).count();
        let summary = Summary {
            total: records.len(),
            passed,
            failed: records.len() - passed,
            skipped,
        };
        Self {
            scene,
            pass: summary.failed == 0,
            records,
            summary,
            reproducibility,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}
