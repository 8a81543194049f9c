use serde::{Deserialize, Serialize};

use super::structural::StructuralVerdict;
use super::transforms::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Too many transforms were degenerate on the data to decide.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// Base correlation of a bivariate law, or the target matrix of a sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub id: usize,
    pub kind: String,
    /// 1-based coordinate pair (Monte-Carlo only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<[usize; 2]>,
    pub estimate: f64,
    /// Standard error (Monte-Carlo only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub se: Option<f64>,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTransform {
    pub id: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<[usize; 2]>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub mode: Mode,
    pub method: Method,
    pub target_r: Target,
    pub max_abs_deviation: f64,
    pub verdict: Verdict,
    pub failing_ids: Vec<usize>,
    pub records: Vec<TransformRecord>,
    pub skipped: Vec<SkippedTransform>,
    /// Exact mode: the characterization by structure, and whether the
    /// transform oracle reached the same verdict.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub structural: Option<StructuralVerdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub structural_agrees: Option<bool>,
    /// Monte-Carlo mode: test settings.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub se_method: Option<String>,
}

impl InvarianceReport {
    pub(crate) fn finish(&mut self) {
        self.failing_ids = self.records.iter().filter(|r| !r.passed).map(|r| r.id).collect();
        self.failing_ids.dedup();
        self.max_abs_deviation = self.records.iter().map(|r| r.deviation).fold(0.0, f64::max);
    }
}
