//! Report document written as JSON. Field order is fixed by the struct
//! definitions and maps are ordered, so equal runs serialize to equal bytes.

use std::collections::BTreeMap;

use laxgap::bounds::EigenvalueVerdict;
use laxgap::gap::Branch;
use laxgap::grid::GridSpec;
use laxgap::kbeta::NZeroReport;
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub grid: GridInfo,
    pub results: MethodResults,
    pub cross_method: Vec<CrossMethodDelta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds_check: Option<BoundsCheck>,
    pub consistency: Consistency,
    pub warnings: Vec<String>,
    /// Seconds per method; present only when timings were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    #[serde(flatten)]
    pub spec: GridSpec,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct MethodResults {
    #[serde(rename = "kbeta-pipeline", skip_serializing_if = "Option::is_none")]
    pub kbeta_pipeline: Option<PipelineResult>,
    #[serde(rename = "direct-dirac", skip_serializing_if = "Option::is_none")]
    pub direct_dirac: Option<DirectResult>,
    #[serde(rename = "direct-calL", skip_serializing_if = "Option::is_none")]
    pub direct_reduced: Option<DirectResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchSource {
    Config,
    Detected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PipelineResult {
    Solved(PipelineSolution),
    /// Neither invariant is constant and no branch was configured.
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSolution {
    pub branch: Branch,
    pub branch_source: BranchSource,
    /// `||V^(-)||_inf` of the branch's scalar potential.
    pub negative_part: f64,
    pub n_zero: NZeroReport,
    pub eigenvalues: Vec<PipelineEigenvalue>,
    /// Truncation to `[-X, X]` is not bounded a priori for slowly decaying `V`.
    pub caveat: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineEigenvalue {
    pub j: usize,
    pub lambda: f64,
    pub beta: f64,
    pub mu: f64,
    pub alpha: f64,
    pub fixed_point_residual: f64,
    /// `||L Psi - lambda Psi|| / ||Psi||` for the reconstructed spinor.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectResult {
    /// Genuine eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Every candidate in the gap with its filter verdicts.
    pub candidates: Vec<DirectCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectCandidate {
    pub lambda: f64,
    pub copies: Vec<f64>,
    pub split: Option<f64>,
    pub outer_mass: f64,
    pub residual: f64,
    /// Distance to the nearest eigenvalue on the refined grid.
    pub drift: Option<f64>,
    pub drift_limit: f64,
    pub paired: bool,
    pub localized: bool,
    pub persistent: bool,
    pub genuine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsResult {
    pub c_values: Vec<f64>,
    pub left_bound: Vec<f64>,
    pub right_bound: Vec<f64>,
    /// Merged open intervals free of eigenvalues.
    pub excluded: Vec<(f64, f64)>,
    /// `(-c*, c*)` when `c* = min(min u_+, -max u_-) > 0`.
    pub exclusion_interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossMethodDelta {
    pub a: String,
    pub b: String,
    pub lambda_a: f64,
    /// Nearest eigenvalue of `b`, if `b` has any.
    pub lambda_b: Option<f64>,
    pub delta: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub family: String,
    /// `None` when no closed form is known for the family.
    pub reference: Option<Vec<f64>>,
    pub comparisons: Vec<OracleComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub method: String,
    pub eigenvalues: Vec<f64>,
    /// Largest distance to the reference, `None` when the counts differ.
    pub max_error: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub verdicts: Vec<MethodVerdicts>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodVerdicts {
    pub method: String,
    pub verdicts: Vec<EigenvalueVerdict>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Consistency {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
