//! Structured command output. Every report starts with `schema` and
//! `command`, parses back with unknown keys rejected, and carries no timing.

use eol_core::obstructions::ObstructionReport;
use eol_core::tensor::Mat3;
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    /// Largest sampled `|Ric°⁽¹⁾|` of `H₂` and `H⁴`.
    pub einstein_residual: f64,
    pub group_order: usize,
    /// Labels of the Γ-invariant Killing fields that were integrated.
    pub invariant_killing_fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructReport {
    pub schema: String,
    pub command: String,
    pub scenario: Scenario,
    pub obstruction: ObstructionReport,
    pub verdict: String,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockPair {
    pub r_plus: Mat3,
    pub r_minus: Mat3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureReport {
    pub schema: String,
    pub command: String,
    pub scenario: Scenario,
    /// Point at which the bubble blocks are evaluated.
    pub probe: [f64; 4],
    /// `r⁶R^{±,(1)}(H⁴)` in the frame `θ^±(probe)`.
    pub bubble: BlockPair,
    /// `R^{±,(1)}(H₂)` in the frame `ω^±`; constant in `x`.
    pub orbifold: BlockPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaubReport {
    pub schema: String,
    pub command: String,
    pub scenario: Scenario,
    pub field: String,
    pub radius: f64,
    /// `∫ E⁽²⁾(H⁴, H⁴)(X, ∂_r)`.
    pub bubble: f64,
    /// `∫ E⁽²⁾(H₂, H₂)(X, ∂_r)`.
    pub orbifold: f64,
    /// `∫ E⁽²⁾(H⁴, H₂)(X, ∂_r)`.
    pub mixed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub schema: String,
    pub command: String,
    pub order: usize,
    pub filter: Option<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports contain only plain data")
}
