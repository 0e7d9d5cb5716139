//! Scenario files: one orbifold point, one bubble, one group.

use std::path::Path;

use eol_core::deformations::{BubbleAsymptotics, OrbifoldPointData};
use eol_core::flat_model::FiniteGroup;
use eol_core::obstructions::DEFAULT_TOLERANCE;
use eol_core::quadrature::DEFAULT_ORDER;
use serde::{Deserialize, Serialize};

use crate::{CliError, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Cyclic,
}

/// `ℤ_k` acting by `z ↦ e^{2πi/k} z` on `ℂ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: GroupKind,
    pub order: usize,
}

impl GroupConfig {
    pub fn build(&self) -> Result<FiniteGroup, CliError> {
        match self.kind {
            GroupKind::Cyclic => FiniteGroup::cyclic(self.order).map_err(|e| CliError::Input(format!("group.order: {e}"))),
        }
    }
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub group: GroupConfig,
    pub orbifold: OrbifoldPointData,
    pub bubble: BubbleAsymptotics,
    #[serde(default = "default_order")]
    pub quadrature_order: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Scenario {
    /// Strict parse; errors name the offending field path.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Input(inner.to_string())
            } else {
                CliError::Input(format!("{path}: {inner}"))
            }
        })?;
        s.check_fields()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check_fields(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Input(format!("schema: expected \"{SCHEMA}\", got \"{}\"", self.schema)));
        }
        if self.group.order == 0 {
            return Err(CliError::Input("group.order: must be at least 1".into()));
        }
        if self.quadrature_order == 0 {
            return Err(CliError::Input("quadrature_order: must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Input(format!("tolerance: must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    /// Validates the geometric data; failures are precondition violations.
    pub fn validate_data(&self) -> Result<(), CliError> {
        self.orbifold.validate()?;
        self.bubble.validate()?;
        Ok(())
    }
}
