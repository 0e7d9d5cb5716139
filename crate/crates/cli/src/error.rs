use eol_core::curvature::CurvatureError;
use eol_core::deformations::DeformationError;
use eol_core::flat_model::FlatModelError;
use eol_core::obstructions::ObstructionError;
use eol_core::quadrature::QuadratureError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for input and internal errors, 3 for precondition violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Internal(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl From<DeformationError> for CliError {
    fn from(e: DeformationError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<FlatModelError> for CliError {
    fn from(e: FlatModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match e {
            QuadratureError::InvalidRule(_) => CliError::Input(e.to_string()),
            QuadratureError::NonInvariantIntegrand { .. } => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<ObstructionError> for CliError {
    fn from(e: ObstructionError) -> Self {
        match e {
            ObstructionError::Quadrature(q) => q.into(),
            ObstructionError::Deformation(d) => d.into(),
            ObstructionError::InvalidInput(m) => CliError::Input(m),
            ObstructionError::PreconditionViolated { .. } | ObstructionError::Curvature(_) => {
                CliError::Precondition(e.to_string())
            }
        }
    }
}
