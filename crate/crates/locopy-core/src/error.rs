use alloc::string::String;
use core::fmt;

/// Error type shared by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Operand shapes are incompatible with the requested operation.
    DimensionMismatch(String),
    /// A value failed structural validation (non-unitary, non-normalized,
    /// malformed index, duplicate entry, ...).
    InvalidInput(String),
    /// An iterative numerical routine did not reach its target accuracy.
    ConvergenceFailure(String),
    /// A measurement or channel family does not resolve the identity.
    CompletenessFailure {
        residual: f64,
        context: String,
    },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            CoreError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            CoreError::ConvergenceFailure(msg) => write!(f, "convergence failure: {msg}"),
            CoreError::CompletenessFailure { residual, context } => {
                write!(f, "completeness failure ({context}): residual {residual:.3e}")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for CoreError {}
