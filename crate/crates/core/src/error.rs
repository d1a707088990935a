use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid, basis, scenario or run parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// An array did not have the length implied by the grid or basis.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// The charge density does not integrate to the neutralizing background.
    #[error("charge density is not neutral: integral of (rho - background) = {imbalance:e} (tolerance {tolerance:e})")]
    NonNeutral { imbalance: f64, tolerance: f64 },

    /// Damping-rate fit was handed a window that contains non-positive samples
    /// or too few points.
    #[error("cannot fit damping rate: {0}")]
    Fit(String),

    /// The run produced NaN or infinite values.
    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            context,
            expected,
            actual,
        })
    }
}
