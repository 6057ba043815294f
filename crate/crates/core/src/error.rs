use thiserror::Error;

use crate::tensor::ResidualReport;

/// Errors produced by constructors, contractions and verification drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape or rank of an argument does not match the ambient structure.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A tensor failed the predicate required by an operation.
    #[error("{predicate} precondition failed (relative residual {:.3e}, tol {:.3e})",
            report.relative, report.tol)]
    PredicateFailed {
        predicate: &'static str,
        report: ResidualReport,
    },

    /// The operation is undefined for the given half-dimension.
    #[error("domain error: {0}")]
    Domain(String),

    /// A seeded generator exhausted its retry budget.
    #[error("generation failed: {0}")]
    Generation(String),
}
