//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors reported by the numerical core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid argument outside a numerical routine's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation point outside the spatial interval.
    #[error("point {x} outside [{lo}, {hi}]")]
    OutsideInterval { x: f64, lo: f64, hi: f64 },

    /// Two grid functions sampled on different grids were combined.
    #[error("grid mismatch: operands sampled on different grids")]
    GridMismatch,

    /// A function that must stay away from zero dipped below the threshold.
    #[error("nonvanishing violation: min |f| = {min_abs:.3e} <= {threshold:.3e}")]
    NonvanishingViolation { min_abs: f64, threshold: f64 },

    /// An iterated-integral series failed to satisfy its truncation criterion.
    #[error("series did not converge within {max_terms} terms (last term {last_term:.3e})")]
    NoConvergence { max_terms: usize, last_term: f64 },

    /// The SVD sweep did not reach the orthogonality tolerance.
    #[error("SVD failed to converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    /// Index beyond what a basis was built for.
    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    /// Initial and boundary data disagree at a corner of the rectangle.
    #[error("incompatible data: {0}")]
    CompatibilityViolation(String),

    /// A tridiagonal pivot fell below the magnitude guard.
    #[error("singular tridiagonal system: |pivot| = {pivot:.3e} at row {row}")]
    SingularTridiagonal { row: usize, pivot: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
