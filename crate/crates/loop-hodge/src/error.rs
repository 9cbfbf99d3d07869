//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    /// A degree window is too small to hold the result at the requested
    /// tolerance. Carries the offending boundary magnitude.
    #[error("window too small: {context} (boundary magnitude {magnitude:.3e} above tol {tol:.3e})")]
    WindowTooSmall {
        context: String,
        magnitude: f64,
        tol: f64,
    },

    #[error("near-singular evaluation: min |det| = {0:.3e}")]
    NearSingular(f64),

    #[error("degenerate Gram matrix: pivot {0:.3e} below threshold")]
    DegenerateGram(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow during transport at s = {0}")]
    StepUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
