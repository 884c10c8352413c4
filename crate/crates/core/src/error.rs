use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A solver invariant failed; this always indicates a bug upstream.
    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("power iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    Convergence { iters: usize, residual: f64 },

    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
