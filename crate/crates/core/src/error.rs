use thiserror::Error;

/// Errors raised by the analysis, compensation, simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The analyzer angle is at 0 or π/2, where the decomposition phases are undefined.
    #[error("degenerate analyzer: alpha = {alpha} leaves the effective phase undefined")]
    DegenerateAnalyzer { alpha: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("maximizer did not converge within {evaluations} evaluations")]
    Convergence { evaluations: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// The fit went through but the fringe contrast is too low to trust it.
    /// The estimate is still carried so callers can report it.
    #[error("fringe visibility {visibility:.4} below threshold {threshold}; phase estimate {phi_hat:.6} ± {sigma:.6} is unreliable")]
    LowVisibility {
        visibility: f64,
        threshold: f64,
        phi_hat: f64,
        sigma: f64,
    },

    #[error("matrix verification failed: {0}")]
    Verification(String),
}
