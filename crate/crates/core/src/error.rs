use thiserror::Error;

/// Errors produced by the solvers, the residual analysis and the integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested branch or formula does not exist for these inputs
    /// (e.g. an integer-order closed form with alpha < 1).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The eigen-expansion ratio is not inside the unit disc.
    #[error("divergent series: |ratio| = {ratio} >= 1 ({reason})")]
    DivergentSeries { ratio: f64, reason: String },

    /// A power-law or least-squares fit could not be carried out.
    #[error("fit error: {0}")]
    Fit(String),

    /// The integrator produced a non-finite state.
    #[error("integration diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },

    /// Two trajectories that must share a time grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Reading or writing a table or sidecar failed.
    #[error("i/o error: {0}")]
    Io(String),

    /// A configuration value violates its invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
