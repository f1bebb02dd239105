//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("transform is numerically singular (condition estimate {cond:.3e})")]
    SingularTransform { cond: f64 },

    #[error("covariance matrix is singular or not positive definite")]
    SingularCovariance,

    #[error("state violates the uncertainty bound: {0}")]
    InadmissibleState(String),

    #[error("integration could not reach tolerance {tol:.3e} near t = {t}")]
    ToleranceNotMet { tol: f64, t: f64 },

    #[error("invalid subsystem split: {0}")]
    BadSplit(String),

    #[error("reservoir covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("R11 is singular at t = {t} (condition estimate {cond:.3e})")]
    SingularR11 { t: f64, cond: f64 },

    #[error("drift matrix is not Hurwitz (max eigenvalue real part {max_re})")]
    NotHurwitz { max_re: f64 },

    #[error("Lyapunov system is singular")]
    SingularLyapunov,

    #[error("operation requires {expected} degrees of freedom, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("unsupported coupling pattern: {0}")]
    UnsupportedCouplingPattern(String),

    #[error("integration window [{lo}, {hi}] does not contain the resonance frequency {omega0}")]
    WindowExcludesResonance { lo: f64, hi: f64, omega0: f64 },

    #[error("principal-value integral did not converge (last relative change {last_change:.3e})")]
    PVNotConverged { last_change: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}
