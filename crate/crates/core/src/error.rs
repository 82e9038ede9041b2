use thiserror::Error;

/// Errors raised by the numerics and the experiment layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "continued fraction terminated early: requested {requested} quotients, achieved {achieved}"
    )]
    Truncated { requested: usize, achieved: usize },

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("convergent index {index} out of range (profile has {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("resource limit exceeded: {what} = {requested} > cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error(
        "rotation number did not converge: best estimate {estimate}, error bound {error_bound:e}"
    )]
    RotationNotConverged { estimate: f64, error_bound: f64 },

    #[error(
        "bisection bracket failure: lo = {lo}, hi = {hi}, rot(lo) = {rot_lo}, rot(hi) = {rot_hi}"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        rot_lo: f64,
        rot_hi: f64,
    },

    #[error("small divisor at n = {n}: |1 - e^(2 pi i n alpha)| = {magnitude:e}")]
    SmallDivisor { n: usize, magnitude: f64 },

    #[error("newton iteration did not converge at x = {x} (residual {residual:e})")]
    NewtonNonConvergence { x: f64, residual: f64 },

    #[error("tuning failed at epsilon = {epsilon}: {source}")]
    Tuning {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("periodic orbit search failed: {0}")]
    PeriodicOrbit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input or configuration rather than by
    /// the numerics. The CLI maps these to exit code 1.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Config(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::IndexOutOfRange { .. }
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
