use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: letters out of range, windows that do not cover the
    /// indices an operation reads, overlapping cylinders, bad parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The allowed-transition graph does not support the requested measure
    /// (reducible or periodic chain, or power iteration failed to settle).
    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    /// A distortion ratio was requested for an empty cylinder.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// Momentum too close to a multiple of π; the 1/sin(k) factors in the
    /// edge reconstruction blow up there.
    #[error("singular energy: k = {k} within {margin} of a multiple of pi")]
    SingularEnergy { k: f64, margin: f64 },

    /// The two sequences disagree at a non-negative index, so they do not
    /// lie in a common local stable set.
    #[error("not in stable set: sequences disagree at index {index}")]
    NotInStableSet { index: i64 },

    /// The two sequences disagree at a non-positive index, so they do not
    /// lie in a common local unstable set.
    #[error("not in unstable set: sequences disagree at index {index}")]
    NotInUnstableSet { index: i64 },

    /// The shifted energy sits on (or numerically too close to) the spectrum
    /// of the finite-volume operator, so the resolvent is not available.
    #[error("resonant energy: |det| = exp({log_abs_det}) too small at scale exp({log_scale})")]
    ResonantEnergy { log_abs_det: f64, log_scale: f64 },

    /// Not enough usable data for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
