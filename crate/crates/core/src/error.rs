use thiserror::Error;

/// Errors raised by the soliton library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mu must be non-zero")]
    MuZero,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("closed-form profiles exist only for steady solitons (gamma = infinity)")]
    NotSteady,

    #[error("profile value must be positive, got {0}")]
    NonPositiveA(f64),

    #[error("adaptive stepper failed to meet tolerance; last good t = {last_t:e}")]
    StepFailure { last_t: f64 },

    #[error("formula domain violated: {0}")]
    Domain(String),

    #[error("t = {t} lies outside the profile domain ({lo}, {hi})")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("b0 = 0 requires lim a(t) = 1 as t -> 0, found a(0) = {a0}")]
    NotSmoothOrigin { a0: f64 },

    #[error("requested r-window misses the metric domain [{lo}, {hi}]")]
    WindowEmpty { lo: f64, hi: f64 },

    #[error("finite-difference stencil unavailable at r = {0}")]
    Edge(f64),

    #[error("could not resolve the {end} end: {reason}")]
    UnresolvedEnd { end: &'static str, reason: String },

    #[error("nu = {nu} outside the admissible range of {family}: {range}")]
    Range {
        family: String,
        nu: f64,
        range: String,
    },

    #[error("Gauss curvature vanishes (|K| < 1e-12) at r = {r}")]
    ZeroCurvature { r: f64 },

    #[error("variation window invalid: {0}")]
    Window(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepFailure { .. } | Error::UnresolvedEnd { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
