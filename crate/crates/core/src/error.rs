use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one documented
/// precondition or runtime failure so callers can map them to exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KerrError {
    #[error("invalid spin a = {0}: must lie in [0, 1]")]
    InvalidSpin(f64),

    #[error("spin a = {0} is below the floor {1} required by the critical-curve parametrization")]
    SpinTooSmall(f64, f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("timelike violation: angular velocity {omega} outside admissible range ({lower}, {upper})")]
    TimelikeViolation { omega: f64, lower: f64, upper: f64 },

    #[error("static observer at r0 = {r0}, theta0 = {theta0} lies inside the ergosphere")]
    ErgosphereViolation { r0: f64, theta0: f64 },

    #[error("step failure at sigma = {sigma}: step size {step} below minimum")]
    StepFailure { sigma: f64, step: f64 },

    #[error("degenerate ray: 1 - Omega*lambda vanishes")]
    DegenerateRay,

    #[error("stereographic pole: alpha = pi has no image on the plane")]
    ProjectionPole,

    #[error("render failed: {failed} of {total} pixels errored")]
    RenderFailed { failed: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for KerrError {
    fn from(e: std::io::Error) -> Self {
        KerrError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, KerrError>;
