use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input fell outside the domain of the formula being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid angle: theta = {theta_deg} deg is outside the open interval (0, 90) deg")]
    InvalidAngle { theta_deg: f64 },

    /// The motor cannot deliver the impulse needed to cancel the pre-impact velocity.
    #[error(
        "insufficient impulse: required {required:.6} N*s, available {available:.6} N*s \
         (pit too deep for this thruster)"
    )]
    InsufficientImpulse { required: f64, available: f64 },

    #[error("unreachable even at zero depth: launch speed {v0:.6} m/s exceeds J/m = {dv:.6} m/s")]
    UnreachableDepth { v0: f64, dv: f64 },

    #[error("no floor crossing within {max_time:.3} s of simulated flight")]
    NoCrossing { max_time: f64 },

    #[error(
        "unreachable soft landing: best touchdown speed {best_speed:.6} m/s exceeds \
         threshold {threshold:.6} m/s"
    )]
    UnreachableSoftLanding { best_speed: f64, threshold: f64 },

    #[error("infinite duration: total power draw is zero")]
    InfiniteDuration,

    #[error("thrust curve line {line}: {message}")]
    ThrustCurve { line: usize, message: String },

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config line {line}: key `{key}` = `{value}`: {message}")]
    ConfigValue {
        line: usize,
        key: String,
        value: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
