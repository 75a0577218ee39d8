use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial degree {0} outside the supported range 0..=7")]
    DegreeOutOfRange(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular matrix at pivot {0}")]
    SingularMatrix(usize),

    #[error("time step {dt} violates the upwind CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("negative radicand {0} in G(z)")]
    NegativeRadicand(f64),

    #[error("exact solution evaluated at or beyond its blow-up front (x = {x}, t = {t})")]
    BeyondBlowUp { x: f64, t: f64 },

    #[error("zero reference norm in relative error")]
    ZeroNorm,

    #[error("run stopped ({status}) at t = {t} before reaching t = {target}")]
    Stopped { status: &'static str, t: f64, target: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("output failed: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
