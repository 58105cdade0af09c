use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} needs x-derivatives up to order {needed}, oracle provides {available}")]
    Capability {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("singular evaluation at x = {x}, t = {t}: {reason}")]
    Singular { x: f64, t: f64, reason: String },

    #[error("near pole at x = {x}, t = {t} (|value| = {magnitude:e} against local scale {scale:e})")]
    NearPole {
        x: f64,
        t: f64,
        magnitude: f64,
        scale: f64,
    },

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("reality condition violated at t = {t}: Im(log W)_xx spread {spread:e} over probe points")]
    RealityViolation { t: f64, spread: f64 },

    #[error("box too small: boundary density {leakage:e} exceeds {limit:e}")]
    BoxTooSmall { leakage: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(what: impl Into<String>, needed: usize, available: usize) -> Self {
        Error::Capability {
            what: what.into(),
            needed,
            available,
        }
    }

    /// Location of the failure, when the error carries one.
    pub fn location(&self) -> Option<(f64, f64)> {
        match *self {
            Error::Singular { x, t, .. } | Error::NearPole { x, t, .. } => Some((x, t)),
            _ => None,
        }
    }
}
