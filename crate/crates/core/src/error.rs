use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root not bracketed within momentum cap {cap} (target {target})")]
    RootNotBracketed { target: f64, cap: f64 },

    #[error("level c = {level} is not above the critical level K = {critical}")]
    LevelBelowCritical { level: f64, critical: f64 },

    #[error("energy drift {drift:e} exceeds tolerance {tolerance:e}; reduce the time step")]
    EnergyDriftExceeded { drift: f64, tolerance: f64 },

    #[error("shooting failed: residual {residual:e} after {iterations} iterations, bracket [{lo}, {hi}]")]
    ShootFailed {
        residual: f64,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("solver blow-up at t = {time}: max |u| = {max_abs} exceeds bound {bound}")]
    UnstableBlowup { time: f64, max_abs: f64, bound: f64 },

    #[error("profile is not reachable at time T (residual {residual:e} > tolerance {tolerance:e})")]
    NotReachable { residual: f64, tolerance: f64 },

    #[error("p0 = {0} is outside (0, sqrt 2)")]
    OutOfRange(f64),

    #[error("no shock yet at t = {0}: shocks appear only after pi / (2 sqrt 2)")]
    NoShockYet(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors coming from the file system or input parsing rather than the numerics.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse { .. })
    }
}
