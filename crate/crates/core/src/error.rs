use thiserror::Error;

/// Errors raised by state construction, circuit building and game analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitudes are not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("spatial mode {index} out of range for a system of {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary: max deviation from identity {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("photon capacity exceeded: {photons} photons > limit {limit}")]
    Capacity { photons: u32, limit: u32 },

    #[error("invalid device: {0}")]
    InvalidDevice(String),

    #[error("parameter `{name}` = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        })
    }
}
