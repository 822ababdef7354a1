use thiserror::Error;

/// Errors raised by the numeric modules and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rotary dimension {d_prime}: must be even and >= 2")]
    InvalidDimension { d_prime: usize },

    #[error("invalid base {base}: must be positive and finite")]
    InvalidBase { base: f64 },

    #[error("invalid frequency at j={j}: {theta} (frequencies must be positive and finite)")]
    InvalidFrequency { j: usize, theta: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate dimension: {0}")]
    DegenerateDimension(String),

    #[error("frequency spec has no recorded base; {0} requires a base-generated spectrum")]
    MissingBase(&'static str),

    #[error("invalid thresholds: alpha ({alpha}) must be < beta ({beta})")]
    InvalidThresholds { alpha: f64, beta: f64 },

    #[error("timestep {t} outside [0, {total}]")]
    TimestepOutOfRange { t: u64, total: u64 },

    #[error("component index {k} outside 1..={len}")]
    IndexOutOfRange { k: usize, len: usize },

    #[error(
        "k = 1 has theta_1 = 1 for every base; use the direct theta override (riflex) instead"
    )]
    DegenerateIntrinsic,

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("duplicate axis `{0}`")]
    DuplicateAxis(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("component subset is empty")]
    EmptySubset,

    #[error("no repetition found within {probe_len} positions")]
    NoRepetitionFound { probe_len: usize },

    #[error("anchor search window is empty after clipping to the sequence")]
    EmptyWindow,

    #[error("degenerate sequence: {0}")]
    DegenerateSequence(String),

    #[error("frame dimension mismatch: {0}")]
    FrameMismatch(String),

    #[error("cannot aggregate an empty list of reports")]
    EmptyReports,

    #[error("config error: {0}")]
    Config(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Whether the error stems from configuration rather than from data or math.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Json(_)
                | Error::UnknownAxis(_)
                | Error::DuplicateAxis(_)
                | Error::InvalidDimension { .. }
                | Error::InvalidBase { .. }
                | Error::InvalidFrequency { .. }
                | Error::InvalidThresholds { .. }
                | Error::InvalidParameter { .. }
                | Error::IndexOutOfRange { .. }
                | Error::DegenerateIntrinsic
                | Error::DegenerateDimension(_)
                | Error::MissingBase(_)
                | Error::TimestepOutOfRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
