use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration has {found} coordinates, event expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("level {level} at coordinate {coord} is outside 1..={r}")]
    LevelOutOfRange { coord: usize, level: u32, r: u32 },

    #[error("coordinate {coord} is outside 0..{n}")]
    CoordinateOutOfRange { coord: usize, n: usize },

    #[error("enumeration needs {required} states, cap is {cap}; use Monte Carlo mode")]
    Capacity { required: u128, cap: u64 },

    #[error("parameter {t} is outside the open interval ({a}, {b})")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("measure family invalid at level {k}: {reason}")]
    Validation { k: u32, reason: String },

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("event is not increasing")]
    NotMonotone,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("curve does not cross {level} on the grid")]
    NoCrossing { level: f64 },

    #[error("event probability decreases from {before} to {after} between t={t_before} and t={t_after}")]
    NonMonotoneCurve {
        t_before: f64,
        t_after: f64,
        before: f64,
        after: f64,
    },
}
