use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the detection pipeline and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    ShapeMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("crop window lies entirely outside the {width}x{height} global grid")]
    EmptyWindow { width: i64, height: i64 },

    #[error("pose ({x:.3}, {y:.3}) is outside the map")]
    OffMap { x: f64, y: f64 },

    #[error("no path from ({sx}, {sy}) to ({gx}, {gy})")]
    NoPath { sx: i64, sy: i64, gx: i64, gy: i64 },

    #[error("patrol goal sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("empty robot roster")]
    EmptyRoster,

    #[error("parse error in {file}: field `{field}`: {reason}")]
    Parse {
        file: PathBuf,
        field: String,
        reason: String,
    },

    #[error("integrity error in {file}: {reason}")]
    Integrity { file: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
