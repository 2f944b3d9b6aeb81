//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no frame {0} in this stream")]
    MissingFrame(u64),

    #[error("frame {current} fed after frame {previous}; frames must strictly increase")]
    OutOfOrderFrame { previous: u64, current: u64 },

    #[error("frame {frame} lies outside scene {scene}")]
    FrameOutsideScene { scene: String, frame: u64 },

    #[error("expected {expected} frames, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("scenes {0} and {1} overlap")]
    OverlappingScenes(String, String),

    #[error("input mismatch: {0}")]
    InputMismatch(String),

    #[error("classifier failed on window ({x}, {y}, {w}, {h}): {message}")]
    Classifier {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        message: String,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
