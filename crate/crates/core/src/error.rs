use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bounding box: {0}")]
    InvalidBox(&'static str),
    #[error("weight matrix row {row} has {len} entries, expected {expected}")]
    RaggedMatrix { row: usize, len: usize, expected: usize },
    #[error("non-finite weight at ({row}, {col})")]
    NonFiniteWeight { row: usize, col: usize },
    #[error("innovation covariance is not positive definite")]
    SingularInnovation,
    #[error("invalid tracker config: {0}")]
    InvalidConfig(&'static str),
    #[error("detection score {0} outside [0, 1]")]
    InvalidScore(f64),
    #[error("detections mix frames {first} and {other}")]
    MixedFrames { first: u32, other: u32 },
    #[error("frame {frame} does not advance past frame {last}")]
    FrameNotAdvancing { frame: u32, last: u32 },
    #[error("duplicate identity {id} in frame {frame}")]
    DuplicateIdentity { frame: u32, id: u32 },
    #[error("identity must be positive")]
    ZeroIdentity,
    #[error("ground truth is empty, metric undefined")]
    EmptyGroundTruth,
    #[error("invalid histogram parameters: {0}")]
    InvalidHistogram(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("invalid corruption model: {0}")]
    InvalidCorruption(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
