use std::path::PathBuf;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("map has no positive mass and cannot be sum-normalized")]
    AllZeroMap,
    #[error("map values must be finite and non-negative (found {0} at index {1})")]
    InvalidValue(f64, usize),
    #[error("expected {expected} values for a {width}x{height} map, got {got}")]
    BadLength {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("frame {0}x{1} is too small (needs at least 8x8)")]
    FrameTooSmall(usize, usize),
    #[error("predictor list is empty")]
    EmptyPredictorList,
    #[error("unknown predictor `{0}`")]
    UnknownPredictor(String),
    #[error("exhaustive selection supports at most 20 paths, got {0}")]
    TooManyPaths(usize),
    #[error("entropy of an input map is zero; consistency ratio undefined")]
    ZeroEntropyDenominator,
    #[error("both consistency scores are zero")]
    DegenerateScores,
    #[error("map list is empty")]
    EmptyList,
    #[error("no fixations inside the map")]
    NoFixations,
    #[error("every pixel is fixated; no negatives for ROC")]
    NoNegatives,
    #[error("shuffle pool is empty")]
    EmptyPool,
    #[error("map has zero variance")]
    ZeroVariance,
    #[error("sequence is empty")]
    EmptySequence,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing or malformed header (expected `{0}`)")]
    MissingHeader(String),
    #[error("invalid manifest: {0}")]
    ManifestInvalid(String),
    #[error("cannot decode frame {path}: {reason}")]
    FrameDecode { path: PathBuf, reason: String },
    #[error("malformed map file {path}: {reason}")]
    MapFormat { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
