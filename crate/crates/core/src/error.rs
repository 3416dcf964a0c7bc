use std::io;

use thiserror::Error;

/// Errors produced by the pipeline library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("sample count mismatch: header implies {expected} bytes, file has {actual}")]
    SampleCountMismatch { expected: u64, actual: u64 },

    #[error("non-finite sample at channel {channel}, index {index}")]
    NonFiniteSample { channel: usize, index: usize },

    #[error("event out of range: sample_index {index} with {num_samples} samples")]
    EventOutOfRange { index: usize, num_samples: usize },

    #[error("invalid recording: {0}")]
    InvalidRecording(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("window length must be at least 2, got {0}")]
    WindowTooShort(usize),

    #[error("sample rate {fs} Hz cannot represent bands up to {max_hz} Hz")]
    SampleRateTooLow { fs: f64, max_hz: f64 },

    #[error("band [{lo}, {hi}) Hz contains no spectral bins")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("duplicate projected position for electrodes {first} and {second}")]
    DuplicatePosition { first: usize, second: usize },

    #[error("montage too small: need at least 4 electrodes, got {0}")]
    MontageTooSmall(usize),

    #[error("montage is degenerate: all projected points are collinear")]
    CollinearMontage,

    #[error("non-finite value at electrode {0}")]
    NonFiniteValue(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("corrupt tensor file: {0}")]
    CorruptTensor(String),

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("cannot stratify: class {class} has only {count} samples (need at least 3)")]
    CannotStratify { class: u32, count: usize },

    #[error("png encoding failed: {0}")]
    Png(String),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
