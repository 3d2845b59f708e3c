use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty image")]
    EmptyImage,
    #[error("empty histogram")]
    EmptyHistogram,
    #[error("pixel buffer holds {actual} values, expected {width}x{height}")]
    PixelCount {
        width: usize,
        height: usize,
        actual: usize,
    },
    #[error("histogram bin {bin} is invalid ({value})")]
    InvalidBin { bin: usize, value: f64 },
    #[error("expected a vector of length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid swarm config: {0}")]
    InvalidConfig(String),
    #[error("objective returned {value} at position {position:?}")]
    NonFiniteObjective { value: f64, position: Vec<f64> },
    #[error("singular tridiagonal system (zero pivot at row {0})")]
    SingularSystem(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a PGM file: bad magic number {0:?}")]
    BadMagic(String),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),
    #[error("truncated PGM pixel data: expected {expected} samples, found {found}")]
    TruncatedPixels { expected: usize, found: usize },
    #[error("PGM sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },
    #[error("empty output path")]
    EmptyPath,
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}
