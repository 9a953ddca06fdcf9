use std::io;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bit stream length {0} is not a multiple of 8")]
    NonOctetLength(usize),
    #[error("secret key must contain at least one byte")]
    EmptyKey,
    #[error("magic square order {0} is too small (minimum 3)")]
    OrderTooSmall(usize),
    #[error("value {value} is outside the magic square range 1..={max}")]
    ValueOutOfRange { value: usize, max: usize },
    #[error("cover image is {width}x{height}; only square images are supported")]
    NonSquareImage { width: usize, height: usize },
    #[error("embedding capacity {0} bpp is outside (0, 2]")]
    EcOutOfRange(String),
    #[error("invalid embedding capacity literal {0:?}")]
    InvalidEc(String),
    #[error("payload needs {requested} bits but only {available} slots are available")]
    CapacityExceeded { requested: usize, available: usize },
    #[error("header declares {declared} payload bits but only {available} slots remain")]
    HeaderTooLarge { declared: u64, available: usize },
    #[error("plan is for {expected}, got {actual}")]
    PlanMismatch { expected: String, actual: String },
    #[error("not a binary PGM file (expected magic \"P5\")")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported PGM maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("PGM raster truncated: expected {expected} bytes, found {found}")]
    TruncatedRaster { expected: usize, found: usize },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("nothing to render")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    /// Name of the error case, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonOctetLength(_) => "NonOctetLength",
            Error::EmptyKey => "EmptyKey",
            Error::OrderTooSmall(_) => "OrderTooSmall",
            Error::ValueOutOfRange { .. } => "ValueOutOfRange",
            Error::NonSquareImage { .. } => "NonSquareImage",
            Error::EcOutOfRange(_) => "EcOutOfRange",
            Error::InvalidEc(_) => "InvalidEc",
            Error::CapacityExceeded { .. } => "CapacityExceeded",
            Error::HeaderTooLarge { .. } => "HeaderTooLarge",
            Error::PlanMismatch { .. } => "PlanMismatch",
            Error::BadMagic => "BadMagic",
            Error::MalformedHeader(_) => "MalformedHeader",
            Error::UnsupportedMaxval(_) => "UnsupportedMaxval",
            Error::TruncatedRaster { .. } => "TruncatedRaster",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io { .. } => "Io",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
