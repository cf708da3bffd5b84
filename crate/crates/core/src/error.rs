use std::path::PathBuf;

use crate::label::ClassId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to decode PNG: {0}")]
    Decode(#[from] png::DecodingError),

    #[error("failed to encode PNG: {0}")]
    Encode(#[from] png::EncodingError),

    #[error("unsupported image: {0}")]
    UnsupportedImage(String),

    #[error("pixel ({x}, {y}) has color rgb({}, {}, {}) which is not in the palette", rgb[0], rgb[1], rgb[2])]
    UnknownColor { x: usize, y: usize, rgb: [u8; 3] },

    #[error("class {0} has no palette entry")]
    MissingPaletteEntry(ClassId),

    #[error("invalid palette: {0}")]
    InvalidPalette(String),

    #[error("invalid label map: {0}")]
    InvalidLabelMap(String),

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("alpha must be a finite positive number, got {0}")]
    InvalidAlpha(f64),

    #[error("theta must be a finite non-negative number, got {0}")]
    InvalidTheta(f64),

    #[error("pixel ({x}, {y}) with class {class} is not covered by any distance field")]
    UncoveredPixel { x: usize, y: usize, class: ClassId },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("infeasible error count {requested}: {reason}")]
    InfeasibleErrorCount { requested: usize, reason: String },

    #[error("invalid metric series: {0}")]
    InvalidSeries(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by inconsistent or out-of-range user input, as
    /// opposed to unreadable files or environment failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnknownColor { .. }
                | Error::MissingPaletteEntry(_)
                | Error::InvalidPalette(_)
                | Error::InvalidLabelMap(_)
                | Error::DimensionMismatch { .. }
                | Error::InvalidAlpha(_)
                | Error::InvalidTheta(_)
                | Error::UncoveredPixel { .. }
                | Error::InvalidScene(_)
                | Error::InfeasibleErrorCount { .. }
                | Error::InvalidSeries(_)
        )
    }
}
