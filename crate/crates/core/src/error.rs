use std::io;
use std::path::PathBuf;

use crate::geometry::TileId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown layout `{0}` (expected tiled_cubemap_1 or tiled_cubemap_2)")]
    UnknownLayout(String),

    #[error("unknown tile name `{0}`")]
    UnknownTile(String),

    #[error("{}line {line}: {message}", path_prefix(.path))]
    Parse {
        path: Option<PathBuf>,
        line: u64,
        message: String,
    },

    #[error("rate table is missing chunk {chunk}, tile {tile}, level {level}")]
    MissingLevel { chunk: usize, tile: TileId, level: u32 },

    #[error(
        "line {line}: bitrate for chunk {chunk}, tile {tile}, level {level} is lower than level {}",
        .level - 1
    )]
    NonMonotone {
        line: u64,
        chunk: usize,
        tile: TileId,
        level: u32,
    },

    #[error("no rate-distortion points for chunk {chunk}, tile {tile}")]
    EmptyPoints { chunk: usize, tile: TileId },

    #[error("frame dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("rectangle {x},{y} {w}x{h} exceeds frame bounds {width}x{height}")]
    OutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("trace mismatch: {0}")]
    TraceMismatch(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("sigma scan exceeded cap {cap} without reaching full utility")]
    SigmaCapExceeded { cap: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn path_prefix(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    /// Attaches a file path to a parse error produced by an in-memory reader.
    pub(crate) fn with_path(self, p: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(p.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }
}
