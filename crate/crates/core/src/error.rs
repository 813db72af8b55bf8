use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Unsupported or inconsistent configuration (generator kind, config file field).
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The resolution `n` leaves an empty index range along some axis.
    #[error("resolution n={n} too small: axis {axis} has empty index range [{lo}, {hi}]")]
    Resolution { n: u32, axis: usize, lo: i64, hi: i64 },

    /// Sampled data does not cover the required index set.
    #[error("data error: {0}")]
    Data(String),

    /// A per-resolution failure inside a sweep.
    #[error("at n={n}: {source}")]
    AtResolution {
        n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
