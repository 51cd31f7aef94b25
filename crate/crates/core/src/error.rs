use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error(
        "pool too small for split {split}: {required} sentences required, {available} available"
    )]
    PoolTooSmall {
        split: String,
        required: usize,
        available: usize,
    },

    #[error("{0}")]
    Empty(String),

    #[error("duplicate vocabulary token {token:?} on lines {first} and {second}")]
    DuplicateToken {
        token: String,
        first: usize,
        second: usize,
    },

    #[error("{what} not loaded; required by the {kind} intervention")]
    MissingResource { what: &'static str, kind: String },

    #[error("unknown intervention kind {0:?}")]
    UnknownKind(String),

    #[error("invalid affix cycle: {0}")]
    AffixCycle(String),

    #[error("dangling synset reference {pos}:{offset:08} from {from}")]
    DanglingSynset {
        pos: char,
        offset: u64,
        from: String,
    },

    #[error("prediction alignment: {0}")]
    Alignment(String),

    #[error("no baseline (None) cell for model {model:?}, data {data:?}")]
    MissingBaseline { model: String, data: String },

    #[error("baseline {metric} is zero for model {model:?}, data {data:?}")]
    ZeroBaseline {
        metric: String,
        model: String,
        data: String,
    },

    #[error("plugin: {0}")]
    Plugin(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
