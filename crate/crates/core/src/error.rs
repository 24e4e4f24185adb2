use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error at line {line} ({section}): {message}")]
    Parse {
        line: usize,
        section: &'static str,
        message: String,
    },

    #[error("internal state error: {0}")]
    InternalState(String),

    #[error("method {method} is not applicable: {reason}")]
    MethodInapplicable {
        method: &'static str,
        reason: String,
    },

    #[error("coherence undefined for topic {topic}: word {word} has zero document frequency")]
    MetricUndefined { topic: usize, word: u32 },

    #[error("intrusion task generation failed: {0}")]
    Generation(String),

    #[error("word pair ({0}, {1}) is not tracked; rebuild the document-frequency index with these words tracked")]
    UntrackedPair(u32, u32),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, section: &'static str, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            section,
            message: message.into(),
        }
    }
}
