use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: {value} is outside the open interval ({lo}, {hi})")]
    Domain {
        what: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("numerical failure: {msg} (residual {residual:e})")]
    Numeric { msg: String, residual: f64 },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("precision loss: {0}")]
    Precision(String),

    #[error("optimization failed after {iters} iterations: {msg} (gradient norm {grad_norm:e})")]
    Optimization {
        msg: String,
        iters: usize,
        grad_norm: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at {pointer}: {msg}")]
    Parse { pointer: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what: what.into(),
            value,
            lo,
            hi,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
