use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("site count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("lambda = {0} lies outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("variational AGP action is singular (denominator {0:e})")]
    SingularAction(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("{what}: {requested} sites exceeds the limit of {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("graph contains a triangle ({0}, {1}, {2}); triangle-free statistics do not apply")]
    NotTriangleFree(usize, usize, usize),

    #[error("empty sample set")]
    EmptySamples,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
