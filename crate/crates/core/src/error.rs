use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("paths are sampled on different grids")]
    GridMismatch,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("variable `{name}` exceeds the number of components N = {arity}")]
    Arity { name: String, arity: usize },

    #[error("cannot evaluate `{location}`: {message}")]
    Eval { location: String, message: String },

    #[error("at grid node {node}: {source}")]
    AtNode { node: usize, source: Box<Error> },

    #[error("in cell {cell}: {source}")]
    AtCell { cell: usize, source: Box<Error> },

    #[error("invalid problem: {0}")]
    Problem(String),

    #[error("boundary mode: {0}")]
    Mode(String),
}

impl Error {
    pub(crate) fn at_node(node: usize, source: Error) -> Self {
        Error::AtNode {
            node,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
