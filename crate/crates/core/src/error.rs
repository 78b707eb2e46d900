use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("differential does not square to zero")]
    NotAComplex,
    #[error("map is not a chain map")]
    NotChainMap,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed arc diagram: {0}")]
    Malformed(String),
    #[error("result does not re-symmetrize: {0}")]
    Symmetrize(String),
    #[error("incompatible structures: {0}")]
    Incompatible(String),
    #[error("structure equation fails: {0}")]
    Structure(String),
    #[error("unbounded iteration: {0}")]
    Unbounded(String),
    #[error("not DG-type: {0}")]
    NotDgType(String),
    #[error("bad descriptor: {0}")]
    Descriptor(String),
    #[error("diagram construction: {0}")]
    Diagram(String),
}

pub type Result<T> = std::result::Result<T, Error>;
