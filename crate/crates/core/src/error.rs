use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("incompatible torus: {0}")]
    Compatibility(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
