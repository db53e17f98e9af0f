use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid data: {0}")]
    Data(String),

    /// A particle could not be moved back outside every obstacle.
    #[error("simulation step failed: {0}")]
    Step(String),

    /// Exhaustive enumeration would visit more candidates than the guard allows.
    #[error("infeasible enumeration: {required} candidates exceed the limit of {limit}")]
    Infeasible { required: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache checksum mismatch in {0}")]
    Checksum(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
