use thiserror::Error;

use crate::classical::ClassicalError;
use crate::cli::ConfigError;
use crate::matexp::MatexpError;
use crate::quantum::QuantumError;
use crate::sensan::SensanError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Matexp(#[from] MatexpError),
    #[error(transparent)]
    Sensan(#[from] SensanError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
