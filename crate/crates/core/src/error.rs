use std::path::PathBuf;

/// Errors raised while configuring or running a simulation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is out of range or inconsistent with the others.
    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("length mismatch: expected {expected} bits, found {found}")]
    Length { expected: usize, found: usize },

    #[error("degenerate landscape: global maximum is {0}")]
    DegenerateLandscape(f64),

    #[error("malformed landscape dump: {0}")]
    Format(String),

    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
