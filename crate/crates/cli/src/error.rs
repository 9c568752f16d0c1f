use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: arguments, files, expressions or problem definitions.
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] fracvar::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError::Invalid(message.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
