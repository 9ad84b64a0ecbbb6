use std::fmt::Display;
use std::path::Path;

/// CLI-level failure. Usage errors exit with 1, data errors with 2.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{origin}: {message}")]
    Data { origin: String, message: String },
}

impl Error {
    pub fn usage(message: impl Display) -> Self {
        Error::Usage(message.to_string())
    }

    pub fn data(origin: impl Display, message: impl Display) -> Self {
        Error::Data {
            origin: origin.to_string(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::data(path.display(), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::data(path.display(), e))
}
