use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] shoaltrack_core::Error),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::File { path: path.into(), source }
    }

    /// True when the failure is caused by the caller's input rather than by
    /// the environment or a numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        use shoaltrack_core::Error as E;
        match self {
            Self::Parse { .. } | Self::Input(_) => true,
            Self::File { source, .. } => matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::InvalidData | std::io::ErrorKind::IsADirectory
            ),
            Self::Core(e) => !matches!(e, E::SingularInnovation | E::RaggedMatrix { .. } | E::NonFiniteWeight { .. }),
        }
    }
}

pub type Result<T> = std::result::Result<T, IoError>;
