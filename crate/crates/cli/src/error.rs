use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: line {line}: {message}", path.display())]
    Input { path: PathBuf, line: u64, message: String },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] entrank_core::Error),

    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{failed} of {total} records failed; first: {first}")]
    Records { failed: usize, total: usize, first: Box<CliError> },
}

impl CliError {
    pub const VALIDATION: i32 = 2;
    pub const RESOURCE_GUARD: i32 = 3;
    pub const IO: i32 = 4;

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use entrank_core::Error as E;
        match self {
            Self::Input { .. } | Self::Validation(_) => Self::VALIDATION,
            Self::Core(E::ResourceGuard { .. }) => Self::RESOURCE_GUARD,
            Self::Core(E::Io(_) | E::CacheFormat { .. }) | Self::File { .. } | Self::Io(_) => Self::IO,
            Self::Core(_) => Self::VALIDATION,
            Self::Records { first, .. } => first.exit_code(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::File { path, source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let guard = entrank_core::Error::ResourceGuard { what: "x", required: 2, cap: 1 };
        assert_eq!(CliError::from(guard).exit_code(), 3);
        assert_eq!(CliError::Validation("bad".into()).exit_code(), 2);
        assert_eq!(CliError::from(entrank_core::Error::NoNucleotides).exit_code(), 2);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::from(io).exit_code(), 4);
        let nested = CliError::Records {
            failed: 1,
            total: 3,
            first: Box::new(entrank_core::Error::ResourceGuard { what: "x", required: 2, cap: 1 }.into()),
        };
        assert_eq!(nested.exit_code(), 3);
    }
}
