use dqd_core::Error as CoreError;
use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e.root() {
                CoreError::Domain { .. } | CoreError::Invalid(_) => EXIT_USAGE,
                CoreError::StepGuard { .. }
                | CoreError::TrajectoryTooShort { .. }
                | CoreError::NoDecoherence => EXIT_NUMERICAL,
                CoreError::SweepPoint { .. } => unreachable!("root() unwraps sweep points"),
            },
        }
    }
}
