use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] timekk::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 usage or configuration, 3 sign-ambiguous, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use timekk::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                E::SignAmbiguous { .. } => 3,
                E::InvalidGrid(_) | E::InvalidParameter(_) | E::NotCyclic(_) | E::Parse(_) | E::Io(_) => 2,
                _ => 4,
            },
            CliError::Json(_) => 4,
        }
    }
}

impl CliError {
    pub fn is_broken_pipe(&self) -> bool {
        use std::io::ErrorKind::BrokenPipe;
        match self {
            CliError::Io(e) | CliError::Core(timekk::Error::Io(e)) => e.kind() == BrokenPipe,
            CliError::Json(e) => e.io_error_kind() == Some(BrokenPipe),
            _ => false,
        }
    }
}
