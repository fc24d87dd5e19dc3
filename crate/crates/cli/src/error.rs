use std::fmt;

/// Failure classes of the experiment runner, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver diverged: {0}")]
    Divergence(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Divergence(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub(crate) fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<tiktv::Error> for CliError {
    fn from(e: tiktv::Error) -> Self {
        use tiktv::Error as E;
        match e {
            E::Divergence { .. } | E::NonFinite(_) | E::ZeroPivot(_) => CliError::Divergence(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
