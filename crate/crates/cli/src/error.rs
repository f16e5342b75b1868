use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("numerical tolerance not met: {0}")]
    Tolerance(String),

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Wrap a library error raised while checking the value at `key`.
    pub fn at(key: &str) -> impl FnOnce(nearfocus::Error) -> CliError + '_ {
        move |e| match e {
            nearfocus::Error::Domain(m) => CliError::config(key, m),
            other => CliError::from(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Tolerance(_) => 3,
            CliError::Io(_) | CliError::Model(_) => 1,
        }
    }
}

impl From<nearfocus::Error> for CliError {
    fn from(e: nearfocus::Error) -> Self {
        match e {
            nearfocus::Error::ToleranceNotMet { .. } => CliError::Tolerance(e.to_string()),
            nearfocus::Error::Domain(m) => CliError::Model(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
