use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("malformed results table: {0}")]
    Malformed(String),

    /// Results were written, but some rows did not reach the requested tolerance.
    #[error("{flagged} of {total} sweep points did not meet the quadrature tolerance")]
    ToleranceUnmet { flagged: usize, total: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Malformed(_) => 1,
            CliError::ToleranceUnmet { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), reason: reason.into() }
    }

    /// Attach a library error to a config section, using the parameter name
    /// the library reports when there is one.
    pub(crate) fn from_core(section: &str, err: tdscatter_core::Error) -> Self {
        let field = match &err {
            tdscatter_core::Error::InvalidParameter { name, .. } => format!("{section}.{name}"),
            _ => section.to_string(),
        };
        CliError::Config { field, reason: err.to_string() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
