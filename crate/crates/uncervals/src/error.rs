use std::path::PathBuf;

use serde_json::json;

/// Errors surfaced by the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row}: {message}")]
    Parse { path: PathBuf, row: usize, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] uncervals_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl std::fmt::Display) -> Self {
        CliError::Format { path: path.into(), message: message.to_string() }
    }

    /// 2 for usage and configuration problems, 3 for unreadable or invalid
    /// input, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use uncervals_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Format { .. } => 3,
            CliError::Core(e) => match e {
                E::InvalidConfig(_) | E::InvalidSplit(_) => 2,
                E::InvalidObservation { .. } | E::DimensionMismatch { .. } | E::EmptyDataset => 3,
                E::Fit(_) | E::NonFinite(_) | E::Invariant(_) => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "usage",
            3 => "io",
            _ => "numeric",
        }
    }

    /// Single-line JSON form written to stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        let io = CliError::io("a.csv", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(io.exit_code(), 3);
        let fit: CliError = uncervals_core::Error::Fit("diverged".into()).into();
        assert_eq!(fit.exit_code(), 4);
        let v: serde_json::Value = serde_json::from_str(&fit.to_json()).unwrap();
        assert_eq!(v["error"], "numeric");
        assert_eq!(v["exit_code"], 4);
    }
}
