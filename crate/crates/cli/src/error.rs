use std::fmt;

use serde::Serialize;

/// Failure category; each has a fixed exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Parse,
    Domain,
    Budget,
    EmptyRegion,
    Other,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Domain => 3,
            ErrorKind::Budget => 4,
            ErrorKind::EmptyRegion => 5,
            ErrorKind::Other => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Parse,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Domain,
            message: message.into(),
        }
    }

    pub fn other(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Other,
            message: message.into(),
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<biased_usf::Error> for CliError {
    fn from(e: biased_usf::Error) -> Self {
        use biased_usf::Error as E;
        let kind = match &e {
            E::Budget { .. } => ErrorKind::Budget,
            E::EmptyRegion { .. } => ErrorKind::EmptyRegion,
            E::Parse { .. } => ErrorKind::Parse,
            _ => ErrorKind::Domain,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::other(e.to_string())
    }
}
