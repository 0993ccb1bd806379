use serde::Serialize;

/// Failure of a run, with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    NumericDegeneracy,
    Capacity,
    Internal,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::NumericDegeneracy => 3,
            ErrorKind::Capacity => 4,
            ErrorKind::Internal => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }

    pub(crate) fn from_clap(e: clap::Error) -> Self {
        Self::config(e.to_string().trim().to_owned())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fermilearn::Error> for CliError {
    fn from(e: fermilearn::Error) -> Self {
        use fermilearn::Error as E;
        let kind = match &e {
            E::Capacity { .. } => ErrorKind::Capacity,
            E::NumericDegeneracy(_) => ErrorKind::NumericDegeneracy,
            E::OracleContract(_) => ErrorKind::Internal,
            _ => ErrorKind::Config,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::config(format!("i/o: {e}"))
    }
}
