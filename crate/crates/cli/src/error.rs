use blockext_core::Error as EngineError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const RESOURCE_BOUND: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) if e.is_resource_bound() => exit::RESOURCE_BOUND,
            CliError::Engine(EngineError::CrossCheckMismatch { .. }) => exit::VERIFICATION_FAILED,
            _ => exit::INPUT_ERROR,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Parse { .. } => "ParseError".into(),
            CliError::Usage(_) => "UsageError".into(),
            CliError::Io { .. } => "IoError".into(),
            CliError::Engine(e) => {
                let debug = format!("{e:?}");
                debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("EngineError").to_string()
            }
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

/// The JSON body printed for a failed command.
#[derive(Debug, Serialize)]
pub struct ErrorDocument {
    pub format: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl From<&CliError> for ErrorDocument {
    fn from(e: &CliError) -> Self {
        let (line, column) = match e {
            CliError::Parse { line, col, .. } => (Some(*line), Some(*col)),
            _ => (None, None),
        };
        ErrorDocument { format: 1, error: ErrorBody { kind: e.kind(), message: e.to_string(), line, column } }
    }
}
