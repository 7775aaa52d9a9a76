use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("query node not found: {0}")]
    NodeNotFound(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible query: {0}")]
    Infeasible(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Machine-readable reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse_error",
            Error::Schema(_) => "schema_error",
            Error::NodeNotFound(_) => "query node not found",
            Error::Contract(_) => "contract_violation",
            Error::Config(_) => "invalid_config",
            Error::Infeasible(_) => "infeasible_query",
            Error::Budget(_) => "budget_exhausted",
            Error::Io(_) => "io_error",
        }
    }
}
