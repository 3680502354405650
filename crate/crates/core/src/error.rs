use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("rejected input: {what}{}", index.map(|i| format!(" (index {i})")).unwrap_or_default())]
    RejectedInput { what: String, index: Option<usize> },

    #[error("divergent series: {0}")]
    DivergentSeries(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl HardyError {
    pub(crate) fn rejected(what: impl Into<String>) -> Self {
        HardyError::RejectedInput {
            what: what.into(),
            index: None,
        }
    }

    pub(crate) fn rejected_at(what: impl Into<String>, index: usize) -> Self {
        HardyError::RejectedInput {
            what: what.into(),
            index: Some(index),
        }
    }

    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            HardyError::RejectedInput { .. } => "RejectedInput",
            HardyError::DivergentSeries(_) => "DivergentSeries",
            HardyError::ZeroDenominator(_) => "ZeroDenominator",
            HardyError::NonFinite(_) => "NonFinite",
            HardyError::SearchFailed(_) => "SearchFailed",
            HardyError::Parse { .. } => "ParseError",
            HardyError::Io(_) => "IoError",
        }
    }

    /// Process exit code for the CLI: 2 for divergent or ill-posed input,
    /// 3 for parse and validation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            HardyError::DivergentSeries(_)
            | HardyError::ZeroDenominator(_)
            | HardyError::NonFinite(_)
            | HardyError::SearchFailed(_) => 2,
            HardyError::RejectedInput { .. } | HardyError::Parse { .. } | HardyError::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, HardyError>;
