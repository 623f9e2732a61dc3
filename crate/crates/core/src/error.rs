use thiserror::Error;

/// Errors produced while reading data, learning models, or evaluating them.
#[derive(Debug, Error)]
pub enum PctError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("class hierarchy contains a cycle through `{0}`")]
    HierarchyCycle(String),

    #[error("class `{0}` is defined more than once")]
    DuplicateClass(String),

    #[error("at least 2 labeled examples are required, found {found}")]
    NoLabeledData { found: usize },

    #[error("no tree has a labeled out-of-bag example")]
    EmptyOob,

    #[error("fold {fold} leaves {remaining} labeled training examples (need at least 2)")]
    TooFewLabeled { fold: usize, remaining: usize },

    #[error("ground truth contains no positive labels")]
    NoPositiveLabels,

    #[error("need at least {needed} non-zero paired differences, found {found}")]
    InsufficientPairs { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model file at line {line}: {message}")]
    InvalidModel { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PctError> = std::result::Result<T, E>;

impl PctError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        PctError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        PctError::InvalidConfig(message.into())
    }
}
