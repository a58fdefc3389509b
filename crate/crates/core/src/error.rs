use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema: {0}")]
    Schema(String),

    #[error("inconsistent input: {0}")]
    Inconsistency(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("input too large for exhaustive check: {0}")]
    Size(String),

    #[error("{}more than {limit} frequent itemsets; raise the cap or the threshold", class_prefix(.class))]
    CapExceeded { class: Option<usize>, limit: usize },

    #[error("unsupported scheme version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("model has {layers} layers but tree depth is {depth}")]
    Depth { layers: usize, depth: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("degenerate evaluation set: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn class_prefix(class: &Option<usize>) -> String {
    match class {
        Some(c) => format!("class {c}: "),
        None => String::new(),
    }
}

impl Error {
    /// Short machine-readable name, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::Inconsistency(_) => "InconsistencyError",
            Error::Argument(_) => "ArgumentError",
            Error::Size(_) => "SizeError",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::Version { .. } => "VersionError",
            Error::Shape(_) => "ShapeError",
            Error::Depth { .. } => "DepthError",
            Error::Config(_) => "ConfigError",
            Error::Degenerate(_) => "DegenerateError",
            Error::Io(_) => "IoError",
            Error::Json(_) => "ParseError",
        }
    }

    pub(crate) fn with_class(self, class: usize) -> Self {
        match self {
            Error::CapExceeded { limit, .. } => Error::CapExceeded {
                class: Some(class),
                limit,
            },
            other => other,
        }
    }
}
