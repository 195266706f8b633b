use thiserror::Error;

/// Byte range into an input text; attached to parse diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {}..{}: {message}", span.start, span.end)]
    Parse { span: SourceSpan, message: String },
    #[error("predicate `{name}` used with arities {first} and {second}")]
    ArityConflict {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("element {value} out of range for domain of size {domain}")]
    ElementOutOfRange { value: usize, domain: usize },
    #[error("formula is not a fluted sentence: {0}")]
    NotFluted(String),
    #[error("propositional input (width 0); use the SAT core directly")]
    WidthZero,
    #[error("{what} requires {need}, exceeding the cap of {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        need: usize,
    },
    #[error("type level must be at least 2 to drop the first variable")]
    LevelTooLow,
    #[error("tetration result exceeds machine range")]
    Overflow,
    #[error("variable x{0} is unbound during evaluation")]
    UnboundVariable(usize),
    #[error("clause set is inconsistent with the given type")]
    Inconsistent,
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(span: SourceSpan, message: impl Into<String>) -> Self {
        Error::Parse {
            span,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
