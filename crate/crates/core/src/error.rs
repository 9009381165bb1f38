use thiserror::Error;

use crate::schema::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed JSON pointer `{0}`")]
    PointerSyntax(String),
    #[error("JSON pointer `{0}` does not resolve")]
    PointerNotFound(String),
    #[error("recursive or circular $ref `{0}`")]
    RecursiveRef(String),
    #[error("$ref target `{0}` is missing")]
    RefTargetMissing(String),
    #[error("unsupported pattern `{pattern}`: {reason}")]
    UnsupportedPattern { pattern: String, reason: String },
    #[error("schema does not conform to the draft-04 meta-schema: {0}")]
    MetaInvalid(ValidationReport),
    #[error("invalid JSON: {0}")]
    Parse(String),
    #[error("capacity limit exceeded: {0}")]
    Capacity(String),
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn unsupported(pattern: &str, reason: impl Into<String>) -> Self {
        Error::UnsupportedPattern {
            pattern: pattern.to_string(),
            reason: reason.into(),
        }
    }
}
