use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("atom `{atom}` occurs more than once in rule {rule}")]
    DuplicateAtom { rule: String, atom: String },
    #[error("empty rule at line {line}")]
    EmptyRule { line: usize },
    #[error("rule {rule} cannot be normalized: {reason}")]
    NotNormalizable { rule: String, reason: String },
    #[error("atom `{atom}` does not occur in rule {rule}")]
    NotInRule { rule: String, atom: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource limit: {0}")]
    Budget(String),
    #[error("witness verification failed: {0}")]
    Verification(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
