use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),
    #[error("name clash: `{0}` is already in use")]
    NameClash(String),
    #[error("guard exceeded: {what} is {actual}, limit is {limit}")]
    Guard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("search budget of {0} steps exhausted")]
    Budget(u64),
    #[error("invalid input: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    /// Prefixes the message of a vocabulary mismatch; other errors pass through.
    pub(crate) fn in_vocabulary_of(self, what: &str) -> Error {
        match self {
            Error::VocabularyMismatch(m) => Error::VocabularyMismatch(format!("target must be over the vocabulary of {what}: {m}")),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Guard {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}
