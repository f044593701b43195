use thiserror::Error;

/// Errors produced by automaton construction, the reductions and the deciders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("state `{0}` is not declared")]
    UnknownState(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("automaton is cyclic on a trim path")]
    Cyclic,
    #[error("malformed protocol: {0}")]
    Malformed(String),
    #[error("protocol has no reset operation")]
    MissingReset,
    #[error("bad bounds: {0}")]
    Bounds(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
