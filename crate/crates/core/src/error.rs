use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("free group rank must be positive")]
    ZeroRank,
    #[error("letter {letter} is outside a free group of rank {rank}")]
    LetterOutOfRange { letter: i32, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("parse error at column {column}: expected a generator of the form {expected}")]
    WrongAlphabet { column: usize, expected: &'static str },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("endomorphism is not invertible")]
    NotInvertible,
    #[error("automorphism is not in IA: image of x{index} has degree {degree}")]
    NotIA { index: usize, degree: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
