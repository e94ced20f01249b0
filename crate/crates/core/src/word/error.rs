use num_bigint::BigUint;
use thiserror::Error;

use super::Chair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("literal must contain at least one chair")]
    EmptyLiteral,

    #[error("concatenation needs at least one operand")]
    EmptyConcat,

    #[error("exponent must be at least 1")]
    ZeroExponent,

    #[error("restriction keeps no letters of the word")]
    EmptyRestriction,

    #[error("chair {chair} is outside 1..={m}")]
    BadChair { chair: i64, m: u32 },

    #[error("relabeling is not injective on chair {chair}")]
    NotInjective { chair: Chair },

    #[error("relabeling has no image for chair {chair}")]
    UnmappedChair { chair: Chair },

    #[error("expression depth exceeds the cap of {cap}")]
    DepthCap { cap: usize },

    #[error("index {index} out of range for word of length {len}")]
    OutOfRange { index: BigUint, len: BigUint },

    #[error("word of length {0} exceeds the materialization cap")]
    TooLong(BigUint),

    #[error("words {first} and {second} are letter-for-letter identical")]
    IdenticalWords { first: usize, second: usize },

    #[error("a word system needs at least one word")]
    NoWords,

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: undefined name `{name}`")]
    UndefinedName {
        line: usize,
        column: usize,
        name: String,
    },

    #[error("relabeling of this word cannot be written in the word file format")]
    Unserializable,
}

pub type WordResult<T> = Result<T, WordError>;
