//! Symbolic words over a chair alphabet and the word-file format.

mod chairset;
pub mod codec;
mod error;
mod expr;
mod system;

pub use chairset::ChairSet;
pub use codec::{parse, serialize, serialize_with_header};
pub use error::{WordError, WordResult};
pub use expr::{Mode, Node, Relabeling, WordExpr, DEFAULT_MATERIALIZE_CAP, MAX_DEPTH};
pub use system::{SystemKind, WordSystem};

/// A chair (output value) numbered from 1.
pub type Chair = u32;
