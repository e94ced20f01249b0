//! Oblivious musical-chairs and renaming protocols.
//!
//! Players walk cyclic words over a chair alphabet and only ever learn one
//! bit: whether somebody else sits on their chair. This crate builds word
//! systems, simulates the adversarial schedulers that drive them, and decides
//! obliviousness exactly by cycle detection over the configuration digraph.

pub mod analysis;
pub mod construct;
pub mod sim;
pub mod util;
pub mod verify;
pub mod word;

pub use util::Execution;
