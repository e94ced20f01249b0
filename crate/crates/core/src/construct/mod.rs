//! Word-system generators.
//!
//! Everything here returns symbolic [`WordExpr`]s; nothing is materialized
//! except where the construction itself asks for explicit letters.

mod algebraic;
mod extend;
mod random;
mod renaming;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::verify::VerifyError;
use crate::word::{SystemKind, WordError, WordExpr, WordSystem};

pub use algebraic::{build_algebraic_perms, is_prime, AlgebraicFamily, ALGEBRAIC_LETTER_CAP};
pub(crate) use extend::combinations;
pub use extend::{extend_system, Extension, ExtensionT};
pub use random::{sample_random_permutations, sample_random_words, RandomSystem};
pub use renaming::{auto_exponents, build_renaming, Exponents, RenamingSystem};

/// Default recursion budget of [`build_recursive`].
pub const DEFAULT_RECURSION_BUDGET: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("level {n} exceeds the recursion budget of {budget}")]
    DepthCap { n: usize, budget: usize },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("construction exceeds a resource cap: {0}")]
    CapExceeded(String),

    #[error("players {subset:?} do not form an oblivious system")]
    NotOblivious { subset: Vec<usize> },

    #[error(transparent)]
    Verify(#[from] VerifyError),

    #[error(transparent)]
    Word(#[from] WordError),
}

pub type ConstructResult<T> = Result<T, ConstructError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `n` words on `2n - 1` chairs.
    S,
    /// `n` words on `2n` chairs.
    W,
}

/// Both word families of one recursion level.
#[derive(Clone, Debug)]
pub struct RecursivePair {
    pub n: usize,
    pub s_system: WordSystem,
    pub w_system: WordSystem,
}

impl RecursivePair {
    pub fn side(&self, side: Side) -> &WordSystem {
        match side {
            Side::S => &self.s_system,
            Side::W => &self.w_system,
        }
    }
}

fn cat(mut parts: Vec<WordExpr>) -> Result<WordExpr, WordError> {
    if parts.len() == 1 {
        Ok(parts.pop().unwrap())
    } else {
        WordExpr::concat(parts)
    }
}

/// One half-step of the recursion: from `n` words, shifted up by one chair,
/// build `first = 1 ⊗ (v1 ∘ .. ∘ vn)^(2r)` and `v_{i-1}^(k r) ∘ 1` for the
/// remaining `count - 1` words, with `r = 2 * level + 1`.
fn lift(words: &[WordExpr], count: usize, level: usize) -> Result<Vec<WordExpr>, WordError> {
    let shifted = words
        .iter()
        .map(|w| WordExpr::shift(w.clone(), 1))
        .collect::<Result<Vec<_>, _>>()?;
    let k: BigUint = shifted.iter().map(|w| w.len()).sum();
    let r = 2 * level as u64 + 1;
    let one = WordExpr::literal(&[1])?;
    let mut out = Vec::with_capacity(count);
    out.push(WordExpr::interleave(
        1,
        WordExpr::power(cat(shifted.clone())?, 2 * r)?,
    )?);
    for w in shifted.iter().take(count - 1) {
        out.push(WordExpr::concat(vec![
            WordExpr::power(w.clone(), &k * r)?,
            one.clone(),
        ])?);
    }
    Ok(out)
}

fn labelled(
    prefix: &str,
    m: u32,
    words: Vec<WordExpr>,
    name: String,
) -> Result<WordSystem, WordError> {
    let labels = (1..=words.len()).map(|i| format!("{prefix}{i}")).collect();
    Ok(WordSystem::with_labels(m, SystemKind::Mc, labels, words)?.named(name))
}

/// The recursive families at level `n`: `s` on `2n - 1` chairs and `w` on
/// `2n` chairs, `n` words each.
pub fn build_recursive(n: usize) -> ConstructResult<RecursivePair> {
    build_recursive_with_budget(n, DEFAULT_RECURSION_BUDGET)
}

pub fn build_recursive_with_budget(n: usize, budget: usize) -> ConstructResult<RecursivePair> {
    if n == 0 {
        return Err(ConstructError::BadParameter("n must be at least 1".into()));
    }
    if n > budget {
        return Err(ConstructError::DepthCap { n, budget });
    }
    let mut s = vec![WordExpr::literal(&[1, 1])?];
    let mut w = vec![WordExpr::literal(&[1, 1, 2, 2])?];
    for level in 1..n {
        // level words w on {1..2 level} give level+1 words s on {1..2 level + 1}
        s = lift(&w, level + 1, level)?;
        // and those give level+1 words w on {1..2 level + 2}
        w = lift(&s, level + 1, level + 1)?;
    }
    let m = 2 * n as u32;
    Ok(RecursivePair {
        n,
        s_system: labelled("s", m - 1, s, format!("recursive-s n={n}"))?,
        w_system: labelled("w", m, w, format!("recursive-w n={n}"))?,
    })
}
