use num_bigint::BigUint;
use num_traits::Zero;

use super::extend::extend_system;
use super::{build_recursive, ConstructError, ConstructResult, ExtensionT};
use crate::util::Execution;
use crate::verify::VerifyOptions;
use crate::word::{SystemKind, WordExpr, WordSystem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponents {
    Auto,
    List(Vec<BigUint>),
}

#[derive(Clone, Debug)]
pub struct RenamingSystem {
    pub system: WordSystem,
    pub exponents: Vec<BigUint>,
    /// `levels[ν - 1]` holds the `N` words used for segment `ν`.
    pub levels: Vec<WordSystem>,
}

/// `N` words on `2n - 1` chairs, every `n` of which are oblivious.
fn level_family(
    n: usize,
    big_n: usize,
    opts: &VerifyOptions,
    exec: Execution,
) -> ConstructResult<WordSystem> {
    if n == 1 {
        let one = WordExpr::literal(&[1])?;
        return Ok(WordSystem::new(1, SystemKind::Mc, vec![one; big_n])?);
    }
    let mut sys = build_recursive(n)?.s_system;
    while sys.len() < big_n {
        sys = extend_system(&sys, n, ExtensionT::Auto, opts, exec)?.system;
    }
    Ok(sys)
}

/// `l_1 = 1` and `l_n = 1 + Σ_{ν<n} l_ν · max_i |π_{i,ν}| · N`.
pub fn auto_exponents(levels: &[WordSystem]) -> Vec<BigUint> {
    let big_n = levels.len();
    let mut out: Vec<BigUint> = Vec::with_capacity(big_n);
    for n in 0..big_n {
        let mut l = BigUint::from(1u32);
        for nu in 0..n {
            let longest = levels[nu].words().iter().map(|w| w.len()).max().unwrap();
            l += &out[nu] * longest * big_n;
        }
        out.push(l);
    }
    out
}

/// Words on `2N - 1` chairs such that any `k` of them, started on their first
/// letters, end safely on chairs `1..=2k-1`. Word `i` is the concatenation
/// over levels `ν` of `π_{i,ν}` raised to `l_ν`.
pub fn build_renaming(
    big_n: usize,
    exponents: Exponents,
    opts: &VerifyOptions,
    exec: Execution,
) -> ConstructResult<RenamingSystem> {
    if big_n == 0 {
        return Err(ConstructError::BadParameter("N must be at least 1".into()));
    }
    let levels = (1..=big_n)
        .map(|n| level_family(n, big_n, opts, exec))
        .collect::<ConstructResult<Vec<_>>>()?;
    let exponents = match exponents {
        Exponents::Auto => auto_exponents(&levels),
        Exponents::List(l) => {
            if l.len() != big_n || l.iter().any(|e| e.is_zero()) {
                return Err(ConstructError::BadParameter(format!(
                    "need {big_n} positive exponents, got {l:?}"
                )));
            }
            l
        }
    };
    let mut words = Vec::with_capacity(big_n);
    for i in 0..big_n {
        let segments = levels
            .iter()
            .zip(&exponents)
            .map(|(lv, l)| WordExpr::power(lv.word(i).clone(), l.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        words.push(super::cat(segments)?);
    }
    let system = WordSystem::new(2 * big_n as u32 - 1, SystemKind::Renaming, words)?
        .named(format!("renaming N={big_n}"));
    Ok(RenamingSystem {
        system,
        exponents,
        levels,
    })
}
