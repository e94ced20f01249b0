use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{cat, ConstructError, ConstructResult};
use crate::util::Execution;
use crate::verify::{longest_schedule, VerifyError, VerifyOptions};
use crate::word::{Mode, SystemKind, WordExpr, WordSystem, DEFAULT_MATERIALIZE_CAP};

/// Schedule-length bound used to pad short words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionT {
    /// One more than the longest schedule of any `n` words, computed exactly.
    Auto,
    Explicit(BigUint),
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub system: WordSystem,
    pub t: BigUint,
    /// Longest schedule over all `n`-subsets, when computed.
    pub longest: Option<BigUint>,
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// `w` when it has at least `t` letters, else the first `t` letters of a power of `w`.
fn pad(w: &WordExpr, t: &BigUint) -> ConstructResult<WordExpr> {
    if w.len() >= t {
        return Ok(w.clone());
    }
    let (q, rem) = t.div_rem(w.len());
    let mut parts = vec![WordExpr::power(w.clone(), q)?];
    if !rem.is_zero() {
        let rem = rem
            .to_u64()
            .filter(|&r| r <= DEFAULT_MATERIALIZE_CAP as u64)
            .ok_or_else(|| {
                ConstructError::CapExceeded(format!("padding prefix of {rem} letters"))
            })?;
        let letters = (0..rem)
            .map(|i| w.at_u64(i, Mode::Linear))
            .collect::<Result<Vec<_>, _>>()?;
        parts.push(WordExpr::literal(&letters)?);
    }
    Ok(cat(parts)?)
}

/// Append one word to a system in which every `players` words are oblivious.
/// The new word is the concatenation of the first `players` words, each
/// padded to at least `t` letters.
pub fn extend_system(
    system: &WordSystem,
    players: usize,
    t: ExtensionT,
    opts: &VerifyOptions,
    exec: Execution,
) -> ConstructResult<Extension> {
    if system.kind() != SystemKind::Mc {
        return Err(ConstructError::BadParameter(
            "only musical-chairs systems extend".into(),
        ));
    }
    if players == 0 || players > system.len() {
        return Err(ConstructError::BadParameter(format!(
            "players must be in 1..={}, got {players}",
            system.len()
        )));
    }
    system.ensure_distinct()?;
    let (t, longest) = match t {
        ExtensionT::Explicit(t) => (t, None),
        ExtensionT::Auto => {
            let subsets = combinations(system.len(), players);
            let results = exec.map(subsets.len(), |i| {
                longest_schedule(system, &subsets[i], opts)
            });
            let mut best = BigUint::zero();
            for (subset, r) in subsets.iter().zip(results) {
                match r {
                    Ok(l) => best = best.max(l.total),
                    Err(VerifyError::NotOblivious) => {
                        return Err(ConstructError::NotOblivious {
                            subset: subset.clone(),
                        })
                    }
                    Err(VerifyError::CapExceeded { states, cap }) => {
                        return Err(ConstructError::CapExceeded(format!(
                            "words {subset:?} span {states} configurations, cap {cap}"
                        )))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            (&best + 1u32, Some(best))
        }
    };
    if t.is_zero() {
        return Err(ConstructError::BadParameter("t must be positive".into()));
    }
    let parts = system.words()[..players]
        .iter()
        .map(|w| pad(w, &t))
        .collect::<ConstructResult<Vec<_>>>()?;
    let new_word = cat(parts)?;
    let mut words = system.words().to_vec();
    words.push(new_word);
    let mut labels = system.labels().to_vec();
    let mut k = words.len();
    while labels.contains(&format!("w{k}")) {
        k += 1;
    }
    labels.push(format!("w{k}"));
    let name = if system.name().is_empty() {
        "extended".to_string()
    } else {
        format!("{} +1", system.name())
    };
    let extended = WordSystem::with_labels(system.m(), SystemKind::Mc, labels, words)?.named(name);
    extended.ensure_distinct()?;
    Ok(Extension {
        system: extended,
        t,
        longest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(c: &[u32]) -> WordExpr {
        WordExpr::literal(c).unwrap()
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(5, 3).len(), 10);
    }

    #[test]
    fn padding_truncates_a_power() {
        let w = lit(&[1, 2, 3]);
        assert_eq!(
            pad(&w, &BigUint::from(7u32))
                .unwrap()
                .materialize(100)
                .unwrap(),
            vec![1, 2, 3, 1, 2, 3, 1]
        );
        assert_eq!(
            pad(&w, &BigUint::from(6u32))
                .unwrap()
                .materialize(100)
                .unwrap(),
            vec![1, 2, 3, 1, 2, 3]
        );
        assert!(pad(&w, &BigUint::from(2u32)).unwrap().ptr_eq(&w));
    }

    #[test]
    fn long_words_concatenate_unchanged() {
        let s = WordSystem::new(3, SystemKind::Mc, vec![lit(&[1, 2, 3]), lit(&[1, 3, 2])]).unwrap();
        let e = extend_system(
            &s,
            2,
            ExtensionT::Explicit(BigUint::from(2u32)),
            &VerifyOptions::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(e.system.len(), 3);
        assert_eq!(
            e.system.word(2).materialize(100).unwrap(),
            vec![1, 2, 3, 1, 3, 2]
        );
    }

    #[test]
    fn identical_words_are_rejected() {
        let s = WordSystem::new(2, SystemKind::Mc, vec![lit(&[1, 2]), lit(&[1, 2])]).unwrap();
        assert!(matches!(
            extend_system(
                &s,
                2,
                ExtensionT::Auto,
                &VerifyOptions::default(),
                Execution::Sequential
            ),
            Err(ConstructError::Word(_))
        ));
    }

    #[test]
    fn non_oblivious_subsets_are_reported() {
        let s = WordSystem::new(2, SystemKind::Mc, vec![lit(&[1, 2]), lit(&[2, 1])]).unwrap();
        assert_eq!(
            extend_system(
                &s,
                2,
                ExtensionT::Auto,
                &VerifyOptions::default(),
                Execution::Sequential
            )
            .unwrap_err(),
            ConstructError::NotOblivious { subset: vec![0, 1] }
        );
    }
}
