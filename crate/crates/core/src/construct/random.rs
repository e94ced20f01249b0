use rand::seq::SliceRandom;
use rand::Rng;

use super::{ConstructError, ConstructResult};
use crate::util::{self, RNG_NAME};
use crate::word::{Chair, SystemKind, WordExpr, WordSystem};

/// A sampled system together with the parameters that reproduce it.
#[derive(Clone, Debug)]
pub struct RandomSystem {
    pub system: WordSystem,
    /// `full[i]` iff word `i` contains every chair.
    pub full: Vec<bool>,
    pub params: Vec<(String, String)>,
    pub seed: u64,
}

impl RandomSystem {
    pub fn all_full(&self) -> bool {
        self.full.iter().all(|&f| f)
    }

    /// Comment lines for the word file.
    pub fn header(&self) -> Vec<String> {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        vec![
            format!("generator: {}", self.system.name()),
            format!("params: {}", params.join(" ")),
            format!("seed: {}", self.seed),
            format!("rng: {RNG_NAME}"),
        ]
    }
}

fn finish(system: WordSystem, params: Vec<(String, String)>, seed: u64) -> RandomSystem {
    let full = system.full_words();
    RandomSystem {
        system,
        full,
        params,
        seed,
    }
}

/// `big_n` words of `len` letters drawn independently and uniformly from `1..=m`.
/// `n` is the intended number of active players; it is only recorded.
pub fn sample_random_words(
    big_n: usize,
    n: usize,
    m: u32,
    len: usize,
    seed: u64,
) -> ConstructResult<RandomSystem> {
    if big_n == 0 || n == 0 || n > big_n || m == 0 || len == 0 {
        return Err(ConstructError::BadParameter(format!(
            "need N >= n >= 1, m >= 1, L >= 1 (got N={big_n} n={n} m={m} L={len})"
        )));
    }
    let mut rng = util::rng(seed);
    let mut words = Vec::with_capacity(big_n);
    for _ in 0..big_n {
        let letters: Vec<Chair> = (0..len).map(|_| rng.gen_range(1..=m)).collect();
        words.push(WordExpr::literal(&letters)?);
    }
    let system = WordSystem::new(m, SystemKind::Mc, words)?.named("random-words");
    let params = vec![
        ("N".into(), big_n.to_string()),
        ("n".into(), n.to_string()),
        ("m".into(), m.to_string()),
        ("L".into(), len.to_string()),
    ];
    Ok(finish(system, params, seed))
}

/// `big_n` independent uniform permutations of `1..=m`.
pub fn sample_random_permutations(
    big_n: usize,
    m: u32,
    seed: u64,
) -> ConstructResult<RandomSystem> {
    if big_n == 0 || m == 0 {
        return Err(ConstructError::BadParameter(format!(
            "need N >= 1, m >= 1 (got N={big_n} m={m})"
        )));
    }
    let mut rng = util::rng(seed);
    let mut words = Vec::with_capacity(big_n);
    for _ in 0..big_n {
        let mut perm: Vec<Chair> = (1..=m).collect();
        perm.shuffle(&mut rng);
        words.push(WordExpr::literal(&perm)?);
    }
    let system = WordSystem::new(m, SystemKind::Mc, words)?.named("random-perms");
    let params = vec![("N".into(), big_n.to_string()), ("m".into(), m.to_string())];
    Ok(finish(system, params, seed))
}
