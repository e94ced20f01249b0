//! Exhaustive search for small oblivious systems.
//!
//! Tuples are unordered sets of distinct full words; two tuples related by a
//! simultaneous relabeling of the chairs are checked once (the lexicographically
//! least image under all of `S_m` is the representative).

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{verify_mc, Verdict, VerifyError, VerifyOptions, VerifyResult};
use crate::util::Execution;
use crate::word::{Chair, SystemKind, WordExpr, WordSystem};

/// Largest number of candidate words the search will enumerate.
const MAX_CANDIDATES: u64 = 5_000_000;
const CHUNK: usize = 4096;

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub n: usize,
    pub m: u32,
    pub max_len: usize,
    /// Maximum number of tuples examined.
    pub budget: u64,
    pub state_cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    pub m: u32,
    pub max_len: usize,
    pub full_words: usize,
    #[serde(with = "crate::util::big_dec")]
    pub tuples_total: BigUint,
    pub tuples_examined: u64,
    pub tuples_verified: u64,
    pub symmetry: String,
    pub found: bool,
    pub certificate: Option<Vec<Vec<Chair>>>,
}

impl SearchReport {
    pub fn certificate_system(&self) -> Option<WordSystem> {
        let words = self.certificate.as_ref()?;
        let exprs = words
            .iter()
            .map(|w| WordExpr::literal(w).unwrap())
            .collect();
        Some(
            WordSystem::new(self.m, SystemKind::Mc, exprs)
                .unwrap()
                .named("search certificate"),
        )
    }
}

/// Full words over `1..=m` of length at most `max_len`, by length then lexicographically.
fn full_words(m: u32, max_len: usize) -> VerifyResult<Vec<Vec<Chair>>> {
    let mut total: u64 = 0;
    for len in 1..=max_len as u32 {
        total = total.saturating_add((m as u64).saturating_pow(len));
    }
    if total > MAX_CANDIDATES {
        return Err(VerifyError::BudgetExceeded {
            budget: MAX_CANDIDATES,
            checked: 0,
            total: BigUint::from(total),
        });
    }
    let mut out = Vec::new();
    for len in m as usize..=max_len {
        let mut w = vec![1 as Chair; len];
        loop {
            let mut seen = vec![false; m as usize];
            w.iter().for_each(|&c| seen[c as usize - 1] = true);
            if seen.iter().all(|&s| s) {
                out.push(w.clone());
            }
            // odometer increment, last letter fastest
            let Some(i) = (0..len).rev().find(|&i| w[i] < m) else {
                break;
            };
            w[i] += 1;
            w[i + 1..].iter_mut().for_each(|c| *c = 1);
        }
    }
    Ok(out)
}

fn permutations(m: u32) -> Vec<Vec<Chair>> {
    let mut out = Vec::new();
    let mut cur: Vec<Chair> = (1..=m).collect();
    fn rec(k: usize, cur: &mut Vec<Chair>, out: &mut Vec<Vec<Chair>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

struct Candidates {
    words: Vec<Vec<Chair>>,
    index: HashMap<Vec<Chair>, usize>,
    /// `images[s][w]`: index of word `w` relabeled by symmetry `s`.
    images: Vec<Vec<usize>>,
}

impl Candidates {
    fn new(m: u32, words: Vec<Vec<Chair>>) -> Self {
        let index: HashMap<Vec<Chair>, usize> = words
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let images = permutations(m)
            .into_iter()
            .map(|sigma| {
                words
                    .iter()
                    .map(|w| index[&w.iter().map(|&c| sigma[c as usize - 1]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        Candidates {
            words,
            index,
            images,
        }
    }

    fn is_canonical(&self, tuple: &[usize]) -> bool {
        let mut img = vec![0; tuple.len()];
        for map in &self.images {
            for (d, &t) in img.iter_mut().zip(tuple) {
                *d = map[t];
            }
            img.sort_unstable();
            if img.as_slice() < tuple {
                return false;
            }
        }
        true
    }
}

/// Look for `n` distinct full words of length at most `max_len` over `m`
/// chairs that form an oblivious system.
pub fn search_impossibility(params: &SearchParams, exec: Execution) -> VerifyResult<SearchReport> {
    let SearchParams {
        n,
        m,
        max_len,
        budget,
        state_cap,
    } = *params;
    if n == 0 || m == 0 {
        return Err(VerifyError::BadSubset("need n >= 1 and m >= 1".into()));
    }
    let cands = Candidates::new(m, full_words(m, max_len)?);
    debug_assert_eq!(cands.index.len(), cands.words.len());
    let total = binomial(cands.words.len(), n);
    let mut report = SearchReport {
        n,
        m,
        max_len,
        full_words: cands.words.len(),
        tuples_total: total.clone(),
        tuples_examined: 0,
        tuples_verified: 0,
        symmetry: format!("simultaneous chair relabeling ({m}! maps) and word reordering"),
        found: false,
        certificate: None,
    };
    if n > cands.words.len() {
        return Ok(report);
    }
    let opts = VerifyOptions::with_cap(state_cap);
    let all: Vec<usize> = (0..n).collect();
    let check = |tuple: &Vec<usize>| -> Option<VerifyResult<bool>> {
        if !cands.is_canonical(tuple) {
            return None;
        }
        let exprs = tuple
            .iter()
            .map(|&i| WordExpr::literal(&cands.words[i]).unwrap())
            .collect();
        let sys = WordSystem::new(m, SystemKind::Mc, exprs).unwrap();
        Some(verify_mc(&sys, &all, &opts).and_then(|r| match r.verdict {
            Verdict::CapExceeded => Err(VerifyError::CapExceeded {
                states: r.state_space,
                cap: state_cap,
            }),
            v => Ok(v == Verdict::Oblivious),
        }))
    };

    let w = cands.words.len();
    let mut tuple: Vec<usize> = (0..n).collect();
    let mut exhausted = false;
    while !exhausted {
        let mut chunk = Vec::with_capacity(CHUNK);
        while chunk.len() < CHUNK && report.tuples_examined + (chunk.len() as u64) < budget {
            chunk.push(tuple.clone());
            match (0..n).rev().find(|&i| tuple[i] != i + w - n) {
                Some(i) => {
                    tuple[i] += 1;
                    for j in i + 1..n {
                        tuple[j] = tuple[j - 1] + 1;
                    }
                }
                None => {
                    exhausted = true;
                    break;
                }
            }
        }
        if chunk.is_empty() {
            return Err(VerifyError::BudgetExceeded {
                budget,
                checked: report.tuples_examined,
                total,
            });
        }
        let hit = exec.find_first(chunk.len(), |i| match check(&chunk[i]) {
            Some(Ok(false)) | None => None,
            Some(r) => Some(r),
        });
        let canonical = exec
            .map(chunk.len(), |i| cands.is_canonical(&chunk[i]))
            .into_iter()
            .take(hit.as_ref().map_or(chunk.len(), |(i, _)| i + 1))
            .filter(|&c| c)
            .count() as u64;
        report.tuples_verified += canonical;
        match hit {
            Some((i, Ok(_))) => {
                report.tuples_examined += i as u64 + 1;
                report.found = true;
                report.certificate =
                    Some(chunk[i].iter().map(|&k| cands.words[k].clone()).collect());
                return Ok(report);
            }
            Some((_, Err(e))) => return Err(e),
            None => report.tuples_examined += chunk.len() as u64,
        }
    }
    Ok(report)
}
