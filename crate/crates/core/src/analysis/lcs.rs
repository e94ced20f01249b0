use super::{AnalysisError, AnalysisResult};
use crate::word::Chair;

fn check_perm(a: &[Chair], m: usize) -> AnalysisResult<()> {
    let mut seen = vec![false; m];
    for &c in a {
        if c == 0 || c as usize > m || std::mem::replace(&mut seen[c as usize - 1], true) {
            return Err(AnalysisError::NotPermutation);
        }
    }
    if a.len() != m {
        return Err(AnalysisError::NotPermutation);
    }
    Ok(())
}

/// Longest strictly increasing subsequence length.
fn lis(v: &[usize]) -> usize {
    let mut tails: Vec<usize> = Vec::new();
    for &x in v {
        match tails.binary_search(&x) {
            Ok(_) => {}
            Err(i) if i == tails.len() => tails.push(x),
            Err(i) => tails[i] = x,
        }
    }
    tails.len()
}

/// Longest common subsequence of two permutations of `1..=m`, both read cyclically.
///
/// Rotating only `a` suffices: a common cyclic subsequence can be rotated to
/// start at its earliest letter in `b`, and it still embeds in some rotation
/// of `a`. Each rotation reduces to an increasing-subsequence problem on the
/// positions of `a`'s letters in `b`.
pub fn cyclic_lcs(a: &[Chair], b: &[Chair]) -> AnalysisResult<usize> {
    let m = a.len();
    check_perm(a, m)?;
    check_perm(b, m)?;
    let mut pos_b = vec![0usize; m];
    for (i, &c) in b.iter().enumerate() {
        pos_b[c as usize - 1] = i;
    }
    let mapped: Vec<usize> = a.iter().map(|&c| pos_b[c as usize - 1]).collect();
    let mut best = 0;
    let mut rot = Vec::with_capacity(m);
    for r in 0..m {
        rot.clear();
        rot.extend_from_slice(&mapped[r..]);
        rot.extend_from_slice(&mapped[..r]);
        best = best.max(lis(&rot));
    }
    Ok(best)
}

/// Largest `n` with `m > (n - 1) r`.
pub fn prop21_bound(m: u64, r: u64) -> AnalysisResult<u64> {
    if r == 0 {
        return Err(AnalysisError::BadParameter("r must be positive".into()));
    }
    Ok(m.div_ceil(r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Prop21 {
    /// Largest pairwise cyclic LCS.
    pub r: u64,
    pub max_players: u64,
}

/// Number of players for which no word of `perms` can be fully traversed.
pub fn prop21_max_players(perms: &[Vec<Chair>], m: u32) -> AnalysisResult<Prop21> {
    for p in perms {
        check_perm(p, m as usize)?;
    }
    let mut r = if perms.len() < 2 { 1 } else { 0 };
    for i in 0..perms.len() {
        for j in i + 1..perms.len() {
            r = r.max(cyclic_lcs(&perms[i], &perms[j])? as u64);
        }
    }
    Ok(Prop21 {
        r,
        max_players: prop21_bound(m as u64, r)?,
    })
}
