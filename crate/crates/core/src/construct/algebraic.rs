//! Permutations of `F_p × F_p` cut into graphs of shifted polynomials.

use super::{ConstructError, ConstructResult};
use crate::word::{Chair, SystemKind, WordExpr, WordSystem};

/// Largest number of letters (over all permutations) the family may hold.
pub const ALGEBRAIC_LETTER_CAP: u64 = 10_000_000;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug)]
pub struct AlgebraicFamily {
    pub p: u64,
    pub d: u32,
    pub m: u32,
    pub permutations: Vec<Vec<Chair>>,
    /// `coefficients[k][e - 1]` is the coefficient of `x^e`, for `e = 1..=2d`.
    pub coefficients: Vec<Vec<u64>>,
}

impl AlgebraicFamily {
    /// Point `(x, y)` as a chair.
    pub fn chair(&self, x: u64, y: u64) -> Chair {
        (x * self.p + y + 1) as Chair
    }

    /// Block `j` of permutation `k`: the chairs of `{(x, f(x) + j)}` by ascending `x`.
    pub fn block(&self, k: usize, j: u64) -> &[Chair] {
        let p = self.p as usize;
        &self.permutations[k][j as usize * p..(j as usize + 1) * p]
    }

    pub fn system(&self) -> WordSystem {
        let words = self
            .permutations
            .iter()
            .map(|w| WordExpr::literal(w).unwrap())
            .collect();
        WordSystem::new(self.m, SystemKind::Mc, words)
            .unwrap()
            .named(format!("algebraic p={} d={}", self.p, self.d))
    }
}

fn eval(coeffs: &[u64], x: u64, p: u64) -> u64 {
    // Horner, constant term zero
    coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) * x % p
}

/// One permutation per polynomial of degree exactly `2d` with zero constant term.
pub fn build_algebraic_perms(p: u64, d: u32) -> ConstructResult<AlgebraicFamily> {
    if !is_prime(p) {
        return Err(ConstructError::NotPrime(p));
    }
    if d == 0 {
        return Err(ConstructError::BadParameter("d must be at least 1".into()));
    }
    let deg = 2 * d;
    let letters = (p - 1)
        .checked_mul(p.checked_pow(deg + 1).unwrap_or(u64::MAX))
        .filter(|&l| l <= ALGEBRAIC_LETTER_CAP);
    if letters.is_none() {
        return Err(ConstructError::CapExceeded(format!(
            "(p-1) p^(2d+1) letters with p={p} d={d} exceeds {ALGEBRAIC_LETTER_CAP}"
        )));
    }
    let lower = p.pow(deg - 1);
    let mut permutations = Vec::new();
    let mut coefficients = Vec::new();
    for lead in 1..p {
        for idx in 0..lower {
            let mut c = Vec::with_capacity(deg as usize);
            let mut rest = idx;
            for _ in 0..deg - 1 {
                c.push(rest % p);
                rest /= p;
            }
            c.push(lead);
            let f: Vec<u64> = (0..p).map(|x| eval(&c, x, p)).collect();
            let mut perm = Vec::with_capacity((p * p) as usize);
            for j in 0..p {
                for x in 0..p {
                    perm.push((x * p + (f[x as usize] + j) % p + 1) as Chair);
                }
            }
            permutations.push(perm);
            coefficients.push(c);
        }
    }
    Ok(AlgebraicFamily {
        p,
        d,
        m: (p * p) as u32,
        permutations,
        coefficients,
    })
}
