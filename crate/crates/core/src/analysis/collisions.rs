use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AnalysisError, AnalysisResult};
use crate::util::{self, Execution, RNG_NAME};

/// Expected number of colliding pairs when `n` players sit uniformly at random on `m` chairs.
pub fn expected_collisions(n: u64, m: u64) -> AnalysisResult<BigRational> {
    if n == 0 || m == 0 {
        return Err(AnalysisError::BadParameter(
            "n and m must be positive".into(),
        ));
    }
    Ok(BigRational::new((n * (n - 1) / 2).into(), m.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionEstimate {
    pub n: u64,
    pub m: u64,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
    pub expected: String,
    pub expected_approx: f64,
    pub mean: f64,
    /// Standard error of the mean.
    pub sigma: f64,
    /// `|mean - expected| / sigma`.
    pub z: f64,
}

/// Streams the sampling is split into; fixed so results do not depend on threads.
const STREAMS: u64 = 64;

/// Sample `samples` uniform configurations and average their colliding pairs.
pub fn monte_carlo_collisions(
    n: u64,
    m: u64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> AnalysisResult<CollisionEstimate> {
    let expected = expected_collisions(n, m)?;
    if samples < 2 {
        return Err(AnalysisError::BadParameter(
            "need at least two samples".into(),
        ));
    }
    let per = samples.div_ceil(STREAMS);
    let parts = exec.map(STREAMS as usize, |s| {
        let mut rng = util::rng_stream(seed, s as u64);
        let count = per.min(samples.saturating_sub(s as u64 * per));
        let mut counts = vec![0u32; m as usize];
        let (mut sum, mut sq) = (0f64, 0f64);
        for _ in 0..count {
            counts.iter_mut().for_each(|c| *c = 0);
            for _ in 0..n {
                counts[rng.gen_range(0..m as usize)] += 1;
            }
            let pairs: u64 = counts
                .iter()
                .map(|&c| c as u64 * (c as u64).saturating_sub(1) / 2)
                .sum();
            sum += pairs as f64;
            sq += (pairs * pairs) as f64;
        }
        (sum, sq)
    });
    let (sum, sq) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let k = samples as f64;
    let mean = sum / k;
    let var = (sq - k * mean * mean) / (k - 1.0);
    let sigma = (var / k).sqrt();
    let exp = expected.to_f64().unwrap();
    Ok(CollisionEstimate {
        n,
        m,
        samples,
        seed,
        rng: RNG_NAME.into(),
        expected: expected.to_string(),
        expected_approx: exp,
        mean,
        sigma,
        z: (mean - exp).abs() / sigma,
    })
}
