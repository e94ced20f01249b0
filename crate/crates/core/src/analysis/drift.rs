//! The expected one-round change of the potential `x^(n - i)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{AnalysisError, AnalysisResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriftParams {
    pub q: BigRational,
    pub x: BigRational,
}

impl DriftParams {
    pub fn new(q: BigRational, x: BigRational) -> AnalysisResult<Self> {
        if q.is_negative() || q >= BigRational::one() {
            return Err(AnalysisError::Domain(format!("q = {q} must lie in [0, 1)")));
        }
        if x <= BigRational::one() {
            return Err(AnalysisError::Domain(format!("x = {x} must exceed 1")));
        }
        Ok(DriftParams { q, x })
    }

    /// `2q + 2(1-q)/x + q²x + 2q(1-q) + (1-q)²/x`.
    pub fn r(&self) -> BigRational {
        let (q, x) = (&self.q, &self.x);
        let two = BigRational::from_integer(2.into());
        let p = BigRational::one() - q;
        &two * q + &two * &p / x + q * q * x + &two * q * &p + &p * &p / x
    }
}

/// Potential of a configuration with `occupied` distinct chairs among `n` players.
pub fn potential(x: &BigRational, n: u32, occupied: u32) -> BigRational {
    num_traits::pow(x.clone(), n.saturating_sub(occupied) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XChoice {
    Given(BigRational),
    Optimize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub q: String,
    pub x_used: String,
    pub x_used_approx: f64,
    /// Exact value as a reduced fraction.
    pub r: String,
    pub r_approx: f64,
    pub r_below_99_100: bool,
    pub optimized: bool,
    /// Minimum over x in closed form, when optimizing.
    pub r_min_closed_form: Option<f64>,
    /// `m/n` at which the minimized bound reaches 1.
    pub critical_ratio: f64,
    pub critical_ratio_closed_form: f64,
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `argmin_x r(q, x) = sqrt((1-q)(3-q)) / q`.
pub fn optimal_x(q: f64) -> f64 {
    ((1.0 - q) * (3.0 - q)).sqrt() / q
}

/// `min_x r(q, x) = 4q - 2q² + 2q sqrt((1-q)(3-q))`.
pub fn min_r(q: f64) -> f64 {
    4.0 * q - 2.0 * q * q + 2.0 * q * ((1.0 - q) * (3.0 - q)).sqrt()
}

/// `1/q` solving `min_x r(q, x) = 1`, by bisection to an absolute error below `1e-9` in `q`.
pub fn critical_ratio() -> f64 {
    let (mut lo, mut hi) = (1e-9, 0.5);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if min_r(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 / (0.5 * (lo + hi))
}

pub fn drift_analysis(q: &BigRational, x: XChoice) -> AnalysisResult<DriftReport> {
    let (x, optimized) = match x {
        XChoice::Given(x) => (x, false),
        XChoice::Optimize => {
            if !q.is_positive() {
                return Err(AnalysisError::Domain(
                    "the bound decreases in x without limit at q = 0".into(),
                ));
            }
            let xs = optimal_x(ratio_f64(q));
            if !(xs > 1.0) {
                return Err(AnalysisError::Domain(format!(
                    "optimal x = {xs} is not above 1"
                )));
            }
            let approx = BigRational::from_float(xs)
                .ok_or_else(|| AnalysisError::Domain("x not finite".into()))?;
            // keep the fraction readable: round to 1e-12
            let scale = BigInt::from(10u64.pow(12));
            let rounded = BigRational::new(
                (approx * BigRational::from_integer(scale.clone()))
                    .round()
                    .to_integer(),
                scale,
            );
            (rounded, true)
        }
    };
    let params = DriftParams::new(q.clone(), x)?;
    let r = params.r();
    let bound = BigRational::new(99.into(), 100.into());
    Ok(DriftReport {
        q: params.q.to_string(),
        x_used: params.x.to_string(),
        x_used_approx: ratio_f64(&params.x),
        r_approx: ratio_f64(&r),
        r_below_99_100: r < bound,
        r: r.to_string(),
        optimized,
        r_min_closed_form: optimized.then(|| min_r(ratio_f64(q))),
        critical_ratio: critical_ratio(),
        critical_ratio_closed_form: 4.0 + 2.0 * 2f64.sqrt(),
    })
}

/// Parse `a/b`, an integer, or a decimal such as `11.5`.
pub fn parse_rational(s: &str) -> AnalysisResult<BigRational> {
    let bad = || AnalysisError::BadParameter(format!("not a rational number: {s}"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{i}{f}").parse().map_err(|_| bad())?;
        return Ok(BigRational::new(
            digits,
            BigInt::from(10u32).pow(f.len() as u32),
        ));
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}
