//! Comparator estimators built on p-values.

use crate::error::{Error, Result};
use crate::families::LocationShiftFamily;

/// `1 - F_b(x)`, the p-value of `x` against the one-sided null boundary `b`.
pub fn one_sided_pvalue(x: f64, b: f64, family: &LocationShiftFamily) -> f64 {
    family.sf(b, x).clamp(0.0, 1.0)
}

/// A validated vector of p-values together with its ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueVector {
    p: Vec<f64>,
    sorted: Vec<f64>,
}

impl PValueVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(index) = p.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidPValue {
                index,
                value: p[index],
            });
        }
        let mut sorted = p.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { p, sorted })
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Lower-bound estimate of the alternative proportion from ordered p-values:
/// the largest `q_i = (i/m - p_(i) - b_m sqrt(p_(i)(1 - p_(i)))) / (1 - p_(i))`
/// over `2 <= i <= m - 2`, with `b_m = sqrt(2 ln ln m / m)`, clipped to `[0, 1]`.
pub fn mr_estimate(p: &PValueVector) -> Result<f64> {
    let m = p.len();
    if m <= 4 {
        return Err(Error::TooFewPValues(m));
    }
    let mf = m as f64;
    let b_m = (2.0 * mf.ln().ln() / mf).sqrt();
    let best = (2..=m - 2)
        .map(|i| {
            let pi = p.sorted[i - 1];
            (i as f64 / mf - pi - b_m * (pi * (1.0 - pi)).sqrt()) / (1.0 - pi)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best.clamp(0.0, 1.0))
}

/// Fixed-`lambda` Storey estimate of the alternative proportion,
/// `1 - min(1, #{p_i > lambda} / ((1 - lambda) m))`.
pub fn storey_estimate(p: &PValueVector, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    let above = p.p.iter().filter(|&&v| v > lambda).count();
    let pi0 = (above as f64 / ((1.0 - lambda) * p.len() as f64)).clamp(0.0, 1.0);
    Ok(1.0 - pi0)
}
