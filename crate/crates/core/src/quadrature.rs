//! Equally spaced Riemann sums.
//!
//! Every kernel integral is approximated on a partition of the integration
//! range into cells of (at most) `norm` width. Two node placements are
//! offered: the cell midpoint (default, second-order accurate) and the left
//! endpoint. Double integrals are iterated, each axis using the same
//! configuration.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

/// Node placement inside each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    #[default]
    Midpoint,
    #[serde(rename = "left")]
    LeftEndpoint,
}

impl Rule {
    fn offset(self) -> f64 {
        match self {
            Rule::Midpoint => 0.5,
            Rule::LeftEndpoint => 0.0,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Midpoint => "midpoint",
            Rule::LeftEndpoint => "left",
        })
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" | "mid" => Ok(Rule::Midpoint),
            "left" | "leftendpoint" | "left-endpoint" => Ok(Rule::LeftEndpoint),
            other => Err(Error::InvalidConfig(format!(
                "unknown quadrature rule `{other}`"
            ))),
        }
    }
}

/// Partition mesh and node rule shared by every integral of an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub norm: f64,
    pub rule: Rule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            norm: 0.01,
            rule: Rule::Midpoint,
        }
    }
}

impl QuadratureConfig {
    pub fn new(norm: f64, rule: Rule) -> Result<Self> {
        let cfg = Self { norm, rule };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.norm.is_finite() && self.norm > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "quadrature norm must be positive and finite, got {}",
                self.norm
            )));
        }
        Ok(())
    }

    /// Number of equal cells covering `[a, b]`: `ceil((b - a) / norm)`, at least 1.
    ///
    /// A relative slack of `1e-9` keeps ranges that are an exact multiple of
    /// the norm (up to representation error, e.g. `3 / 0.01`) from gaining a
    /// spurious extra cell.
    pub fn cells(&self, a: f64, b: f64) -> usize {
        let ratio = (b - a) / self.norm;
        let n = (ratio - 1e-9 * ratio.max(1.0)).ceil();
        (n as usize).max(1)
    }
}

/// Precomputed nodes and the common cell width for one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub width: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, cfg: &QuadratureConfig) -> Self {
        if b <= a {
            return Self {
                nodes: Vec::new(),
                width: 0.0,
            };
        }
        let n = cfg.cells(a, b);
        let width = (b - a) / n as f64;
        let off = cfg.rule.offset();
        let nodes = (0..n).map(|i| a + (i as f64 + off) * width).collect();
        Self { nodes, width }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Riemann sum of `f` over `[a, b]`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a <= b) {
        return Err(Error::InvalidConfig(format!(
            "integration range must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    let grid = Grid::new(a, b, cfg);
    riemann(&f, &grid)
}

fn riemann<F: Fn(f64) -> f64>(f: &F, grid: &Grid) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for &x in &grid.nodes {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: x });
        }
        acc.add(v);
    }
    Ok(acc.value() * grid.width)
}

/// Iterated Riemann sum of `f(u, v)` over `[a1, b1] x [a2, b2]`: the outer sum
/// runs over `u`, the inner over `v`.
pub fn integrate_2d<F>(
    f: F,
    outer: (f64, f64),
    inner: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let ((a1, b1), (a2, b2)) = (outer, inner);
    if !(a1 <= b1 && a2 <= b2) {
        return Err(Error::InvalidConfig(format!(
            "integration box must be non-empty, got [{a1}, {b1}] x [{a2}, {b2}]"
        )));
    }
    let go = Grid::new(a1, b1, cfg);
    let gi = Grid::new(a2, b2, cfg);
    let mut acc = CompensatedSum::new();
    for &u in &go.nodes {
        acc.add(riemann(&|v| f(u, v), &gi)?);
    }
    Ok(acc.value() * go.width)
}
