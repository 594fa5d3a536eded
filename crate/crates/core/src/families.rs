//! Type I location-shift families.
//!
//! A family is fixed by its base law `F_0` (symmetric, with a real, positive
//! characteristic function `r_0`) and a known scale; `F_mu(x) = F_0(x - mu)`.
//! The kernels only ever need the reciprocal modulus `1 / r_0(u)` and its
//! derivative, both available in closed form for every supported family.
//!
//! | family   | `r_0(t)`                   | density `f_0(x)`                     |
//! |----------|----------------------------|--------------------------------------|
//! | gaussian | `exp(-s^2 t^2 / 2)`        | `N(0, s^2)`                          |
//! | laplace  | `1 / (1 + s^2 t^2)`        | `exp(-|x|/s) / (2s)`                 |
//! | logistic | `pi s t / sinh(pi s t)`    | `sech^2(x / 2s) / (4s)`              |
//! | hsecant  | `sech(t / s)`              | `(s/2) sech(pi s x / 2)`             |
//! | cauchy   | `exp(-s |t|)`              | `s / (pi (x^2 + s^2))`               |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Gaussian,
    Laplace,
    Logistic,
    #[serde(rename = "hsecant")]
    HyperbolicSecant,
    Cauchy,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::Gaussian,
        FamilyKind::Laplace,
        FamilyKind::Logistic,
        FamilyKind::HyperbolicSecant,
        FamilyKind::Cauchy,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Laplace => "laplace",
            FamilyKind::Logistic => "logistic",
            FamilyKind::HyperbolicSecant => "hsecant",
            FamilyKind::Cauchy => "cauchy",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.id() == lower)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown family `{s}`")))
    }
}

/// The reciprocal CF modulus `rho(u) = 1 / r_0(u)` a kernel is built from.
///
/// [`LocationShiftFamily`] is the production implementation; tests plug in
/// degenerate moduli (for instance `r_0 = 1`) to reach closed forms.
pub trait CfModulus: Send + Sync {
    /// `1 / r_0(u)`.
    fn recip_modulus(&self, u: f64) -> f64;

    /// `d/du [1 / r_0(u)]`, or `None` when the family lacks the finite
    /// first moment the one-sided construction needs.
    fn recip_modulus_deriv(&self, u: f64) -> Option<f64>;

    fn label(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationShiftFamily {
    pub kind: FamilyKind,
    pub scale: f64,
}

impl LocationShiftFamily {
    pub fn new(kind: FamilyKind, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { kind, scale })
    }

    /// Unit-scale member of `kind`.
    pub fn standard(kind: FamilyKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn has_finite_mean(&self) -> bool {
        self.kind != FamilyKind::Cauchy
    }

    /// Variance of each member (infinite for Cauchy).
    pub fn variance(&self) -> f64 {
        let s = self.scale;
        match self.kind {
            FamilyKind::Gaussian => s * s,
            FamilyKind::Laplace => 2.0 * s * s,
            FamilyKind::Logistic => PI * PI * s * s / 3.0,
            FamilyKind::HyperbolicSecant => 1.0 / (s * s),
            FamilyKind::Cauchy => f64::INFINITY,
        }
    }

    /// Modulus `r_0(t)` of the characteristic function.
    pub fn modulus_cf(&self, t: f64) -> f64 {
        let s = self.scale;
        let t = t.abs();
        match self.kind {
            FamilyKind::Gaussian => (-0.5 * s * s * t * t).exp(),
            FamilyKind::Laplace => 1.0 / (1.0 + s * s * t * t),
            FamilyKind::Logistic => 1.0 / sinhc(PI * s * t),
            FamilyKind::HyperbolicSecant => 1.0 / (t / s).cosh(),
            FamilyKind::Cauchy => (-s * t).exp(),
        }
    }

    /// `(1/y) d/ds [1 / r_0(t y s)]`, which simplifies to `t rho'(t y s)`.
    pub fn recip_cf_sderiv_over_y(&self, t: f64, y: f64, s: f64) -> Result<f64> {
        match self.recip_modulus_deriv(t * y * s) {
            Some(d) => Ok(t * d),
            None => Err(self.one_sided_refusal()),
        }
    }

    pub(crate) fn one_sided_refusal(&self) -> Error {
        Error::UnsupportedFamily {
            family: self.kind.id().to_string(),
            reason: "the one-sided construction needs a finite first absolute moment".into(),
        }
    }

    /// Density `f_mu(x) = f_0(x - mu)`.
    pub fn density(&self, mu: f64, x: f64) -> f64 {
        let s = self.scale;
        let x = x - mu;
        match self.kind {
            FamilyKind::Gaussian => (-0.5 * (x / s).powi(2)).exp() / (s * (2.0 * PI).sqrt()),
            FamilyKind::Laplace => (-(x.abs()) / s).exp() / (2.0 * s),
            FamilyKind::Logistic => {
                let c = (x / (2.0 * s)).cosh();
                1.0 / (4.0 * s * c * c)
            }
            FamilyKind::HyperbolicSecant => 0.5 * s / (0.5 * PI * s * x).cosh(),
            FamilyKind::Cauchy => s / (PI * (x * x + s * s)),
        }
    }

    /// `F_mu(x) = F_0(x - mu)`.
    pub fn cdf(&self, mu: f64, x: f64) -> f64 {
        let s = self.scale;
        let x = x - mu;
        match self.kind {
            FamilyKind::Gaussian => 0.5 * libm::erfc(-x / (s * SQRT_2)),
            FamilyKind::Laplace => {
                if x < 0.0 {
                    0.5 * (x / s).exp()
                } else {
                    1.0 - 0.5 * (-x / s).exp()
                }
            }
            FamilyKind::Logistic => 1.0 / (1.0 + (-x / s).exp()),
            FamilyKind::HyperbolicSecant => 2.0 / PI * (0.5 * PI * s * x).exp().atan(),
            FamilyKind::Cauchy => 0.5 + (x / s).atan() / PI,
        }
    }

    /// Upper tail `1 - F_mu(x)`, computed without cancellation.
    pub fn sf(&self, mu: f64, x: f64) -> f64 {
        // Symmetry of F_0 turns the upper tail into a lower one.
        self.cdf(-mu, -x)
    }

    /// Inverse CDF of `F_mu` for `p` in `(0, 1)`.
    pub fn quantile(&self, mu: f64, p: f64) -> f64 {
        let s = self.scale;
        let z = match self.kind {
            FamilyKind::Gaussian => s * SQRT_2 * inverse_erf(2.0 * p - 1.0),
            FamilyKind::Laplace => {
                if p < 0.5 {
                    s * (2.0 * p).ln()
                } else {
                    -s * (2.0 * (1.0 - p)).ln()
                }
            }
            FamilyKind::Logistic => s * (p / (1.0 - p)).ln(),
            FamilyKind::HyperbolicSecant => 2.0 / (PI * s) * (0.5 * PI * p).tan().ln(),
            FamilyKind::Cauchy => s * (PI * (p - 0.5)).tan(),
        };
        mu + z
    }

    /// One draw from `F_mu`.
    pub fn draw<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> f64 {
        match self.kind {
            FamilyKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                mu + self.scale * z
            }
            _ => {
                // Open interval (0, 1) so the quantile stays finite.
                let u = loop {
                    let u: f64 = rng.random();
                    if u > 0.0 {
                        break u;
                    }
                };
                self.quantile(mu, u)
            }
        }
    }

    /// `n` independent draws from `F_mu`, reproducible for a fixed seed.
    pub fn sample(&self, mu: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(mu, &mut rng)).collect()
    }

    /// Average reciprocal modulus `g(t, 0) = int_{-1}^{1} ds / r_0(t s)`.
    pub fn avg_recip_modulus(&self, t: f64, quad: &QuadratureConfig) -> Result<f64> {
        // Even integrand: integrate over [0, 1] and double.
        Ok(2.0 * integrate_1d(|s| self.recip_modulus(t * s), 0.0, 1.0, quad)?)
    }
}

impl CfModulus for LocationShiftFamily {
    fn recip_modulus(&self, u: f64) -> f64 {
        let s = self.scale;
        let u = u.abs();
        match self.kind {
            FamilyKind::Gaussian => (0.5 * s * s * u * u).exp(),
            FamilyKind::Laplace => 1.0 + s * s * u * u,
            FamilyKind::Logistic => sinhc(PI * s * u),
            FamilyKind::HyperbolicSecant => (u / s).cosh(),
            FamilyKind::Cauchy => (s * u).exp(),
        }
    }

    fn recip_modulus_deriv(&self, u: f64) -> Option<f64> {
        let s = self.scale;
        Some(match self.kind {
            FamilyKind::Gaussian => s * s * u * (0.5 * s * s * u * u).exp(),
            FamilyKind::Laplace => 2.0 * s * s * u,
            FamilyKind::Logistic => PI * s * sinhc_deriv(PI * s * u),
            FamilyKind::HyperbolicSecant => (u / s).sinh() / s,
            FamilyKind::Cauchy => return None,
        })
    }

    fn label(&self) -> String {
        format!("{}(scale={})", self.kind, self.scale)
    }
}

/// `sinh(v) / v`, equal to 1 at the origin.
fn sinhc(v: f64) -> f64 {
    let v = v.abs();
    if v < 1e-4 {
        let v2 = v * v;
        1.0 + v2 / 6.0 * (1.0 + v2 / 20.0)
    } else {
        v.sinh() / v
    }
}

/// `d/dv [sinh(v) / v] = (v cosh v - sinh v) / v^2`; odd in `v`.
fn sinhc_deriv(v: f64) -> f64 {
    if v.abs() < 0.1 {
        let v2 = v * v;
        v * (1.0 / 3.0 + v2 * (1.0 / 30.0 + v2 * (1.0 / 840.0 + v2 / 45_360.0)))
    } else {
        (v * v.cosh() - v.sinh()) / (v * v)
    }
}

/// Inverse error function: Giles' single-precision-style initial guess refined by
/// two Newton steps on `libm::erf`, giving full double accuracy on `(-1, 1)`.
fn inverse_erf(y: f64) -> f64 {
    if y <= -1.0 {
        return f64::NEG_INFINITY;
    }
    if y >= 1.0 {
        return f64::INFINITY;
    }
    let w = -((1.0 - y) * (1.0 + y)).ln();
    let mut x = if w < 5.0 {
        let w = w - 2.5;
        let mut p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        p = 1.501_409_41 + p * w;
        p * y
    } else {
        let w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        p = 2.832_976_82 + p * w;
        p * y
    };
    for _ in 0..2 {
        let err = libm::erf(x) - y;
        x -= err / (2.0 / PI.sqrt() * (-x * x).exp());
    }
    x
}
