//! Closed-form special functions and the limits of the Dirichlet integrals.
//!
//! These are used inside the kernels (the bounded and one-sided
//! discriminant functions have sine-integral closed forms) and as
//! independent reference values in tests.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 4.0;

/// The sine integral `Si(x) = int_0^x sin(u)/u du`.
///
/// Power series for `|x| <= 4`; beyond that `Si(x) = pi/2 - f(x) cos x - g(x) sin x`
/// with the auxiliary functions `f`, `g` taken from a Lentz continued
/// fraction for `E1(ix)`. Both branches are accurate to a few ulps.
pub fn sine_integral(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == f64::INFINITY {
        return FRAC_PI_2;
    }
    if x <= SERIES_LIMIT {
        si_series(x)
    } else {
        let (f, g) = auxiliary_fg(x);
        FRAC_PI_2 - f * x.cos() - g * x.sin()
    }
}

fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    // term_n = (-1)^n x^(2n+1) / (2n+1)!
    let mut term = x;
    let mut sum = x;
    for n in 0..60 {
        let k = n as f64;
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        let add = term / (2.0 * k + 3.0);
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Auxiliary functions `f(x)`, `g(x)` of the sine and cosine integrals,
/// `Si = pi/2 - f cos x - g sin x` and `Ci = f sin x - g cos x`. Converges fast for `x > 2`.
fn auxiliary_fg(x: f64) -> (f64, f64) {
    // Modified Lentz evaluation of E1(z) e^{z} for z = i x.
    const TINY: f64 = 1e-300;
    let z = Complex64::new(0.0, x);
    let mut b = Complex64::new(1.0, 0.0) + z;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    // h = E1(ix) e^{ix} = g(x) - i f(x)
    (-h.im, h.re)
}

/// `t`-limit of `pi^-1 int_{(mu-b)t}^{(mu-a)t} sin(y)/y dy`: 1 inside `(a, b)`,
/// one half at either endpoint, 0 outside `[a, b]`.
pub fn dirichlet_limit_bounded(mu: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a < b);
    if mu > a && mu < b {
        1.0
    } else if mu == a || mu == b {
        0.5
    } else {
        0.0
    }
}

/// `t`-limit of `pi^-1 int_0^t sin((mu-b)y)/y dy`: the sign of `mu - b`, halved.
pub fn dirichlet_limit_onesided(mu: f64, b: f64) -> f64 {
    if mu > b {
        0.5
    } else if mu == b {
        0.0
    } else {
        -0.5
    }
}

/// `t`-limit of the weighted Dirichlet integral `D_phi(t, mu; a, b)`.
pub fn dirichlet_limit_weighted<F: Fn(f64) -> f64>(phi: F, mu: f64, a: f64, b: f64) -> f64 {
    dirichlet_limit_bounded(mu, a, b) * if mu >= a && mu <= b { phi(mu) } else { 0.0 }
}

/// Inputs to the weighted-Dirichlet speed bound: the sup-norm of `phi` and
/// the difference-ratio constant `C_mu(phi)` at the point of interest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightStats {
    pub sup_norm: f64,
    pub c_mu: f64,
}

/// Upper bound on `|D_phi(t, mu; a, b) - D_phi,inf(mu; a, b)|`:
/// `4 C_mu / (pi t) + 4 ||phi|| / t * (1/(b - a) + 3/delta)`,
/// where `delta` is the distance from `mu` to the nearer endpoint.
///
/// Requires `mu` off the endpoints and `min(t delta, t (b - a)) >= 2`.
pub fn dphi_speed_bound(t: f64, mu: f64, a: f64, b: f64, stats: WeightStats) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidNull(format!(
            "need a < b, got a = {a}, b = {b}"
        )));
    }
    if mu == a || mu == b {
        return Err(Error::PreconditionViolated(format!(
            "mu = {mu} lies on an endpoint of [{a}, {b}]"
        )));
    }
    let delta = (mu - a).abs().min((mu - b).abs());
    if !(t * delta >= 2.0 && t * (b - a) >= 2.0) {
        return Err(Error::PreconditionViolated(format!(
            "need min(t delta, t (b - a)) >= 2, got t = {t}, delta = {delta}, b - a = {}",
            b - a
        )));
    }
    Ok(4.0 * stats.c_mu / (PI * t) + 4.0 * stats.sup_norm / t * (1.0 / (b - a) + 3.0 / delta))
}
