//! Matching functions `K` and discriminant functions `psi`.
//!
//! For every null set the pair satisfies `int K(t, x) dF_mu(x) = psi(t, mu)`,
//! with `psi(t, .)` tending to the indicator of the null set (or a weighted
//! indicator for extensions) as `t` grows. The building blocks are
//!
//! * the point kernel `K_{1,0}(t, x; c) = int omega(s) cos(t s (x - c)) / r_0(t s) ds`,
//! * the bounded kernel `K_1(t, x) = (t / 2 pi) int_a^b phi(y) dy int cos(t s (x - y)) / r_0(t s) ds`,
//! * the one-sided kernel, a double integral over `(y, s)` in `[0, 1]^2`,
//!
//! and each null set combines them linearly. All `s`-integrands are even, so
//! they are evaluated on `[0, 1]` and doubled.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{CfModulus, LocationShiftFamily};
use crate::oracles::sine_integral;
use crate::quadrature::{Grid, QuadratureConfig};

/// Even probability density on `[-1, 1]` weighting the point kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaDensity {
    #[default]
    Triangular,
    Uniform,
}

impl OmegaDensity {
    pub fn density(self, s: f64) -> f64 {
        if s.abs() > 1.0 {
            return 0.0;
        }
        match self {
            OmegaDensity::Triangular => 1.0 - s.abs(),
            OmegaDensity::Uniform => 0.5,
        }
    }

    pub fn sup_norm(self) -> f64 {
        match self {
            OmegaDensity::Triangular => 1.0,
            OmegaDensity::Uniform => 0.5,
        }
    }

    /// Total variation over the real line.
    pub fn total_variation(self) -> f64 {
        match self {
            OmegaDensity::Triangular => 2.0,
            OmegaDensity::Uniform => 1.0,
        }
    }

    /// Fourier transform `int omega(s) cos(s u) ds`.
    pub fn transform(self, u: f64) -> f64 {
        let u2 = u * u;
        match self {
            OmegaDensity::Triangular => {
                if u.abs() < 1e-4 {
                    1.0 - u2 / 12.0
                } else {
                    let h = (0.5 * u).sin();
                    4.0 * h * h / u2
                }
            }
            OmegaDensity::Uniform => {
                if u.abs() < 1e-4 {
                    1.0 - u2 / 6.0
                } else {
                    u.sin() / u
                }
            }
        }
    }
}

impl fmt::Display for OmegaDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OmegaDensity::Triangular => "triangular",
            OmegaDensity::Uniform => "uniform",
        })
    }
}

impl FromStr for OmegaDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triangular" => Ok(OmegaDensity::Triangular),
            "uniform" => Ok(OmegaDensity::Uniform),
            other => Err(Error::InvalidConfig(format!(
                "unknown omega density `{other}`"
            ))),
        }
    }
}

/// A named weight function `phi` on the null interval of an extension.
#[derive(Clone)]
pub struct WeightFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl WeightFn {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c)
    }

    /// `y^2` on `[-bound, bound]`, zero outside.
    pub fn truncated_square(bound: f64) -> Self {
        Self::new(format!("trunc2norm({bound})"), move |y: f64| {
            if y.abs() <= bound {
                y * y
            } else {
                0.0
            }
        })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("WeightFn").field(&self.name).finish()
    }
}

/// How an extension treats the interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edges {
    /// Weight the open interval: subtract half the endpoint point-kernels.
    Open,
    /// Weight the closed interval: add half the endpoint point-kernels.
    Closed,
    /// The bare weighted bounded kernel, whose limit gives each endpoint half weight.
    #[default]
    Unadjusted,
}

impl fmt::Display for Edges {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Edges::Open => "open",
            Edges::Closed => "closed",
            Edges::Unadjusted => "none",
        })
    }
}

impl FromStr for Edges {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(Edges::Open),
            "closed" => Ok(Edges::Closed),
            "none" | "unadjusted" => Ok(Edges::Unadjusted),
            other => Err(Error::InvalidConfig(format!(
                "unknown edge treatment `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtensionNull {
    pub phi: WeightFn,
    pub a: f64,
    pub b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub edges: Edges,
}

/// The null parameter set.
#[derive(Debug, Clone)]
pub enum NullSpec {
    Point { mu0: f64 },
    BoundedOpen { a: f64, b: f64 },
    BoundedClosed { a: f64, b: f64 },
    OneSidedOpen { b: f64 },
    OneSidedClosed { b: f64 },
    Extension(ExtensionNull),
}

impl NullSpec {
    pub fn extension(phi: WeightFn, a: f64, b: f64, edges: Edges) -> Self {
        let (phi_a, phi_b) = (phi.eval(a), phi.eval(b));
        NullSpec::Extension(ExtensionNull {
            phi,
            a,
            b,
            phi_a,
            phi_b,
            edges,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidNull(format!(
                    "{what} must be finite, got {v}"
                )))
            }
        };
        let interval = |a: f64, b: f64| {
            finite(a, "a")?;
            finite(b, "b")?;
            if a < b {
                Ok(())
            } else {
                Err(Error::InvalidNull(format!(
                    "need a < b, got a = {a}, b = {b}"
                )))
            }
        };
        match self {
            NullSpec::Point { mu0 } => finite(*mu0, "mu0"),
            NullSpec::BoundedOpen { a, b } | NullSpec::BoundedClosed { a, b } => interval(*a, *b),
            NullSpec::OneSidedOpen { b } | NullSpec::OneSidedClosed { b } => finite(*b, "b"),
            NullSpec::Extension(e) => {
                interval(e.a, e.b)?;
                finite(e.phi_a, "phi(a)")?;
                finite(e.phi_b, "phi(b)")
            }
        }
    }

    pub fn is_one_sided(&self) -> bool {
        matches!(
            self,
            NullSpec::OneSidedOpen { .. } | NullSpec::OneSidedClosed { .. }
        )
    }

    pub fn is_extension(&self) -> bool {
        matches!(self, NullSpec::Extension(_))
    }
}

impl fmt::Display for NullSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullSpec::Point { mu0 } => write!(f, "point({mu0})"),
            NullSpec::BoundedOpen { a, b } => write!(f, "bounded-open({a},{b})"),
            NullSpec::BoundedClosed { a, b } => write!(f, "bounded-closed({a},{b})"),
            NullSpec::OneSidedOpen { b } => write!(f, "one-sided-open({b})"),
            NullSpec::OneSidedClosed { b } => write!(f, "one-sided-closed({b})"),
            NullSpec::Extension(e) => {
                write!(
                    f,
                    "extension[{}]({},{};edges={})",
                    e.phi.name(),
                    e.a,
                    e.b,
                    e.edges
                )
            }
        }
    }
}

/// A null set bound to a family, a point-kernel density and a quadrature mesh.
#[derive(Debug, Clone)]
pub struct KernelPair<M: CfModulus = LocationShiftFamily> {
    pub null: NullSpec,
    pub modulus: M,
    pub omega: OmegaDensity,
    pub quad: QuadratureConfig,
}

impl KernelPair<LocationShiftFamily> {
    pub fn compose(
        null: NullSpec,
        family: LocationShiftFamily,
        omega: OmegaDensity,
        quad: QuadratureConfig,
    ) -> Result<Self> {
        if null.is_one_sided() && !family.has_finite_mean() {
            return Err(family.one_sided_refusal());
        }
        Self::with_modulus(null, family, omega, quad)
    }

    pub fn family(&self) -> &LocationShiftFamily {
        &self.modulus
    }
}

impl<M: CfModulus> KernelPair<M> {
    /// Compose against an arbitrary reciprocal modulus.
    pub fn with_modulus(
        null: NullSpec,
        modulus: M,
        omega: OmegaDensity,
        quad: QuadratureConfig,
    ) -> Result<Self> {
        null.validate()?;
        quad.validate()?;
        if null.is_one_sided() && modulus.recip_modulus_deriv(0.0).is_none() {
            return Err(Error::UnsupportedFamily {
                family: modulus.label(),
                reason: "no derivative of the reciprocal modulus".into(),
            });
        }
        Ok(Self {
            null,
            modulus,
            omega,
            quad,
        })
    }

    /// Precompute every `t`-dependent weight. Fails if `1 / r_0` overflows on the mesh.
    pub fn prepare(&self, t: f64) -> Result<PreparedKernel<'_, M>> {
        PreparedKernel::new(self, t)
    }

    pub fn eval_k(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.prepare(t)?.k(x))
    }

    /// `psi(t, mu)`, the `F_mu`-expectation of `K(t, .)`.
    pub fn eval_psi(&self, t: f64, mu: f64) -> f64 {
        let point = |c: f64| psi_point(self.omega, t, mu, c);
        match &self.null {
            NullSpec::Point { mu0 } => point(*mu0),
            NullSpec::BoundedOpen { a, b } => {
                psi_bounded(t, mu, *a, *b) - 0.5 * (point(*a) + point(*b))
            }
            NullSpec::BoundedClosed { a, b } => {
                psi_bounded(t, mu, *a, *b) + 0.5 * (point(*a) + point(*b))
            }
            NullSpec::OneSidedOpen { b } => 0.5 - psi_onesided(t, mu - b) - 0.5 * point(*b),
            NullSpec::OneSidedClosed { b } => 0.5 - psi_onesided(t, mu - b) + 0.5 * point(*b),
            NullSpec::Extension(e) => {
                let core = psi_extension(t, mu, |y| e.phi.eval(y), e.a, e.b, &self.quad);
                let ends = 0.5 * (e.phi_a * point(e.a) + e.phi_b * point(e.b));
                match e.edges {
                    Edges::Open => core - ends,
                    Edges::Closed => core + ends,
                    Edges::Unadjusted => core,
                }
            }
        }
    }
}

/// `t`-specific weights of a [`KernelPair`]; evaluating `K` is then infallible.
#[derive(Debug, Clone)]
pub struct PreparedKernel<'a, M: CfModulus = LocationShiftFamily> {
    pair: &'a KernelPair<M>,
    t: f64,
    s0: f64,
    ds: f64,
    point_weights: Vec<f64>,
    body: Body,
}

#[derive(Debug, Clone)]
enum Body {
    None,
    /// `K_1(x) = sum_j cos(t s_j x) cos_w[j] + sin(t s_j x) sin_w[j]`.
    Bounded {
        cos_w: Vec<f64>,
        sin_w: Vec<f64>,
    },
    /// Upper triangle `j >= i` of the symmetric `(y, s)` mesh, row by row.
    OneSided {
        rows: Vec<OneSidedRow>,
        sin_w: Vec<f64>,
        cos_w: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy)]
struct OneSidedRow {
    y: f64,
    first: usize,
    start: usize,
    end: usize,
}

impl<'a, M: CfModulus> PreparedKernel<'a, M> {
    fn new(pair: &'a KernelPair<M>, t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t must be finite and non-negative, got {t}"
            )));
        }
        let grid = Grid::new(0.0, 1.0, &pair.quad);
        let s0 = grid.nodes[0];
        let ds = grid.width;
        let rho = grid
            .nodes
            .iter()
            .map(|&s| finite_or(pair.modulus.recip_modulus(t * s), s))
            .collect::<Result<Vec<_>>>()?;
        let point_weights = grid
            .nodes
            .iter()
            .zip(&rho)
            .map(|(&s, &r)| 2.0 * pair.omega.density(s) * r * ds)
            .collect();
        let body = match &pair.null {
            NullSpec::Point { .. } => Body::None,
            NullSpec::BoundedOpen { a, b } | NullSpec::BoundedClosed { a, b } => {
                bounded_body(t, &grid, &rho, *a, *b, |_| 1.0, &pair.quad)
            }
            NullSpec::Extension(e) => {
                bounded_body(t, &grid, &rho, e.a, e.b, |y| e.phi.eval(y), &pair.quad)
            }
            NullSpec::OneSidedOpen { .. } | NullSpec::OneSidedClosed { .. } => {
                onesided_body(t, &grid, &pair.modulus)?
            }
        };
        Ok(Self {
            pair,
            t,
            s0,
            ds,
            point_weights,
            body,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn pair(&self) -> &KernelPair<M> {
        self.pair
    }

    /// Point kernel `K_{1,0}(t, x; center)`.
    pub fn k_point(&self, x: f64, center: f64) -> f64 {
        if self.t == 0.0 {
            return 1.0;
        }
        let u = self.t * (x - center);
        rotate_sum(&self.point_weights, &[], u * self.s0, u * self.ds)
    }

    /// The null-specific building block: `K_{1,0}(.; mu0)` for a point null,
    /// the (weighted) bounded kernel, or the unshifted one-sided kernel.
    pub fn k_core(&self, x: f64) -> f64 {
        if self.t == 0.0 {
            return match self.pair.null {
                NullSpec::Point { .. } => 1.0,
                _ => 0.0,
            };
        }
        match (&self.body, &self.pair.null) {
            (Body::None, NullSpec::Point { mu0 }) => self.k_point(x, *mu0),
            (Body::Bounded { cos_w, sin_w }, _) => {
                let u = self.t * x;
                rotate_sum(cos_w, sin_w, u * self.s0, u * self.ds)
            }
            (Body::OneSided { rows, sin_w, cos_w }, _) => {
                let mut sin_acc = 0.0;
                let mut cos_acc = 0.0;
                for row in rows {
                    let u = self.t * x * row.y;
                    let start = u * (self.s0 + row.first as f64 * self.ds);
                    let step = u * self.ds;
                    let (sa, ca) = rotate_pair(
                        &sin_w[row.start..row.end],
                        &cos_w[row.start..row.end],
                        start,
                        step,
                    );
                    sin_acc += sa;
                    cos_acc += ca;
                }
                sin_acc + x * cos_acc
            }
            (Body::None, _) => unreachable!("only point nulls lack a kernel body"),
        }
    }

    /// The composed matching function `K(t, x)`.
    pub fn k(&self, x: f64) -> f64 {
        let null = &self.pair.null;
        match null {
            NullSpec::Point { .. } => self.k_core(x),
            NullSpec::BoundedOpen { a, b } => {
                self.k_core(x) - 0.5 * (self.k_point(x, *a) + self.k_point(x, *b))
            }
            NullSpec::BoundedClosed { a, b } => {
                self.k_core(x) + 0.5 * (self.k_point(x, *a) + self.k_point(x, *b))
            }
            NullSpec::OneSidedOpen { b } => {
                0.5 - self.k_core(x - b) - 0.5 * self.k_point(x - b, 0.0)
            }
            NullSpec::OneSidedClosed { b } => {
                0.5 - self.k_core(x - b) + 0.5 * self.k_point(x - b, 0.0)
            }
            NullSpec::Extension(e) => {
                let core = self.k_core(x);
                match e.edges {
                    Edges::Unadjusted => core,
                    Edges::Open => {
                        core - 0.5
                            * (e.phi_a * self.k_point(x, e.a) + e.phi_b * self.k_point(x, e.b))
                    }
                    Edges::Closed => {
                        core + 0.5
                            * (e.phi_a * self.k_point(x, e.a) + e.phi_b * self.k_point(x, e.b))
                    }
                }
            }
        }
    }
}

fn finite_or(v: f64, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at })
    }
}

fn bounded_body<F: Fn(f64) -> f64>(
    t: f64,
    s_grid: &Grid,
    rho: &[f64],
    a: f64,
    b: f64,
    phi: F,
    quad: &QuadratureConfig,
) -> Body {
    let y_grid = Grid::new(a, b, quad);
    let y_w: Vec<f64> = y_grid
        .nodes
        .iter()
        .map(|&y| phi(y) * y_grid.width)
        .collect();
    let (cos_w, sin_w) = s_grid
        .nodes
        .iter()
        .zip(rho)
        .map(|(&s, &r)| {
            let scale = t * FRAC_1_PI * r * s_grid.width;
            let (mut c, mut si) = (0.0, 0.0);
            for (&y, &w) in y_grid.nodes.iter().zip(&y_w) {
                let (sn, cs) = (t * s * y).sin_cos();
                c += w * cs;
                si += w * sn;
            }
            (scale * c, scale * si)
        })
        .unzip();
    Body::Bounded { cos_w, sin_w }
}

fn onesided_body<M: CfModulus>(t: f64, grid: &Grid, modulus: &M) -> Result<Body> {
    // The integrand depends on (y, s) only through v = y s, and both axes share
    // one mesh, so the off-diagonal cells pair up.
    let n = grid.len();
    let cell = grid.width * grid.width * FRAC_1_PI;
    let mut rows = Vec::with_capacity(n);
    let mut sin_w = Vec::with_capacity(n * (n + 1) / 2);
    let mut cos_w = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let y = grid.nodes[i];
        let start = sin_w.len();
        for j in i..n {
            let v = y * grid.nodes[j];
            let mult = if i == j { 1.0 } else { 2.0 };
            let d = modulus
                .recip_modulus_deriv(t * v)
                .ok_or_else(|| Error::UnsupportedFamily {
                    family: modulus.label(),
                    reason: "no derivative of the reciprocal modulus".into(),
                })?;
            sin_w.push(finite_or(mult * cell * t * d, v)?);
            cos_w.push(finite_or(
                mult * cell * t * modulus.recip_modulus(t * v),
                v,
            )?);
        }
        rows.push(OneSidedRow {
            y,
            first: i,
            start,
            end: sin_w.len(),
        });
    }
    Ok(Body::OneSided { rows, sin_w, cos_w })
}

/// `sum_j cos_w[j] cos(start + j step) + sin_w[j] sin(start + j step)`,
/// stepping the angle by a rotation. An empty `sin_w` is treated as zeros.
#[inline]
fn rotate_sum(cos_w: &[f64], sin_w: &[f64], start: f64, step: f64) -> f64 {
    let (mut sn, mut cs) = start.sin_cos();
    let (dsn, dcs) = step.sin_cos();
    let mut acc = 0.0;
    if sin_w.is_empty() {
        for &w in cos_w {
            acc += w * cs;
            (sn, cs) = (sn * dcs + cs * dsn, cs * dcs - sn * dsn);
        }
    } else {
        for (&wc, &ws) in cos_w.iter().zip(sin_w) {
            acc += wc * cs + ws * sn;
            (sn, cs) = (sn * dcs + cs * dsn, cs * dcs - sn * dsn);
        }
    }
    acc
}

/// `(sum_j sin_w[j] sin(theta_j), sum_j cos_w[j] cos(theta_j))` with `theta_j = start + j step`.
#[inline]
fn rotate_pair(sin_w: &[f64], cos_w: &[f64], start: f64, step: f64) -> (f64, f64) {
    let (mut sn, mut cs) = start.sin_cos();
    let (dsn, dcs) = step.sin_cos();
    let (mut sa, mut ca) = (0.0, 0.0);
    for (&ws, &wc) in sin_w.iter().zip(cos_w) {
        sa += ws * sn;
        ca += wc * cs;
        (sn, cs) = (sn * dcs + cs * dsn, cs * dcs - sn * dsn);
    }
    (sa, ca)
}

/// `psi_{1,0}(t, mu; center) = int omega(s) cos(t s (mu - center)) ds`.
pub fn psi_point(omega: OmegaDensity, t: f64, mu: f64, center: f64) -> f64 {
    omega.transform(t * (mu - center))
}

/// `(1/pi) [Si((mu - a) t) - Si((mu - b) t)]`.
pub fn psi_bounded(t: f64, mu: f64, a: f64, b: f64) -> f64 {
    (sine_integral((mu - a) * t) - sine_integral((mu - b) * t)) / PI
}

/// `Si(mu t) / pi`.
pub fn psi_onesided(t: f64, mu: f64) -> f64 {
    sine_integral(mu * t) / PI
}

/// Weighted Dirichlet integral `(1/pi) int_a^b sin((mu - y) t) / (mu - y) phi(y) dy`
/// by a Riemann sum on the mesh of `quad`.
pub fn psi_extension<F: Fn(f64) -> f64>(
    t: f64,
    mu: f64,
    phi: F,
    a: f64,
    b: f64,
    quad: &QuadratureConfig,
) -> f64 {
    let grid = Grid::new(a, b, quad);
    let sum: f64 = grid
        .nodes
        .iter()
        .map(|&y| {
            let d = mu - y;
            let core = if d.abs() < 1e-12 {
                t
            } else {
                (d * t).sin() / d
            };
            core * phi(y)
        })
        .collect::<crate::summation::CompensatedSum>()
        .value();
    sum * grid.width / PI
}

/// `K_{1,0}(t, x; center)` for a composed pair.
pub fn k_point<M: CfModulus>(pair: &KernelPair<M>, t: f64, x: f64, center: f64) -> Result<f64> {
    Ok(pair.prepare(t)?.k_point(x, center))
}

fn core_for<M: CfModulus>(
    pair: &KernelPair<M>,
    t: f64,
    x: f64,
    ok: bool,
    what: &str,
) -> Result<f64> {
    if !ok {
        return Err(Error::InvalidNull(format!(
            "{what} kernel requested for a {} null",
            pair.null
        )));
    }
    Ok(pair.prepare(t)?.k_core(x))
}

/// Bounded kernel `K_1(t, x)` of a bounded null.
pub fn k_bounded<M: CfModulus>(pair: &KernelPair<M>, t: f64, x: f64) -> Result<f64> {
    let ok = matches!(
        pair.null,
        NullSpec::BoundedOpen { .. } | NullSpec::BoundedClosed { .. }
    );
    core_for(pair, t, x, ok, "bounded")
}

/// One-sided kernel `K_1(t, x)` (boundary at the origin) of a one-sided null.
pub fn k_onesided<M: CfModulus>(pair: &KernelPair<M>, t: f64, x: f64) -> Result<f64> {
    core_for(pair, t, x, pair.null.is_one_sided(), "one-sided")
}

/// Weighted bounded kernel of an extension.
pub fn k_extension<M: CfModulus>(pair: &KernelPair<M>, t: f64, x: f64) -> Result<f64> {
    core_for(pair, t, x, pair.null.is_extension(), "extension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyKind;
    use crate::quadrature::{integrate_1d, integrate_2d, Rule};
    use proptest::prelude::*;

    fn gaussian() -> LocationShiftFamily {
        LocationShiftFamily::standard(FamilyKind::Gaussian)
    }

    fn pair(null: NullSpec) -> KernelPair {
        KernelPair::compose(
            null,
            gaussian(),
            OmegaDensity::Triangular,
            QuadratureConfig::default(),
        )
        .unwrap()
    }

    /// Mesh fine enough to resolve exp(t^2 s^2 / 2) at t = 10.
    fn pair_fine(null: NullSpec) -> KernelPair {
        let quad = QuadratureConfig::new(5e-4, Rule::Midpoint).unwrap();
        KernelPair::compose(null, gaussian(), OmegaDensity::Triangular, quad).unwrap()
    }

    fn fine() -> QuadratureConfig {
        QuadratureConfig::new(1e-4, Rule::Midpoint).unwrap()
    }

    struct UnitModulus;

    impl CfModulus for UnitModulus {
        fn recip_modulus(&self, _: f64) -> f64 {
            1.0
        }
        fn recip_modulus_deriv(&self, _: f64) -> Option<f64> {
            Some(0.0)
        }
        fn label(&self) -> String {
            "unit".into()
        }
    }

    #[test]
    fn omega_integrates_to_one() {
        for omega in [OmegaDensity::Triangular, OmegaDensity::Uniform] {
            let v = integrate_1d(
                |s| omega.density(s),
                -1.0,
                1.0,
                &QuadratureConfig::default(),
            )
            .unwrap();
            assert!((v - 1.0).abs() <= 1e-4);
            assert_eq!(omega.density(0.3), omega.density(-0.3));
        }
    }

    #[test]
    fn point_kernel_examples() {
        let p = pair_fine(NullSpec::Point { mu0: 0.0 });
        assert_eq!(k_point(&p, 0.0, 3.0, 1.0).unwrap(), 1.0);
        // 2 int_0^1 (1 - s) exp(50 s^2) ds on a 10^4-cell mesh.
        let oracle = integrate_1d(
            |s| 2.0 * (1.0 - s) * (50.0 * s * s).exp(),
            0.0,
            1.0,
            &fine(),
        )
        .unwrap();
        let v = k_point(&p, 10.0, 0.7, 0.7).unwrap();
        assert!(((v - oracle) / oracle).abs() < 1e-3, "{v} vs {oracle}");
        for t in [0.5, 1.0, 2.0] {
            assert!(k_point(&p, t, 1.2, 1.2).unwrap() >= 1.0);
        }
    }

    #[test]
    fn point_psi_examples() {
        let tri = OmegaDensity::Triangular;
        assert_eq!(psi_point(tri, 20.0, 0.4, 0.4), 1.0);
        assert!(psi_point(tri, 1.0, 2.0 * PI, 0.0).abs() < 1e-4);
        assert_eq!(psi_point(tri, 0.0, 5.0, -3.0), 1.0);
        for u in [1e-5, 0.3, 2.0, 9.0] {
            let q = integrate_1d(|s| (1.0 - s.abs()) * (s * u).cos(), -1.0, 1.0, &fine()).unwrap();
            assert!((psi_point(tri, u, 1.0, 0.0) - q).abs() < 1e-8);
            let q = integrate_1d(|s| 0.5 * (s * u).cos(), -1.0, 1.0, &fine()).unwrap();
            assert!((psi_point(OmegaDensity::Uniform, u, 1.0, 0.0) - q).abs() < 1e-8);
        }
    }

    #[test]
    fn bounded_kernel_examples() {
        let p = pair_fine(NullSpec::BoundedOpen { a: -1.0, b: 2.0 });
        let tiny = k_bounded(&p, 1e-8, 0.3).unwrap();
        assert!((tiny - 3.0e-8 / PI).abs() < 1e-12, "{tiny}");
        assert_eq!(k_bounded(&p, 0.0, 0.3).unwrap(), 0.0);

        // (t/pi) int_0^1 exp(t^2 s^2 / 2) int_{-1}^{2} cos(t s y) dy ds, t = 10, x = 0.
        let t = 10.0;
        let inner = |s: f64| {
            if s == 0.0 {
                3.0
            } else {
                ((2.0 * t * s).sin() + (t * s).sin()) / (t * s)
            }
        };
        let oracle = t / PI
            * integrate_1d(
                |s| (0.5 * t * t * s * s).exp() * inner(s),
                0.0,
                1.0,
                &fine(),
            )
            .unwrap();
        let v = k_bounded(&p, t, 0.0).unwrap();
        assert!(((v - oracle) / oracle).abs() < 1e-3, "{v} vs {oracle}");
    }

    #[test]
    fn bounded_kernel_with_unit_modulus_is_a_sine_integral_difference() {
        let quad = QuadratureConfig::new(1e-3, Rule::Midpoint).unwrap();
        let p = KernelPair::with_modulus(
            NullSpec::BoundedOpen { a: -1.0, b: 2.0 },
            UnitModulus,
            OmegaDensity::Triangular,
            quad,
        )
        .unwrap();
        for &t in &[0.5, 2.0, 5.0] {
            for &x in &[-3.0, -1.0, 0.2, 2.0, 4.5] {
                let exact = (sine_integral((x + 1.0) * t) - sine_integral((x - 2.0) * t)) / PI;
                let v = k_bounded(&p, t, x).unwrap();
                assert!((v - exact).abs() < 1e-5, "t={t} x={x}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn bounded_psi_examples() {
        let (a, b) = (-1.0, 2.0);
        let t = 100.0 / 3.0;
        assert!((psi_bounded(t, 0.5, a, b) - 1.0).abs() <= 8.0 / (t * 3.0));
        assert!((psi_bounded(1e4, a, a, b) - 0.5).abs() < 1e-3);
        assert!(psi_bounded(10.0, b + 10.0, a, b).abs() <= 0.07);
    }

    #[test]
    fn onesided_kernel_examples() {
        let p = pair_fine(NullSpec::OneSidedOpen { b: 0.0 });
        for t in [0.5, 1.0, 10.0] {
            assert_eq!(k_onesided(&p, t, 0.0).unwrap(), 0.0);
        }
        let prepared = p.prepare(2.0).unwrap();
        for x in [0.3, 1.0, 4.0] {
            assert!((prepared.k_core(-x) + prepared.k_core(x)).abs() < 1e-12);
        }

        // Exact one-dimensional reduction: K_1 = (1/pi) int_0^1 rho(t y) sin(t y x) / y dy.
        let t = 10.0;
        let x = 1.0;
        let reduced = integrate_1d(
            |y| (0.5 * t * t * y * y).exp() * (t * y * x).sin() / y,
            0.0,
            1.0,
            &fine(),
        )
        .unwrap()
            / PI;
        // The displayed double integral on a 2000^2 mesh.
        let mid = QuadratureConfig::new(5e-4, Rule::Midpoint).unwrap();
        let fam = gaussian();
        let double = integrate_2d(
            |y, s| {
                let v = t * y * s;
                fam.recip_cf_sderiv_over_y(t, y, s).unwrap() * (v * x).sin()
                    + t * x * (v * x).cos() * fam.recip_modulus(v)
            },
            (0.0, 1.0),
            (0.0, 1.0),
            &mid,
        )
        .unwrap()
            / PI;
        assert!(
            ((double - reduced) / reduced).abs() < 1e-3,
            "{double} vs {reduced}"
        );
        let v = k_onesided(&p, t, x).unwrap();
        assert!(((v - reduced) / reduced).abs() < 1e-3, "{v} vs {reduced}");
    }

    #[test]
    fn onesided_kernel_with_unit_modulus_is_a_sine_integral() {
        let quad = QuadratureConfig::new(2e-3, Rule::Midpoint).unwrap();
        let p = KernelPair::with_modulus(
            NullSpec::OneSidedOpen { b: 0.0 },
            UnitModulus,
            OmegaDensity::Triangular,
            quad,
        )
        .unwrap();
        for &t in &[1.0, 3.0] {
            let prepared = p.prepare(t).unwrap();
            for &x in &[-2.0, 0.5, 3.0] {
                let exact = sine_integral(t * x) / PI;
                assert!((prepared.k_core(x) - exact).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn onesided_refuses_cauchy() {
        let cauchy = LocationShiftFamily::standard(FamilyKind::Cauchy);
        let err = KernelPair::compose(
            NullSpec::OneSidedOpen { b: 0.0 },
            cauchy,
            OmegaDensity::Triangular,
            QuadratureConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedFamily { .. }));
    }

    #[test]
    fn onesided_psi_examples() {
        assert_eq!(psi_onesided(3.0, 0.0), 0.0);
        for (t, mu) in [(2.0, 1.0), (10.0, 0.7), (100.0, 3.0)] {
            let bound = 2.0 / (mu * t);
            assert!((psi_onesided(t, mu) - 0.5).abs() <= bound);
            assert_eq!(psi_onesided(t, -mu), -psi_onesided(t, mu));
        }
    }

    #[test]
    fn extension_examples() {
        let bounded = pair(NullSpec::BoundedOpen { a: -1.0, b: 2.0 });
        let ones = pair(NullSpec::extension(
            WeightFn::constant(1.0),
            -1.0,
            2.0,
            Edges::Open,
        ));
        let zeros = pair(NullSpec::extension(
            WeightFn::constant(0.0),
            -1.0,
            2.0,
            Edges::Open,
        ));
        for t in [0.7, 2.6] {
            for x in [-2.0, 0.0, 1.5] {
                assert_eq!(
                    k_extension(&ones, t, x).unwrap(),
                    k_bounded(&bounded, t, x).unwrap()
                );
                assert_eq!(k_extension(&zeros, t, x).unwrap(), 0.0);
            }
        }

        let trunc = pair_fine(NullSpec::extension(
            WeightFn::truncated_square(2.0),
            -2.0,
            2.0,
            Edges::Unadjusted,
        ));
        let t: f64 = 5.0;
        let phi = |y: f64| y * y;
        // (t/pi) int_0^1 rho(t s) int_{-2}^{2} y^2 cos(t s y) dy ds, with the inner integral in closed form.
        let inner = |s: f64| {
            let w = t * s;
            if w < 1e-6 {
                16.0 / 3.0
            } else {
                2.0 * (4.0 * (2.0 * w).sin() / w + 4.0 * (2.0 * w).cos() / (w * w)
                    - 2.0 * (2.0 * w).sin() / (w * w * w))
            }
        };
        let oracle = t / PI
            * integrate_1d(
                |s| (0.5 * t * t * s * s).exp() * inner(s),
                0.0,
                1.0,
                &fine(),
            )
            .unwrap();
        let check = integrate_1d(|y| phi(y) * (0.3 * y).cos(), -2.0, 2.0, &fine()).unwrap();
        assert!((check - inner(0.3 / t)).abs() < 1e-7);
        let v = k_extension(&trunc, t, 0.0).unwrap();
        assert!(((v - oracle) / oracle).abs() < 1e-3, "{v} vs {oracle}");
    }

    #[test]
    fn extension_psi_examples() {
        let q = QuadratureConfig::default();
        let fine_q = QuadratureConfig::new(1e-3, Rule::Midpoint).unwrap();
        for &(t, mu) in &[(1.0, 0.5), (3.0, -0.2), (2.0, 4.0)] {
            let d = psi_extension(t, mu, |_| 1.0, -1.0, 2.0, &q);
            assert!((d - psi_bounded(t, mu, -1.0, 2.0)).abs() < 1e-4);
        }
        let sq = |y: f64| y * y;
        let inside = psi_extension(400.0, 1.0, sq, -2.0, 2.0, &fine_q);
        assert!((inside - 1.0).abs() < 0.05, "{inside}");
        let edge = psi_extension(400.0, -2.0, sq, -2.0, 2.0, &fine_q);
        assert!((edge - 2.0).abs() < 0.05, "{edge}");
    }

    #[test]
    fn composition_examples() {
        let open = pair(NullSpec::BoundedOpen { a: -1.0, b: 2.0 });
        let closed = pair(NullSpec::BoundedClosed { a: -1.0, b: 2.0 });
        let (po, pc) = (open.prepare(1.3).unwrap(), closed.prepare(1.3).unwrap());
        for x in [-2.0, 0.0, 0.9, 3.0] {
            assert!((po.k(x) + pc.k(x) - 2.0 * po.k_core(x)).abs() < 1e-12);
        }
        let one = pair(NullSpec::OneSidedOpen { b: 0.0 });
        for t in [0.0, 1.0, 5.0] {
            assert!(one.eval_psi(t, 0.0).abs() < 1e-15);
        }
        assert!((open.eval_psi(20.0, 0.5) - 1.0).abs() <= 0.15);
        assert!(open.eval_psi(20.0, 5.0).abs() <= 0.1);
    }

    #[test]
    fn one_sided_translation() {
        let at0 = pair(NullSpec::OneSidedOpen { b: 0.0 });
        let at1 = pair(NullSpec::OneSidedClosed { b: 1.5 });
        let at0c = pair(NullSpec::OneSidedClosed { b: 0.0 });
        let (p0, p1) = (at0c.prepare(1.7).unwrap(), at1.prepare(1.7).unwrap());
        for x in [-1.0, 0.2, 2.0] {
            assert!((p1.k(x + 1.5) - p0.k(x)).abs() < 1e-13);
            assert!((at1.eval_psi(1.7, x + 1.5) - at0c.eval_psi(1.7, x)).abs() < 1e-13);
        }
        assert!(at0.prepare(1.0).is_ok());
    }

    #[test]
    fn overflowing_modulus_is_reported() {
        let p = pair(NullSpec::Point { mu0: 0.0 });
        assert!(matches!(
            p.prepare(60.0),
            Err(Error::NonFiniteIntegrand { .. })
        ));
        assert!(p.prepare(-1.0).is_err());
    }

    #[test]
    fn invalid_nulls() {
        let mk = |n| {
            KernelPair::compose(
                n,
                gaussian(),
                OmegaDensity::Triangular,
                QuadratureConfig::default(),
            )
        };
        assert!(matches!(
            mk(NullSpec::BoundedOpen { a: 2.0, b: 2.0 }),
            Err(Error::InvalidNull(_))
        ));
        assert!(mk(NullSpec::extension(
            WeightFn::constant(1.0),
            1.0,
            -1.0,
            Edges::Open
        ))
        .is_err());
        let p = pair(NullSpec::Point { mu0: 0.0 });
        assert!(matches!(
            k_bounded(&p, 1.0, 0.0),
            Err(Error::InvalidNull(_))
        ));
    }

    #[test]
    fn rotation_matches_direct_evaluation() {
        let w: Vec<f64> = (0..100).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        let v: Vec<f64> = (0..100).map(|i| (i as f64 * 0.11).cos()).collect();
        let (start, step) = (12.3, 0.77);
        let direct: f64 = (0..100)
            .map(|j| {
                let th = start + j as f64 * step;
                w[j] * th.cos() + v[j] * th.sin()
            })
            .sum();
        assert!((rotate_sum(&w, &v, start, step) - direct).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn point_kernel_is_even(d in 0.0f64..20.0, t in 0.1f64..3.0, c in -3.0f64..3.0) {
            let p = pair(NullSpec::Point { mu0: c });
            let prepared = p.prepare(t).unwrap();
            let (lhs, rhs) = (prepared.k_point(c + d, c), prepared.k_point(c - d, c));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn onesided_kernel_is_odd(x in 0.0f64..20.0, t in 0.1f64..3.0) {
            let p = pair(NullSpec::OneSidedOpen { b: 0.0 });
            let prepared = p.prepare(t).unwrap();
            let (lhs, rhs) = (prepared.k_core(x), prepared.k_core(-x));
            prop_assert!((lhs + rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn psi_onesided_is_bounded(t in 0.0f64..1e3, mu in -1e3f64..1e3) {
            prop_assert!(psi_onesided(t, mu).abs() < 0.6);
        }
    }
}
