//! Uniformly consistent estimators of the proportion of false null hypotheses
//! for composite nulls on the means (or medians) of Type I location-shift
//! families.
//!
//! Each null set (a point, a bounded interval, a one-sided interval, or a
//! weighted bounded interval) is paired with a *matching function* `K(t, x)`
//! whose expectation under `F_mu` is a *discriminant function* `psi(t, mu)`
//! that tends to the indicator of the null set as the speed `t` grows.
//! Averaging `1 - K(t, z_i)` over the observations gives an unbiased
//! estimate of `1 - m^-1 sum psi(t, mu_i)`, which converges to the
//! alternative proportion.
//!
//! Modules:
//!
//! * [`families`]: characteristic-function moduli, CDFs and samplers.
//! * [`quadrature`]: the equally spaced Riemann-sum engine.
//! * [`oracles`]: the sine integral and Dirichlet-integral limits.
//! * [`kernels`]: `(psi, K)` pairs for each null specification.
//! * [`estimators`]: the proportion estimator, default speed and variance bounds.
//! * [`baselines`]: one-sided p-values, the MR and fixed-lambda Storey estimators.
//! * [`simharness`]: the three simulation scenarios and their excess metric.

pub mod baselines;
pub mod error;
pub mod estimators;
pub mod families;
pub mod kernels;
pub mod oracles;
pub mod quadrature;
pub mod simharness;
pub mod summation;

pub use error::{Error, Result};
pub use estimators::{default_speed, estimate, EstimateResult, EstimateTarget};
pub use families::{FamilyKind, LocationShiftFamily};
pub use kernels::{Edges, KernelPair, NullSpec, OmegaDensity, PreparedKernel, WeightFn};
pub use quadrature::{QuadratureConfig, Rule};
