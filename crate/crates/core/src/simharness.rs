//! Simulation scenarios, the excess metric, and replication aggregates.
//!
//! Every replication draws from its own ChaCha8 stream (the master seed with
//! the replication index as stream id), so results do not depend on how
//! replications are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::baselines::{mr_estimate, one_sided_pvalue, storey_estimate, PValueVector};
use crate::error::{Error, Result};
use crate::estimators::{default_speed, estimate_prepared};
use crate::families::{FamilyKind, LocationShiftFamily};
use crate::kernels::{Edges, KernelPair, NullSpec, OmegaDensity, WeightFn};
use crate::quadrature::QuadratureConfig;
use crate::summation::{mean, sample_sd, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Open bounded null `(-1, 2)`.
    #[serde(rename = "1")]
    Bounded,
    /// Open one-sided null `(-inf, 0)`.
    #[serde(rename = "2")]
    OneSided,
    /// Average truncated squared norm over `[-2, 2]`.
    #[serde(rename = "3")]
    TruncatedSquare,
}

impl Scenario {
    pub fn id(self) -> u8 {
        match self {
            Scenario::Bounded => 1,
            Scenario::OneSided => 2,
            Scenario::TruncatedSquare => 3,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Scenario::Bounded),
            "2" => Ok(Scenario::OneSided),
            "3" => Ok(Scenario::TruncatedSquare),
            other => Err(Error::InvalidConfig(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sparsity {
    /// One fifth of the means are alternatives.
    Dense,
    /// `1 / ln ln m` of the means are alternatives.
    Moderate,
}

impl Sparsity {
    /// Number of alternatives `floor(pi_1 m)`.
    pub fn alternatives(self, m: usize) -> usize {
        match self {
            Sparsity::Dense => m / 5,
            Sparsity::Moderate => (m as f64 / ln_ln(m)).floor() as usize,
        }
    }
}

impl fmt::Display for Sparsity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sparsity::Dense => "dense",
            Sparsity::Moderate => "moderate",
        })
    }
}

impl FromStr for Sparsity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Sparsity::Dense),
            "moderate" => Ok(Sparsity::Moderate),
            other => Err(Error::InvalidConfig(format!("unknown sparsity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorId {
    New,
    Mr,
    Storey,
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorId::New => "new",
            EstimatorId::Mr => "mr",
            EstimatorId::Storey => "storey",
        })
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "new" => Ok(EstimatorId::New),
            "mr" => Ok(EstimatorId::Mr),
            "storey" => Ok(EstimatorId::Storey),
            other => Err(Error::InvalidConfig(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub m: usize,
    pub sparsity: Sparsity,
    pub reps: usize,
    pub seed: u64,
    pub gamma: f64,
    pub quad: QuadratureConfig,
    pub omega: OmegaDensity,
    pub estimators: Vec<EstimatorId>,
    pub storey_lambda: f64,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, m: usize, sparsity: Sparsity) -> Self {
        Self {
            scenario,
            m,
            sparsity,
            reps: 200,
            seed: 0,
            gamma: 0.495,
            quad: QuadratureConfig::default(),
            omega: OmegaDensity::Triangular,
            estimators: vec![EstimatorId::New],
            storey_lambda: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 16 {
            return Err(Error::InvalidConfig(format!(
                "m must be at least 16, got {}",
                self.m
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("no estimators requested".into()));
        }
        if self.scenario != Scenario::OneSided
            && self.estimators.iter().any(|e| *e != EstimatorId::New)
        {
            return Err(Error::InvalidConfig(
                "p-value baselines are only defined for the one-sided scenario".into(),
            ));
        }
        if !(self.storey_lambda > 0.0 && self.storey_lambda < 1.0) {
            return Err(Error::InvalidLambda(self.storey_lambda));
        }
        self.quad.validate()?;
        default_speed(self.m, self.gamma).map(|_| ())
    }

    /// Distance `1 / ln ln m` separating non-boundary means from the null boundary.
    pub fn gap(&self) -> f64 {
        1.0 / ln_ln(self.m)
    }

    pub fn null(&self) -> NullSpec {
        match self.scenario {
            Scenario::Bounded => NullSpec::BoundedOpen { a: -1.0, b: 2.0 },
            Scenario::OneSided => NullSpec::OneSidedOpen { b: 0.0 },
            Scenario::TruncatedSquare => NullSpec::extension(
                WeightFn::truncated_square(2.0),
                -2.0,
                2.0,
                Edges::Unadjusted,
            ),
        }
    }
}

fn ln_ln(m: usize) -> f64 {
    (m as f64).ln().ln()
}

/// Means of one replication and the quantity the estimate is scored against.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMeans {
    pub mu: Vec<f64>,
    /// Alternative proportion for scenarios 1 and 2, weighted null proportion for 3.
    pub target: f64,
}

/// Random stream of replication `rep`.
pub fn rep_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64, n: usize, out: &mut Vec<f64>) {
    out.extend((0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()));
}

/// Means of replication `rep` of `config`.
pub fn generate_means(config: &ScenarioConfig, rep: usize) -> Result<GeneratedMeans> {
    generate_means_with(config, &mut rep_rng(config.seed, rep))
}

pub fn generate_means_with<R: Rng>(config: &ScenarioConfig, rng: &mut R) -> Result<GeneratedMeans> {
    let m = config.m;
    let u = config.gap();
    let m1 = config.sparsity.alternatives(m);
    if m1 == 0 || m1 > m {
        return Err(Error::InvalidConfig(format!(
            "{m1} alternatives out of {m}"
        )));
    }
    let m0 = m - m1;
    let mut mu = Vec::with_capacity(m);
    let target = match config.scenario {
        Scenario::Bounded => {
            let (a, b) = (-1.0, 2.0);
            let m11 = ((m1 / 2) as i64 - (m as f64 / ln_ln(m)).floor() as i64).max(1) as usize;
            if 2 * m11 > m1 {
                return Err(Error::InvalidConfig(format!(
                    "{m11} interior alternatives per side exceed {m1} alternatives"
                )));
            }
            uniform(rng, a + u, b - u, m0, &mut mu);
            uniform(rng, b + u, b + 6.0, m11, &mut mu);
            uniform(rng, a - 4.0, a - u, m11, &mut mu);
            let rest = m1 - 2 * m11;
            mu.extend(std::iter::repeat_n(a, rest / 2));
            mu.extend(std::iter::repeat_n(b, rest - rest / 2));
            m1 as f64 / m as f64
        }
        Scenario::OneSided => {
            let b = 0.0;
            let above = 9 * m1 / 10;
            uniform(rng, -4.0, b - u, m0, &mut mu);
            uniform(rng, b + u, b + 6.0, above, &mut mu);
            mu.extend(std::iter::repeat_n(b, m1 - above));
            m1 as f64 / m as f64
        }
        Scenario::TruncatedSquare => {
            let (a, b) = (-2.0, 2.0);
            let above = m1 / 2;
            uniform(rng, a, b, m0, &mut mu);
            uniform(rng, b + u, b + 6.0, above, &mut mu);
            uniform(rng, b - 4.0, b - u, m1 - above, &mut mu);
            let weighted: CompensatedSum = mu
                .iter()
                .filter(|&&v| (a..=b).contains(&v))
                .map(|&v| v * v)
                .collect();
            weighted.value() / m as f64
        }
    };
    if !(target > 0.0) {
        return Err(Error::InvalidConfig(
            "scoring target is not positive".into(),
        ));
    }
    Ok(GeneratedMeans { mu, target })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimator: EstimatorId,
    pub per_rep_excess: Vec<f64>,
    pub mean_excess: f64,
    pub sd_excess: f64,
}

impl EstimatorReport {
    pub fn from_excess(estimator: EstimatorId, per_rep_excess: Vec<f64>) -> Self {
        Self {
            estimator,
            mean_excess: mean(&per_rep_excess),
            sd_excess: sample_sd(&per_rep_excess),
            per_rep_excess,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: ScenarioConfig,
    pub t_used: f64,
    pub estimators: Vec<EstimatorReport>,
}

impl SimulationReport {
    pub fn get(&self, estimator: EstimatorId) -> Option<&EstimatorReport> {
        self.estimators.iter().find(|r| r.estimator == estimator)
    }
}

/// Run every replication of `config` and score each requested estimator by
/// its excess `estimate / target - 1`.
pub fn run(config: &ScenarioConfig) -> Result<SimulationReport> {
    config.validate()?;
    let family = LocationShiftFamily::standard(FamilyKind::Gaussian);
    let t = default_speed(config.m, config.gamma)?;
    let pair = KernelPair::compose(config.null(), family, config.omega, config.quad)?;
    let kernel = pair.prepare(t)?;

    let per_rep: Vec<Vec<f64>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rep_rng(config.seed, rep);
            let means = generate_means_with(config, &mut rng)?;
            let z: Vec<f64> = means
                .mu
                .iter()
                .map(|&mu| family.draw(mu, &mut rng))
                .collect();
            let pvalues = if config.estimators.iter().any(|e| *e != EstimatorId::New) {
                Some(PValueVector::new(
                    z.iter()
                        .map(|&x| one_sided_pvalue(x, 0.0, &family))
                        .collect(),
                )?)
            } else {
                None
            };
            config
                .estimators
                .iter()
                .map(|id| {
                    let value = match id {
                        EstimatorId::New => {
                            let r = estimate_prepared(&z, &kernel)?;
                            if pair.null.is_extension() {
                                r.pi0_hat
                            } else {
                                r.pi1_hat
                            }
                        }
                        EstimatorId::Mr => {
                            mr_estimate(pvalues.as_ref().expect("p-values computed"))?
                        }
                        EstimatorId::Storey => storey_estimate(
                            pvalues.as_ref().expect("p-values computed"),
                            config.storey_lambda,
                        )?,
                    };
                    Ok(value / means.target - 1.0)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let estimators = config
        .estimators
        .iter()
        .enumerate()
        .map(|(k, &id)| {
            EstimatorReport::from_excess(id, per_rep.iter().map(|row| row[k]).collect())
        })
        .collect();
    Ok(SimulationReport {
        config: config.clone(),
        t_used: t,
        estimators,
    })
}
