//! Monte Carlo check that `E_mu K(t, Z)` matches the closed-form `psi(t, mu)`
//! for the variants and families not covered by the acceptance suite.

use propest::summation::{mean, sample_sd};
use propest::{
    Edges, FamilyKind, KernelPair, LocationShiftFamily, NullSpec, OmegaDensity, QuadratureConfig,
    WeightFn,
};

const N: usize = 40_000;

fn check(kind: FamilyKind, null: NullSpec, omega: OmegaDensity, means: &[f64], seed: u64) {
    let pair = KernelPair::compose(
        null,
        LocationShiftFamily::standard(kind),
        omega,
        QuadratureConfig::default(),
    )
    .unwrap();
    for t in [1.0, 2.0] {
        let kernel = pair.prepare(t).unwrap();
        for (i, &mu) in means.iter().enumerate() {
            let values: Vec<f64> = pair
                .family()
                .sample(mu, N, seed + i as u64)
                .iter()
                .map(|&x| kernel.k(x))
                .collect();
            let residual = (mean(&values) - pair.eval_psi(t, mu)).abs();
            let tol = 4.0 * sample_sd(&values) / (N as f64).sqrt() + 5e-3;
            assert!(
                residual <= tol,
                "{kind} {} t={t} mu={mu}: {residual} > {tol}",
                pair.null
            );
        }
    }
}

#[test]
fn closed_variants() {
    let means = [-2.0, -1.0, 0.5, 2.0, 3.0];
    check(
        FamilyKind::Gaussian,
        NullSpec::BoundedClosed { a: -1.0, b: 2.0 },
        OmegaDensity::Triangular,
        &means,
        10,
    );
    check(
        FamilyKind::Laplace,
        NullSpec::OneSidedClosed { b: 0.5 },
        OmegaDensity::Triangular,
        &means,
        20,
    );
}

#[test]
fn extension_variants() {
    let means = [-3.0, -2.0, 0.0, 1.3, 2.5];
    for (i, edges) in [Edges::Open, Edges::Closed, Edges::Unadjusted]
        .into_iter()
        .enumerate()
    {
        let null = NullSpec::extension(WeightFn::truncated_square(2.0), -2.0, 2.0, edges);
        check(
            FamilyKind::Gaussian,
            null,
            OmegaDensity::Triangular,
            &means,
            100 + 10 * i as u64,
        );
    }
}

#[test]
fn logistic_and_hyperbolic_secant() {
    let means = [-1.0, 0.0, 1.0];
    for (i, kind) in [FamilyKind::Logistic, FamilyKind::HyperbolicSecant]
        .into_iter()
        .enumerate()
    {
        let seed = 200 + 50 * i as u64;
        check(
            kind,
            NullSpec::Point { mu0: 0.0 },
            OmegaDensity::Uniform,
            &means,
            seed,
        );
        check(
            kind,
            NullSpec::BoundedOpen { a: -1.0, b: 2.0 },
            OmegaDensity::Triangular,
            &means,
            seed + 10,
        );
        check(
            kind,
            NullSpec::OneSidedOpen { b: 0.0 },
            OmegaDensity::Triangular,
            &means,
            seed + 20,
        );
    }
}
