use std::sync::Arc;

use nalgebra::DMatrix;
use phibnorm::opnorm::{opnorm_axiom_check, NormCheckPlan, ALPHA_TOL};
use phibnorm::{FuzzySpace, LinearOperator, OperatorNorm, Profile, SphereSampling, TNorm};
use proptest::prelude::*;

fn recip(p: f64) -> Arc<FuzzySpace> {
    Arc::new(FuzzySpace::euclidean(2, p, Profile::Reciprocal, TNorm::Minimum).unwrap())
}

/// Largest singular value of a 2x2 matrix from the eigenvalues of AᵀA.
fn sigma_2x2(a: [f64; 4]) -> f64 {
    let [a, b, c, d] = a;
    let tr = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).powi(2);
    ((tr + (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // reciprocal on both sides: g(α) = α/(1-α) σ^p, so N(T, s) = s / (s + σ^p)
    #[test]
    fn matches_reciprocal_closed_form(entries in prop::array::uniform4(-3.0f64..3.0), s in 0.05f64..20.0, p in prop::sample::select(vec![1.0, 2.0])) {
        let sp = recip(p);
        let t = LinearOperator::new(DMatrix::from_row_slice(2, 2, &entries), sp.clone(), sp).unwrap();
        let e = OperatorNorm::new(t, SphereSampling::new(2048, 7), ALPHA_TOL).unwrap();
        let gain = sigma_2x2(entries).powf(p);
        let expect = if gain == 0.0 { 1.0 } else { s / (s + gain) };
        prop_assert!((e.norm(s).unwrap() - expect).abs() < 5e-6, "{} vs {}", e.norm(s).unwrap(), expect);
    }

    #[test]
    fn monotone_in_s(entries in prop::array::uniform4(-3.0f64..3.0), s in 0.01f64..10.0, ds in 0.0f64..10.0) {
        let sp = recip(1.0);
        let t = LinearOperator::new(DMatrix::from_row_slice(2, 2, &entries), sp.clone(), sp).unwrap();
        let e = OperatorNorm::new(t, SphereSampling::new(256, 1), ALPHA_TOL).unwrap();
        prop_assert!(e.norm(s).unwrap() <= e.norm(s + ds).unwrap());
    }
}

#[test]
fn level_in_s_inverts_closed_form() {
    // N(T, s) ≥ α  ⇔  s ≥ σ α/(1-α)
    let entries = [2.0, 1.0, 0.0, -1.0];
    let sp = recip(1.0);
    let t = LinearOperator::new(DMatrix::from_row_slice(2, 2, &entries), sp.clone(), sp).unwrap();
    let e = OperatorNorm::new(t, SphereSampling::new(4096, 2), ALPHA_TOL).unwrap();
    let sigma = sigma_2x2(entries);
    for a in [0.2, 0.5, 0.8] {
        let expect = sigma * a / (1.0 - a);
        let got = e.level(a, false).unwrap();
        assert!((got - expect).abs() < 1e-4 * expect, "{a}: {got} vs {expect}");
    }
}

#[test]
fn axioms_hold_for_p2_scaling() {
    let sp = recip(2.0);
    let fleet = vec![
        LinearOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, -0.5, 0.25, 2.0]), sp.clone(), sp.clone()).unwrap(),
        LinearOperator::zero(sp.clone(), sp).unwrap(),
    ];
    let plan = NormCheckPlan {
        sampling: SphereSampling::new(128, 3),
        ..Default::default()
    };
    let r = opnorm_axiom_check(&fleet, &plan).unwrap();
    for name in ["zero-for-nonpositive-s", "unit-iff-zero-operator", "phi-scaling", "monotone-with-unit-limit", "g-monotone"] {
        assert!(r.outcome(name).unwrap().passed, "{name}: {:?}", r.outcome(name));
    }
}

// small operators are where an absolute bisection tolerance on t would break scaling
#[test]
fn gain_scales_exactly_for_tiny_operators() {
    let sp = recip(2.0);
    let s = LinearOperator::new(DMatrix::from_row_slice(2, 2, &[0.3, -0.2, 0.1, 0.4]), sp.clone(), sp).unwrap();
    let sph = SphereSampling::new(256, 21);
    let e = OperatorNorm::new(s.clone(), sph, ALPHA_TOL).unwrap();
    for c in [1e-3, 1e-6] {
        let tiny = OperatorNorm::new(s.scaled(c), sph, ALPHA_TOL).unwrap();
        for a in [0.1, 0.5, 0.9] {
            let (g, gc) = (e.g(a).unwrap(), tiny.g(a).unwrap());
            assert!((gc / (g * c * c) - 1.0).abs() < 1e-9, "c={c} alpha={a}: {gc} vs {}", g * c * c);
            let (l, lc) = (e.level(a, true).unwrap(), tiny.level(a, true).unwrap());
            assert!((lc / (l * c * c) - 1.0).abs() < 1e-6, "c={c} alpha={a}: level {lc} vs {}", l * c * c);
        }
    }
}
