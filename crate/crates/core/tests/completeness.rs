use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use phibnorm::completeness::{limit_uniqueness_probe, operator_seq_cauchy, operator_seq_limit};
use phibnorm::space::sequence::{SequenceSpec, Verdict};
use phibnorm::{Decay, FuzzySpace, LinearOperator, OperatorSequence, Profile, SphereSampling, TNorm};

fn grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn recip(n: usize) -> Arc<FuzzySpace> {
    Arc::new(FuzzySpace::euclidean(n, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap())
}

#[test]
fn cauchy_measure_follows_scaled_identity() {
    // N(cI, s) > 1-α  ⇔  s > c(1-α)/α on the reciprocal space
    let seq = OperatorSequence::new(LinearOperator::identity(recip(2)), DMatrix::identity(2, 2), Decay::Power { q: 1.0 }, 1000).unwrap();
    let out = operator_seq_cauchy(&seq, &grid(), 1e-2, SphereSampling::new(64, 1)).unwrap();
    assert_eq!(out.verdict, Verdict::Converges);
    for p in &out.trace {
        let (n, m) = p.pair.unwrap();
        if n == m {
            continue;
        }
        let c = (1.0 / n as f64 - 1.0 / m as f64).abs();
        let expect = c * 0.9 / 0.1;
        assert!((p.value - expect).abs() <= 1e-4 * expect, "{p:?} vs {expect}");
    }
    for d in &out.direct {
        assert!(d.relative_gap() < 1e-6, "{d:?}");
    }
}

#[test]
fn geometric_family_recovers_base() {
    let sp = recip(3);
    let base = LinearOperator::new(DMatrix::from_fn(3, 3, |i, j| (i as f64 + 1.0) - 0.7 * j as f64), sp.clone(), sp).unwrap();
    let s = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.2 } else { 0.05 });
    let seq = OperatorSequence::new(base.clone(), s, Decay::Geometric { r: 0.5 }, 50).unwrap();
    let (cauchy, lim) = operator_seq_limit(&seq, &grid(), 1e-6, SphereSampling::new(256, 2)).unwrap();
    assert_eq!(cauchy.verdict, Verdict::Converges);
    assert!(lim.entry_error <= 1e-9);
    assert!(lim.certificate.is_bounded());
    assert!(lim.residuals.iter().all(|r| r.1 < 1e-6));
}

#[test]
fn uniqueness_floor_matches_strict_quantile() {
    // reciprocal: N(z, t) > 1-α  ⇔  t > ρ(z)/α
    let sp = FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Product).unwrap();
    let x = DVector::from_vec(vec![0.5, 2.0]);
    let v = DVector::from_vec(vec![0.3, -0.4]);
    let seq = SequenceSpec::power(x.clone(), v, 1.0).with_limit(x.clone());
    let w = DVector::from_vec(vec![0.6, 0.8]);
    for alpha in [0.25, 0.5, 0.75] {
        let out = limit_uniqueness_probe(&sp, &seq, &[&x + &w, x.clone()], alpha, 10_000_000, 1e-6).unwrap();
        assert!(out.unique);
        let floor = out.decoys[0].floor.unwrap();
        assert!((floor - 1.0 / alpha).abs() < 1e-6, "{alpha}: {floor}");
        assert!(out.decoys[1].floor.is_none());
    }
}
