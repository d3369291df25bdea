use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::bounded::{bounded_certificate, BoundednessCertificate, DEFAULT_CEILING};
use super::{LinearOperator, SphereSampling};
use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::TNorm;
use crate::space::sequence::{seq_convergence, Mode, SequenceSpec, Verdict};
use crate::space::{FuzzySpace, Profile};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSettings {
    /// Sequences approach the base point as `k^{-rate}`.
    pub rate: f64,
    pub n_max: u64,
    pub tol: f64,
    pub t_grid: Vec<f64>,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            rate: 1.0,
            n_max: 1_000_000,
            tol: 1e-3,
            t_grid: vec![0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointProbe {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub domain: Verdict,
    pub image: Verdict,
    /// `None` when the domain sequence itself was not seen to converge.
    pub continuous: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityOutcome {
    pub continuous: bool,
    /// Every base point received the same verdict.
    pub consistent_across_points: bool,
    pub probes: Vec<PointProbe>,
}

/// Probe sequential continuity: `x_k = x + k^{-q} v → x` in X should force
/// `T x_k → T x` in Y, judged with classical convergence on a grid of `t`.
pub fn continuity_probe(
    t: &LinearOperator,
    base_points: &[DVector<f64>],
    directions: &[DVector<f64>],
    settings: &ProbeSettings,
) -> Result<ContinuityOutcome> {
    let mode = Mode::Classical {
        t_grid: settings.t_grid.clone(),
    };
    let mut probes = Vec::new();
    let mut per_point = Vec::new();
    for x in base_points {
        let mut point_ok = true;
        for v in directions {
            let domain_seq = SequenceSpec::power(x.clone(), v.clone(), settings.rate);
            let image_seq = SequenceSpec::power(t.apply(x), t.apply(v), settings.rate);
            let d = seq_convergence(t.domain(), &domain_seq, &mode, settings.n_max, settings.tol)?.verdict;
            let i = seq_convergence(t.codomain(), &image_seq, &mode, settings.n_max, settings.tol)?.verdict;
            let continuous = (d == Verdict::Converges).then_some(i == Verdict::Converges);
            point_ok &= continuous == Some(true);
            probes.push(PointProbe {
                base: x.iter().copied().collect(),
                direction: v.iter().copied().collect(),
                domain: d,
                image: i,
                continuous,
            });
        }
        per_point.push(point_ok);
    }
    Ok(ContinuityOutcome {
        continuous: !per_point.is_empty() && per_point.iter().all(|&c| c),
        consistent_across_points: per_point.windows(2).all(|w| w[0] == w[1]),
        probes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleVariant {
    /// Step(1/2) domain, reciprocal codomain, `T = 2I`: continuous, not bounded.
    StepDomain,
    /// Reciprocal on both sides, `T = 2I`: bounded with `M_α = 2α/(1-α)`.
    ReciprocalDomain,
    /// Step(1/2) domain, `T = 0`.
    ZeroOperator,
}

impl CounterexampleVariant {
    pub fn name(self) -> &'static str {
        match self {
            CounterexampleVariant::StepDomain => "step-domain",
            CounterexampleVariant::ReciprocalDomain => "reciprocal-domain",
            CounterexampleVariant::ZeroOperator => "zero-operator",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleOutcome {
    pub variant: CounterexampleVariant,
    pub continuous: bool,
    pub bounded: bool,
    pub unbounded_alphas: Vec<f64>,
    pub certificate: BoundednessCertificate,
    pub continuity: ContinuityOutcome,
}

/// Build the continuous-but-unbounded example (and two controls), probe both
/// properties and compare against the expected verdicts.
///
/// Returns [`Error::VerdictMismatch`] when either leg disagrees with the
/// expectation for the chosen variant.
pub fn counterexample_suite(
    variant: CounterexampleVariant,
    dim: usize,
    alphas: &[f64],
    sphere: SphereSampling,
    probe: &ProbeSettings,
) -> Result<CounterexampleOutcome> {
    let step = Profile::step(0.5)?;
    let domain_profile = match variant {
        CounterexampleVariant::ReciprocalDomain => Profile::Reciprocal,
        _ => step,
    };
    let x_sp = Arc::new(FuzzySpace::euclidean(dim, 1.0, domain_profile, TNorm::Minimum)?);
    let y_sp = Arc::new(FuzzySpace::euclidean(dim, 1.0, Profile::Reciprocal, TNorm::Minimum)?);
    let gain = if variant == CounterexampleVariant::ZeroOperator { 0.0 } else { 2.0 };
    let t = LinearOperator::new(DMatrix::identity(dim, dim) * gain, x_sp, y_sp)?;

    let certificate = bounded_certificate(&t, alphas, sphere, DEFAULT_CEILING)?;
    let (bases, dirs) = probe_points(dim, sphere.seed);
    let continuity = continuity_probe(&t, &bases, &dirs, probe)?;

    let out = CounterexampleOutcome {
        variant,
        continuous: continuity.continuous,
        bounded: certificate.is_bounded(),
        unbounded_alphas: certificate.unbounded_alphas(),
        certificate,
        continuity,
    };
    let expected: Vec<f64> = match variant {
        CounterexampleVariant::StepDomain => alphas.iter().copied().filter(|&a| a >= 0.5).collect(),
        _ => Vec::new(),
    };
    if !out.continuous {
        return Err(Error::VerdictMismatch(format!("{}: continuity probe failed", variant.name())));
    }
    if out.unbounded_alphas != expected {
        return Err(Error::VerdictMismatch(format!(
            "{}: unbounded at {:?}, expected {:?}",
            variant.name(),
            out.unbounded_alphas,
            expected
        )));
    }
    Ok(out)
}

/// The origin, a unit axis point and a few seeded points, with axis and seeded directions.
pub fn probe_points(dim: usize, seed: u64) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let mut rng = sampling::rng(seed ^ 0x5eed);
    let mut e1 = DVector::zeros(dim);
    e1[0] = 1.0;
    let mut bases = vec![DVector::zeros(dim), e1.clone()];
    bases.extend((0..3).map(|_| sampling::scaled_vector(&mut rng, dim, 0.1, 10.0)));
    let mut dirs = vec![e1];
    dirs.extend((0..3).map(|_| sampling::scaled_vector(&mut rng, dim, 0.1, 10.0)));
    (bases, dirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (1..10).map(|k| k as f64 / 10.0).collect()
    }

    fn quick() -> ProbeSettings {
        ProbeSettings {
            n_max: 100_000,
            ..Default::default()
        }
    }

    #[test]
    fn step_domain_is_continuous_but_unbounded() {
        let out = counterexample_suite(CounterexampleVariant::StepDomain, 2, &grid(), SphereSampling::new(64, 1), &quick()).unwrap();
        assert!(out.continuous && !out.bounded);
        assert_eq!(out.unbounded_alphas, vec![0.5, 0.6, 0.7, 0.8, 0.9]);
        assert!(out.continuity.consistent_across_points);
    }

    #[test]
    fn controls_are_bounded() {
        let r = counterexample_suite(CounterexampleVariant::ReciprocalDomain, 2, &grid(), SphereSampling::new(64, 1), &quick()).unwrap();
        assert!(r.bounded);
        for e in &r.certificate.entries {
            let a = e.alpha;
            assert!((e.m().unwrap() - 2.0 * a / (1.0 - a)).abs() < 1e-6);
        }
        let z = counterexample_suite(CounterexampleVariant::ZeroOperator, 2, &grid(), SphereSampling::new(64, 1), &quick()).unwrap();
        assert!(z.bounded);
        assert!(z.certificate.entries.iter().all(|e| e.m() == Some(0.0)));
    }

    #[test]
    fn constant_sequences_are_trivially_continuous() {
        let sp = Arc::new(FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap());
        let i = LinearOperator::identity(sp);
        let base = vec![DVector::from_vec(vec![1.0, 2.0])];
        let out = continuity_probe(&i, &base, &[DVector::zeros(2)], &quick()).unwrap();
        assert!(out.continuous);
    }

    #[test]
    fn stalled_domain_sequence_gives_no_verdict() {
        let sp = Arc::new(FuzzySpace::euclidean(1, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap());
        let i = LinearOperator::identity(sp);
        let settings = ProbeSettings { rate: 0.0, ..quick() };
        let out = continuity_probe(&i, &[DVector::zeros(1)], &[DVector::from_element(1, 1.0)], &settings).unwrap();
        assert!(!out.continuous);
        assert_eq!(out.probes[0].continuous, None);
    }
}
