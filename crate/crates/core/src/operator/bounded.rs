use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use super::{unit_directions, LinearOperator, SphereSampling};
use crate::check::Witness;
use crate::error::{Error, Result};
use crate::sampling;
use crate::space::LEVEL_TOL;

/// Ratios above this are treated as unbounded rather than as large constants.
pub const DEFAULT_CEILING: f64 = 1e12;

/// `B(x, α) = (d^Y_α(Tx) / K) / d^X_{1-α}(x)`, with `0/0 = 0` and `c/0 = ∞`.
///
/// The supremum of `B` over `x ≠ θ` is the smallest admissible `M_α`. Both
/// level infima scale by `φ(c)` under `x ↦ cx`, so `B` is constant on rays.
pub fn boundedness_ratio(t: &LinearOperator, x: &DVector<f64>, alpha: f64) -> Result<f64> {
    if x.len() != t.domain().dim() {
        return Err(Error::DimensionMismatch {
            expected: t.domain().dim(),
            got: x.len(),
        });
    }
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::invalid("x", "the boundedness ratio needs a nonzero vector"));
    }
    let num = t.codomain().d_alpha_fine(&t.apply(x), alpha)? / t.k();
    let den = t.domain().d_alpha_fine(x, 1.0 - alpha)?;
    Ok(ratio(num, den))
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Bound {
    Finite { m: f64, argmax: Vec<f64> },
    Unbounded { witness: Vec<f64>, ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertEntry {
    pub alpha: f64,
    pub bound: Bound,
}

impl CertEntry {
    pub fn m(&self) -> Option<f64> {
        match self.bound {
            Bound::Finite { m, .. } => Some(m),
            Bound::Unbounded { .. } => None,
        }
    }
}

/// Sampled `M_α` for each `α` on a grid, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundednessCertificate {
    pub entries: Vec<CertEntry>,
    pub sphere_samples: usize,
    pub seed: u64,
    pub ceiling: f64,
}

impl BoundednessCertificate {
    pub fn is_bounded(&self) -> bool {
        self.entries.iter().all(|e| e.m().is_some())
    }

    pub fn m(&self, alpha: f64) -> Option<f64> {
        self.entry(alpha).and_then(CertEntry::m)
    }

    pub fn entry(&self, alpha: f64) -> Option<&CertEntry> {
        self.entries.iter().find(|e| (e.alpha - alpha).abs() < 1e-12)
    }

    pub fn unbounded_alphas(&self) -> Vec<f64> {
        self.entries.iter().filter(|e| e.m().is_none()).map(|e| e.alpha).collect()
    }
}

/// Estimate `M_α` as the largest boundedness ratio over unit-ρ directions.
pub fn bounded_certificate(
    t: &LinearOperator,
    alphas: &[f64],
    sampling: SphereSampling,
    ceiling: f64,
) -> Result<BoundednessCertificate> {
    let dirs = unit_directions(t.domain(), sampling);
    let images: Vec<DVector<f64>> = dirs.iter().map(|d| t.apply(d)).collect();
    let mut entries = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut best = (0.0f64, 0usize);
        let mut unbounded = None;
        for (i, (d, td)) in dirs.iter().zip(&images).enumerate() {
            let num = t.codomain().d_alpha_fine(td, alpha)? / t.k();
            let den = t.domain().d_alpha_fine(d, 1.0 - alpha)?;
            let b = ratio(num, den);
            if b.is_infinite() || b > ceiling {
                unbounded = Some((i, b));
                break;
            }
            if b > best.0 {
                best = (b, i);
            }
        }
        let bound = match unbounded {
            Some((i, ratio)) => Bound::Unbounded {
                witness: dirs[i].iter().copied().collect(),
                ratio,
            },
            None => Bound::Finite {
                m: best.0,
                argmax: dirs[best.1].iter().copied().collect(),
            },
        };
        entries.push(CertEntry { alpha, bound });
    }
    Ok(BoundednessCertificate {
        entries,
        sphere_samples: dirs.len(),
        seed: sampling.seed,
        ceiling,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceOutcome {
    pub alpha: f64,
    pub m: f64,
    pub checked: usize,
    /// Sampled `(x, t, s)` where the premise `N_X(x, t/M) ≥ 1-α` held but `N_Y(Tx, Ks) < α`.
    pub implication_violations: usize,
    /// Sampled `x` where `d^Y_α(Tx)/K > M·d^X_{1-α}(x)`.
    pub infimum_violations: usize,
    /// Samples on which the two forms disagreed about whether `x` is a violation.
    pub disagreements: usize,
    pub witness: Option<Witness>,
}

impl EquivalenceOutcome {
    pub fn passed(&self) -> bool {
        self.implication_violations == 0 && self.infimum_violations == 0 && self.disagreements == 0
    }
}

/// Cross-check the implication form and the infimum form of boundedness.
///
/// For each sampled `x` both forms are evaluated: the implication on a random
/// `t > 0`, `s > t` and on the tight pair `t = M·d^X_{1-α}(x)·(1+δ)`,
/// `s = t(1+δ)`; the infimum form directly. The tight pair makes the
/// implication fail exactly when the infimum form does, so the two verdicts
/// must agree on every sample.
///
/// Directions of `x` are drawn from the certificate's own direction set (with
/// random scale and sign), so the check exercises the equivalence of the two
/// forms rather than the resolution of the sampled supremum.
pub fn defn_equivalence_check(
    t: &LinearOperator,
    certificate: &BoundednessCertificate,
    alpha: f64,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<EquivalenceOutcome> {
    let m = certificate
        .m(alpha)
        .ok_or_else(|| Error::PreconditionUnmet(format!("no finite M at alpha = {alpha}")))?;
    let sphere = SphereSampling::new(certificate.sphere_samples, certificate.seed);
    equivalence_with_m(t, alpha, m, sphere, sample_count, seed, tol)
}

/// [`defn_equivalence_check`] against an arbitrary constant `m` instead of a certified one.
pub fn equivalence_with_m(
    t: &LinearOperator,
    alpha: f64,
    m: f64,
    sphere: SphereSampling,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<EquivalenceOutcome> {
    const DELTA: f64 = 1e-6;
    let (x_sp, y_sp, k) = (t.domain(), t.codomain(), t.k());
    let mut rng = sampling::rng(seed);
    let dirs = unit_directions(x_sp, sphere);
    let mut out = EquivalenceOutcome {
        alpha,
        m,
        checked: 0,
        implication_violations: 0,
        infimum_violations: 0,
        disagreements: 0,
        witness: None,
    };
    // premise N_X(x, t/M) ≥ 1-α; with M = 0 the premise reads N_X(x, ∞) = 1
    let implication = |rx: f64, rtx: f64, tt: f64, ss: f64| -> (bool, f64) {
        let premise = if m == 0.0 { 1.0 } else { x_sp.norm_from_rho(rx, tt / m) };
        let concl = y_sp.norm_from_rho(rtx, k * ss);
        (premise >= 1.0 - alpha && concl < alpha - tol, concl)
    };
    for _ in 0..sample_count {
        let c = sampling::log_uniform(&mut rng, 1e-2, 1e2) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let x = &dirs[rng.random_range(0..dirs.len())] * c;
        let tx = t.apply(&x);
        let (rx, rtx) = (x_sp.rho().eval(&x), y_sp.rho().eval(&tx));
        let dx = x_sp.level_fine(rx, 1.0 - alpha, false)?;
        let dy = y_sp.level_fine(rtx, alpha, false)?;

        let scale = (m * dx).max(rx).max(f64::MIN_POSITIVE);
        let tt = scale * sampling::log_uniform(&mut rng, 1e-3, 1e3);
        let ss = tt * (1.0 + sampling::log_uniform(&mut rng, 1e-6, 10.0));
        let (bad_random, concl) = implication(rx, rtx, tt, ss);
        if bad_random {
            out.implication_violations += 1;
            out.witness.get_or_insert_with(|| Witness::new([rx, tt, ss], concl, alpha));
        }

        // bisection error of dy and dx (see level_fine), the latter amplified by M
        let slack = tol * (m * dx).max(1.0) + LEVEL_TOL * (rtx.min(1.0) / k + m * rx.min(1.0));
        let infimum_bad = dy / k > m * dx + slack;
        let tight_bad = if m == 0.0 {
            // M = 0 admits every t > 0, so the conclusion must hold for arbitrarily small s
            dy > 0.0 && {
                let ss = 0.5 * dy / k;
                implication(rx, rtx, ss / (1.0 + DELTA), ss).0
            }
        } else {
            let tt = (m * dx * (1.0 + DELTA)).max(f64::MIN_POSITIVE);
            implication(rx, rtx, tt, tt * (1.0 + DELTA)).0
        };
        if infimum_bad {
            out.infimum_violations += 1;
            out.witness
                .get_or_insert_with(|| Witness::new(x.iter().copied().collect::<Vec<_>>(), dy / k, m * dx));
        }
        if tight_bad {
            out.implication_violations += 1;
        }
        if infimum_bad != tight_bad {
            out.disagreements += 1;
        }
        out.checked += 1;
    }
    Ok(out)
}
