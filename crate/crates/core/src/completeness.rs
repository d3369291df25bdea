//! Operator sequences `T_k = T + a_k S` and the limit probes built on them.
//!
//! Differences inside the family are exact multiples of `S`, so the Cauchy
//! measure only needs the level profile of `S` once; the limit itself is
//! checked directly against the operator norm.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{bounded_certificate, BoundednessCertificate, LinearOperator, SphereSampling, DEFAULT_CEILING};
use crate::opnorm::{check_preconditions, OperatorNorm, ALPHA_TOL};
use crate::space::sequence::{checkpoints, classify, pair_indices, seq_convergence, Mode, SequenceSpec, TracePoint, Verdict};
use crate::space::FuzzySpace;

/// Coefficient `a_k` of the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decay {
    /// `k^{-q}`; negative `q` grows.
    Power { q: f64 },
    /// `r^k`.
    Geometric { r: f64 },
    /// `k mod 2`.
    Alternating,
    /// `0`: the constant sequence `T`.
    Constant,
}

impl Decay {
    pub fn coefficient(self, k: u64) -> f64 {
        match self {
            Decay::Power { q } => (k as f64).powf(-q),
            Decay::Geometric { r } => r.powf(k as f64),
            Decay::Alternating => (k % 2) as f64,
            Decay::Constant => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OperatorSequence {
    pub base: LinearOperator,
    pub perturbation: LinearOperator,
    pub decay: Decay,
    pub n_max: u64,
}

impl OperatorSequence {
    pub fn new(base: LinearOperator, perturbation: DMatrix<f64>, decay: Decay, n_max: u64) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::invalid("n_max", "horizon must be at least 2"));
        }
        let perturbation = base.with_matrix(perturbation)?;
        Ok(OperatorSequence {
            base,
            perturbation,
            decay,
            n_max,
        })
    }

    pub fn coefficient(&self, k: u64) -> f64 {
        self.decay.coefficient(k)
    }

    pub fn term(&self, k: u64) -> LinearOperator {
        self.base
            .combine(1.0, &self.perturbation, self.coefficient(k))
            .expect("base and perturbation share spaces")
    }
}

/// One Cauchy measure recomputed from `T_n - T_m` itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectCheck {
    pub pair: (u64, u64),
    pub alpha: f64,
    pub from_profile: f64,
    pub direct: f64,
}

impl DirectCheck {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.direct.abs().max(self.from_profile.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.direct - self.from_profile).abs() / scale
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyOutcome {
    pub verdict: Verdict,
    /// Worst `λ_{n,m}(α)` over the pairs and levels at each checkpoint.
    pub trace: Vec<TracePoint>,
    /// `(α, ⋀{s : N(S, s) > 1-α})`.
    pub perturbation_levels: Vec<(f64, f64)>,
    pub direct: Vec<DirectCheck>,
    pub witness: Option<TracePoint>,
}

fn strict_levels(engine: &OperatorNorm, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    alphas.iter().map(|&a| Ok((a, engine.level(1.0 - a, true)?))).collect()
}

/// `λ_{n,m}(α) = ⋀{s : N(T_n - T_m, s) > 1-α}` on the checkpoint pairs.
///
/// Uses `λ_{n,m}(α) = φ(|a_n - a_m|) λ_S(α)` from the scaling identity and
/// recomputes the widest pair at the horizon directly as a cross-check.
pub fn operator_seq_cauchy(seq: &OperatorSequence, alphas: &[f64], tol: f64, sampling: SphereSampling) -> Result<CauchyOutcome> {
    check_preconditions(&seq.base)?;
    if alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::invalid("alpha_grid", "levels must lie in (0, 1)"));
    }
    let s_engine = OperatorNorm::new(seq.perturbation.clone(), sampling, ALPHA_TOL)?;
    let levels = strict_levels(&s_engine, alphas)?;
    let s_worst = levels.iter().map(|l| l.1).fold(0.0, f64::max);
    let phi = seq.base.codomain().phi();

    let cps = checkpoints(seq.n_max);
    let mut trace = Vec::with_capacity(cps.len());
    for &big in &cps {
        let idx = pair_indices(big, &cps);
        let mut worst = TracePoint {
            n: big,
            pair: Some((big, big)),
            value: 0.0,
        };
        for (i, &n) in idx.iter().enumerate() {
            for &m in &idx[i + 1..] {
                let v = phi.eval(seq.coefficient(n) - seq.coefficient(m)) * s_worst;
                if v > worst.value {
                    worst.pair = Some((n, m));
                    worst.value = v;
                }
            }
        }
        trace.push(worst);
    }

    let mut direct = Vec::new();
    if let Some((n, m)) = trace.last().and_then(|p| p.pair) {
        let diff = seq.term(n).combine(1.0, &seq.term(m), -1.0)?;
        let engine = OperatorNorm::new(diff, sampling, ALPHA_TOL)?;
        let c = phi.eval(seq.coefficient(n) - seq.coefficient(m));
        for (&(alpha, ls), (_, ld)) in levels.iter().zip(strict_levels(&engine, alphas)?) {
            direct.push(DirectCheck {
                pair: (n, m),
                alpha,
                from_profile: c * ls,
                direct: ld,
            });
        }
    }

    let verdict = classify(&trace, tol);
    Ok(CauchyOutcome {
        verdict,
        witness: (verdict != Verdict::Converges).then(|| trace.last().cloned()).flatten(),
        trace,
        perturbation_levels: levels,
        direct,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitOutcome {
    pub limit: Vec<Vec<f64>>,
    /// Largest entrywise gap between the recovered limit and the base operator.
    pub entry_error: f64,
    pub certificate: BoundednessCertificate,
    /// Worst `⋀{s : N(T_n - L, s) ≥ α}` over the grid at each checkpoint.
    pub residual_trace: Vec<TracePoint>,
    /// `(α, residual)` at the horizon.
    pub residuals: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

impl LimitOutcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Converges && self.certificate.is_bounded()
    }
}

/// Recover the limit of a Cauchy family and check operator-norm convergence.
///
/// The limit is eliminated from the basis images of two far terms,
/// `L = (a_m T_n - a_n T_m) / (a_m - a_n)`, which removes the `S` component
/// without waiting for `a_k` to vanish.
pub fn operator_seq_limit(seq: &OperatorSequence, alphas: &[f64], tol: f64, sampling: SphereSampling) -> Result<(CauchyOutcome, LimitOutcome)> {
    let cauchy = operator_seq_cauchy(seq, alphas, tol, sampling)?;
    if cauchy.verdict != Verdict::Converges {
        return Err(Error::PreconditionUnmet(format!(
            "sequence is not Cauchy at the horizon ({:?})",
            cauchy.witness
        )));
    }
    let n = seq.n_max;
    let m = n / 2;
    let (an, am) = (seq.coefficient(n), seq.coefficient(m));
    let (tn, tm) = (seq.term(n), seq.term(m));
    let cols = seq.base.domain().dim();
    let images = |t: &LinearOperator| -> DMatrix<f64> {
        let mut out = DMatrix::zeros(t.codomain().dim(), cols);
        for j in 0..cols {
            out.set_column(j, &t.apply(&DVector::from_fn(cols, |i, _| if i == j { 1.0 } else { 0.0 })));
        }
        out
    };
    let (bn, bm) = (images(&tn), images(&tm));
    let limit = if am == an { bn } else { (bm.clone() * -an + bn * am) / (am - an) };
    if limit.iter().any(|v| !v.is_finite()) {
        return Err(Error::VerdictMismatch("pointwise limit diverges".into()));
    }
    let l = seq.base.with_matrix(limit)?;
    let entry_error = (l.matrix() - seq.base.matrix()).amax();
    let certificate = bounded_certificate(&l, alphas, sampling, DEFAULT_CEILING)?;

    let mut residual_trace = Vec::new();
    let mut residuals = Vec::new();
    for &k in &checkpoints(n) {
        let engine = OperatorNorm::new(seq.term(k).combine(1.0, &l, -1.0)?, sampling, ALPHA_TOL)?;
        let mut worst = 0.0f64;
        for &a in alphas {
            let r = engine.level(a, false)?;
            worst = worst.max(r);
            if k == n {
                residuals.push((a, r));
            }
        }
        residual_trace.push(TracePoint {
            n: k,
            pair: None,
            value: worst,
        });
    }
    let verdict = classify(&residual_trace, tol);
    let rows = (0..l.matrix().nrows()).map(|i| l.matrix().row(i).iter().copied().collect()).collect();
    Ok((
        cauchy,
        LimitOutcome {
            limit: rows,
            entry_error,
            certificate,
            residual_trace,
            residuals,
            verdict,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoyResult {
    pub decoy: Vec<f64>,
    /// `ρ(y - x)`; zero means `y` is the limit and is rejected.
    pub distance: f64,
    /// `min λ_n(y)` over the checkpoints in the second half of the horizon.
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessOutcome {
    pub alpha: f64,
    pub limit_verdict: Verdict,
    pub decoys: Vec<DecoyResult>,
    pub unique: bool,
}

/// Check `λ_n(x) → 0` for the declared limit and that each decoy keeps
/// `λ_n(y) = ⋀{t : N(x_n - y, t) > 1-α}` above a positive floor.
pub fn limit_uniqueness_probe(
    sp: &FuzzySpace,
    seq: &SequenceSpec,
    decoys: &[DVector<f64>],
    alpha: f64,
    n_max: u64,
    tol: f64,
) -> Result<UniquenessOutcome> {
    if !sp.tnorm().is_lower_semicontinuous() {
        return Err(Error::PreconditionUnmet(format!("t-norm {} is not lower semicontinuous", sp.tnorm())));
    }
    let x = seq
        .limit
        .clone()
        .ok_or_else(|| Error::invalid("sequence", "a limit must be declared"))?;
    let mode = Mode::AlphaFuzzy { alpha };
    let limit_verdict = seq_convergence(sp, seq, &mode, n_max, tol)?.verdict;
    let tail: Vec<u64> = checkpoints(n_max).into_iter().filter(|&c| 2 * c >= n_max).collect();
    let mut results = Vec::with_capacity(decoys.len());
    for y in decoys {
        if y.len() != sp.dim() {
            return Err(Error::DimensionMismatch {
                expected: sp.dim(),
                got: y.len(),
            });
        }
        let distance = sp.rho().eval(&(y - &x));
        let floor = if distance == 0.0 {
            None
        } else {
            let mut lo = f64::INFINITY;
            for &k in &tail {
                lo = lo.min(sp.level_fine(sp.rho().eval(&(seq.term(k) - y)), 1.0 - alpha, true)?);
            }
            Some(lo)
        };
        results.push(DecoyResult {
            decoy: y.iter().copied().collect(),
            distance,
            floor,
        });
    }
    let unique = limit_verdict == Verdict::Converges && results.iter().all(|d| d.floor.is_none_or(|f| f > tol));
    Ok(UniquenessOutcome {
        alpha,
        limit_verdict,
        decoys: results,
        unique,
    })
}
