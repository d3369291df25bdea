use std::sync::Arc;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::bounded::{bounded_certificate, BoundednessCertificate, DEFAULT_CEILING};
use super::{LinearOperator, SphereSampling};
use crate::check::Witness;
use crate::error::{Error, Result};
use crate::sampling;
use crate::space::FuzzySpace;

/// Grid step for the level `β` with `β * β ≥ α`.
pub const BETA_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceEntry {
    pub alpha: f64,
    pub beta: f64,
    /// Sampled `M_α` of `k₁T₁ + k₂T₂`.
    pub m: f64,
    /// `K (φ(k₁) M¹_β + φ(k₂) M²_β)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceOutcome {
    pub entries: Vec<SubspaceEntry>,
    pub combined_bounded: bool,
    pub bound_violations: usize,
    pub split_checked: usize,
    pub split_violations: usize,
    pub split_witness: Option<Witness>,
}

impl SubspaceOutcome {
    pub fn passed(&self) -> bool {
        self.combined_bounded && self.bound_violations == 0 && self.split_violations == 0
    }
}

/// Certify `k₁T₁ + k₂T₂` bounded from certificates of `T₁`, `T₂` at the
/// shifted level `β(α)`, and check `d_α(x+y)/K ≤ d_β(x) + d_β(y)` in the
/// codomain on sampled pairs.
#[allow(clippy::too_many_arguments)]
pub fn subspace_check(
    t1: &LinearOperator,
    t2: &LinearOperator,
    k1: f64,
    k2: f64,
    alphas: &[f64],
    sphere: SphereSampling,
    pair_samples: usize,
    tol: f64,
) -> Result<SubspaceOutcome> {
    if k1 == 0.0 || k2 == 0.0 {
        return Err(Error::invalid("k", "scalars must be nonzero"));
    }
    let y = t1.codomain().clone();
    let tnorm = y.tnorm();
    let mut betas = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let b = tnorm
            .square_root_level(a, BETA_STEP)
            .ok_or_else(|| Error::PreconditionUnmet(format!("no grid level beta with beta * beta >= {a}")))?;
        if !(b < 1.0) {
            return Err(Error::PreconditionUnmet(format!("level beta for alpha = {a} is 1")));
        }
        betas.push(b);
    }
    let c1 = bounded_certificate(t1, &betas, sphere, DEFAULT_CEILING)?;
    let c2 = bounded_certificate(t2, &betas, sphere, DEFAULT_CEILING)?;
    if !c1.is_bounded() || !c2.is_bounded() {
        return Err(Error::PreconditionUnmet("summands are not certified bounded at the shifted levels".into()));
    }
    let sum = t1.combine(k1, t2, k2)?;
    let cs = bounded_certificate(&sum, alphas, sphere, DEFAULT_CEILING)?;

    let phi = y.phi();
    let k = sum.k();
    let mut entries = Vec::new();
    let mut bound_violations = 0;
    for ((e, &beta), (m1, m2)) in cs.entries.iter().zip(&betas).zip(c1.entries.iter().zip(&c2.entries)) {
        let bound = k * (phi.eval(k1) * m1.m().unwrap_or(f64::INFINITY) + phi.eval(k2) * m2.m().unwrap_or(f64::INFINITY));
        let m = e.m().unwrap_or(f64::INFINITY);
        if m > bound * (1.0 + tol) + tol {
            bound_violations += 1;
        }
        entries.push(SubspaceEntry {
            alpha: e.alpha,
            beta,
            m,
            bound,
        });
    }

    let mut rng = sampling::rng(sphere.seed ^ 0x1e3a);
    let mut split_checked = 0;
    let mut split_violations = 0;
    let mut split_witness = None;
    for _ in 0..pair_samples {
        let a = sampling::scaled_vector(&mut rng, y.dim(), 1e-2, 1e2);
        let b = sampling::scaled_vector(&mut rng, y.dim(), 1e-2, 1e2);
        let (ra, rb, rab) = (y.rho().eval(&a), y.rho().eval(&b), y.rho().eval(&(&a + &b)));
        for (&alpha, &beta) in alphas.iter().zip(&betas) {
            let lhs = y.level_fine(rab, alpha, false)? / k;
            let rhs = y.level_fine(ra, beta, false)? + y.level_fine(rb, beta, false)?;
            split_checked += 1;
            if lhs > rhs + tol * rhs.max(1.0) {
                split_violations += 1;
                split_witness.get_or_insert_with(|| Witness::new([ra, rb, rab, alpha, beta], lhs, rhs));
            }
        }
    }

    Ok(SubspaceOutcome {
        combined_bounded: cs.is_bounded(),
        entries,
        bound_violations,
        split_checked,
        split_violations,
        split_witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub precondition_met: bool,
    pub operators: usize,
    /// Indices of operators with an unbounded level (a contradiction when the precondition holds).
    pub unbounded: Vec<usize>,
    /// Largest `M_α` across the fleet, per grid level.
    pub max_m: Vec<(f64, f64)>,
    pub certificates: Vec<BoundednessCertificate>,
}

impl SweepOutcome {
    pub fn all_bounded(&self) -> bool {
        self.precondition_met && self.unbounded.is_empty()
    }
}

/// Certify a fleet of random matrices (the zero matrix first) between two spaces.
///
/// When the domain lacks the positivity condition the sweep does not run and
/// reports the precondition as unmet instead of asserting boundedness.
pub fn finite_dim_boundedness_sweep(
    domain: Arc<FuzzySpace>,
    codomain: Arc<FuzzySpace>,
    operator_count: usize,
    alphas: &[f64],
    sphere: SphereSampling,
    seed: u64,
) -> Result<SweepOutcome> {
    if !domain.satisfies_nvi() {
        return Ok(SweepOutcome {
            precondition_met: false,
            operators: 0,
            unbounded: Vec::new(),
            max_m: Vec::new(),
            certificates: Vec::new(),
        });
    }
    let mut rng = sampling::rng(seed);
    let (rows, cols) = (codomain.dim(), domain.dim());
    let mut certificates = Vec::with_capacity(operator_count);
    let mut unbounded = Vec::new();
    let mut max_m: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, 0.0)).collect();
    for i in 0..operator_count {
        let matrix = if i == 0 {
            DMatrix::zeros(rows, cols)
        } else {
            DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
        };
        let t = LinearOperator::new(matrix, domain.clone(), codomain.clone())?;
        let cert = bounded_certificate(&t, alphas, sphere, DEFAULT_CEILING)?;
        if !cert.is_bounded() {
            unbounded.push(i);
        }
        for (slot, e) in max_m.iter_mut().zip(&cert.entries) {
            if let Some(m) = e.m() {
                slot.1 = slot.1.max(m);
            }
        }
        certificates.push(cert);
    }
    Ok(SweepOutcome {
        precondition_met: true,
        operators: operator_count,
        unbounded,
        max_m,
        certificates,
    })
}
