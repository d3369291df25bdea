//! The operator fuzzy norm `N(T, s) = sup{α : g(α) ≤ s}`.
//!
//! `g(α)` is the worst level-infimum gain of `T` over unit-ρ directions,
//! `sup_x d^Y_α(Tx) / d^X_{1-α}(x)`; it is non-decreasing in `α`, so `N(T, ·)`
//! is found by bisection on `α`. Bisection always starts from `[0, 1]`, so the
//! probed levels are dyadic and repeat across calls; `g` is memoised on them.

use std::cell::RefCell;
use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::bisect;
use crate::check::{AxiomReport, Tally, Witness};
use crate::error::{Error, Result};
use crate::operator::{unit_directions, LinearOperator, SphereSampling};

/// Default resolution of the `α`-bisection.
pub const ALPHA_TOL: f64 = 1e-6;
/// Relative resolution of the `s`-bisection used for level infima of `N(T, ·)`.
pub const S_REL_TOL: f64 = 1e-10;

/// The operator norm needs positive domain level infima and a lower
/// semicontinuous codomain t-norm.
pub fn check_preconditions(t: &LinearOperator) -> Result<()> {
    if !t.domain().satisfies_nvi() {
        return Err(Error::PreconditionUnmet(format!(
            "domain {} has nonzero vectors with vanishing level infima",
            t.domain().describe()
        )));
    }
    if !t.codomain().tnorm().is_lower_semicontinuous() {
        return Err(Error::PreconditionUnmet(format!(
            "codomain t-norm {} is not lower semicontinuous",
            t.codomain().tnorm()
        )));
    }
    Ok(())
}

/// Evaluator for `g` and `N(T, ·)` on a fixed direction set.
#[derive(Debug)]
pub struct OperatorNorm {
    op: LinearOperator,
    sampling: SphereSampling,
    alpha_tol: f64,
    /// `(ρ(x), ρ(Tx))` per direction.
    rhos: Vec<(f64, f64)>,
    memo: RefCell<BTreeMap<u64, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorNormProfile {
    pub alphas: Vec<f64>,
    pub g: Vec<f64>,
    /// Closed form for comparison when the spaces allow one.
    pub separable: Vec<Option<f64>>,
    pub monotone: bool,
    pub sphere_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNormValue {
    pub s: f64,
    pub value: f64,
}

impl OperatorNorm {
    pub fn new(op: LinearOperator, sampling: SphereSampling, alpha_tol: f64) -> Result<Self> {
        check_preconditions(&op)?;
        if !(alpha_tol > 0.0 && alpha_tol < 0.5) {
            return Err(Error::OutOfRange {
                name: "alpha_tol",
                value: alpha_tol,
                range: "(0, 0.5)",
            });
        }
        let dirs = unit_directions(op.domain(), sampling);
        let rhos = dirs
            .iter()
            .map(|d| (op.domain().rho().eval(d), op.codomain().rho().eval(&op.apply(d))))
            .collect();
        Ok(OperatorNorm {
            op,
            sampling,
            alpha_tol,
            rhos,
            memo: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn with_defaults(op: LinearOperator, seed: u64) -> Result<Self> {
        let n = op.domain().dim();
        Self::new(op, SphereSampling::default_for(n, seed), ALPHA_TOL)
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.op
    }

    pub fn sampling(&self) -> SphereSampling {
        self.sampling
    }

    pub fn alpha_tol(&self) -> f64 {
        self.alpha_tol
    }

    /// Sampled `g(α)`.
    pub fn g(&self, alpha: f64) -> Result<f64> {
        if let Some(v) = self.memo.borrow().get(&alpha.to_bits()) {
            return Ok(*v);
        }
        let (x_sp, y_sp) = (self.op.domain(), self.op.codomain());
        let mut worst = 0.0f64;
        for &(rx, rtx) in &self.rhos {
            let num = y_sp.level_fine(rtx, alpha, false)?;
            if num == 0.0 {
                continue;
            }
            let den = x_sp.level_fine(rx, 1.0 - alpha, false)?;
            worst = worst.max(if den == 0.0 { f64::INFINITY } else { num / den });
        }
        self.memo.borrow_mut().insert(alpha.to_bits(), worst);
        Ok(worst)
    }

    /// `N(T, s)`: 0 for `s <= 0`, otherwise the largest `α` with `g(α) <= s`.
    pub fn norm(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Ok(0.0);
        }
        let mut err = None;
        let b = bisect::boundary(0.0, 1.0, self.alpha_tol, |a| match self.g(a) {
            Ok(g) => g > s,
            Err(e) => {
                err.get_or_insert(e);
                true
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(if b.hi == 1.0 {
            1.0
        } else if b.lo == 0.0 {
            0.0
        } else {
            b.midpoint()
        })
    }

    pub fn value(&self, s: f64) -> Result<OperatorNormValue> {
        Ok(OperatorNormValue { s, value: self.norm(s)? })
    }

    /// `⋀{s > 0 : N(T, s) ≥ α}` (or `> α` when `strict`), by bisection on `s`.
    pub fn level(&self, alpha: f64, strict: bool) -> Result<f64> {
        if !(alpha >= 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1)",
            });
        }
        if self.op.is_zero() {
            return Ok(0.0);
        }
        let mut err = None;
        let mut pred = |s: f64| match self.norm(s) {
            Ok(n) => {
                if strict {
                    n > alpha
                } else {
                    n >= alpha
                }
            }
            Err(e) => {
                err.get_or_insert(e);
                true
            }
        };
        // N(T, s) reaches every level below 1 once s exceeds g near 1
        let start = self.g(alpha)?.max(self.g(0.5)?).max(f64::MIN_POSITIVE);
        let Some(hi) = bisect::expand_upper(start, 1100, &mut pred) else {
            return Err(Error::BracketExpansion { limit: f64::MAX });
        };
        let floor = hi * f64::EPSILON;
        if pred(floor) {
            return Ok(0.0);
        }
        let b = bisect::boundary(floor, hi, hi * S_REL_TOL, &mut pred);
        if let Some(e) = err {
            return Err(e);
        }
        Ok(b.midpoint())
    }

    pub fn profile(&self, alphas: &[f64]) -> Result<OperatorNormProfile> {
        let g = alphas.iter().map(|&a| self.g(a)).collect::<Result<Vec<_>>>()?;
        let monotone = g.windows(2).all(|w| w[0] <= w[1]);
        Ok(OperatorNormProfile {
            alphas: alphas.to_vec(),
            separable: alphas.iter().map(|&a| separable_g(&self.op, a)).collect(),
            g,
            monotone,
            sphere_samples: self.rhos.len(),
            seed: self.sampling.seed,
        })
    }
}

/// `g(α) = q_Y(α) / q_X(1-α) · ‖W_Y^{1/2} A W_X^{-1/2}‖₂^p`, valid for any
/// pair of profile-induced spaces; `None` where the domain quantile vanishes.
pub fn separable_g(t: &LinearOperator, alpha: f64) -> Option<f64> {
    let qy = t.codomain().profile().quantile(alpha);
    let qx = t.domain().profile().quantile(1.0 - alpha);
    let gain = t.weighted_spectral_norm().powf(t.domain().rho().p());
    if gain == 0.0 {
        return Some(0.0);
    }
    (qx > 0.0).then(|| qy / qx * gain)
}

/// Sampled `g(α)` with the default α-resolution.
pub fn g_alpha(t: &LinearOperator, alpha: f64, sampling: SphereSampling) -> Result<f64> {
    OperatorNorm::new(t.clone(), sampling, ALPHA_TOL)?.g(alpha)
}

pub fn op_fuzzy_norm(t: &LinearOperator, s: f64, alpha_tol: f64, sampling: SphereSampling) -> Result<OperatorNormValue> {
    OperatorNorm::new(t.clone(), sampling, alpha_tol)?.value(s)
}

/// Inputs for [`opnorm_axiom_check`].
#[derive(Debug, Clone)]
pub struct NormCheckPlan {
    pub lambdas: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub alphas: Vec<f64>,
    pub sampling: SphereSampling,
    pub alpha_tol: f64,
    pub tol: f64,
}

impl Default for NormCheckPlan {
    fn default() -> Self {
        NormCheckPlan {
            lambdas: vec![2.0, 3.0, 0.5],
            s_grid: vec![0.5, 1.0, 2.0, 5.0],
            alphas: (1..10).map(|k| k as f64 / 10.0).collect(),
            sampling: SphereSampling::new(128, 0),
            alpha_tol: ALPHA_TOL,
            tol: 1e-9,
        }
    }
}

/// Check the fuzzy-norm axioms of `N(T, s)` on a fleet of operators.
///
/// Covers vanishing at `s <= 0`, "identically one iff `T = 0`", the scaling
/// identity `N(λT, s) = N(T, s/φ(λ))` within `2·α_tol`, the K-weighted
/// triangle over all fleet pairs, monotonicity in `s` with limit 1, and the
/// monotonicity of `g` on the α-grid.
pub fn opnorm_axiom_check(fleet: &[LinearOperator], plan: &NormCheckPlan) -> Result<AxiomReport> {
    let engines = fleet
        .iter()
        .map(|t| OperatorNorm::new(t.clone(), plan.sampling, plan.alpha_tol))
        .collect::<Result<Vec<_>>>()?;
    let tol = plan.tol;
    let mut vanish = Tally::new("zero-for-nonpositive-s", tol);
    let mut unit = Tally::new("unit-iff-zero-operator", tol);
    let mut scaling = Tally::new("phi-scaling", 2.0 * plan.alpha_tol);
    let mut triangle = Tally::new("k-triangle", tol);
    let mut monotone = Tally::new("monotone-with-unit-limit", tol);
    let mut g_mono = Tally::new("g-monotone", 0.0);

    let mut s_sorted = plan.s_grid.clone();
    s_sorted.sort_by(f64::total_cmp);
    let mut cache: Vec<Vec<f64>> = Vec::with_capacity(engines.len());
    for (i, e) in engines.iter().enumerate() {
        let idx = i as f64;
        for s in [0.0, -1.0, -1e-3] {
            let v = e.norm(s)?;
            vanish.observe(v, || Witness::new([idx, s], v, 0.0));
        }
        let values = s_sorted.iter().map(|&s| e.norm(s)).collect::<Result<Vec<_>>>()?;
        let zero = e.operator().is_zero();
        let all_one = values.iter().all(|&v| v == 1.0);
        unit.observe(if zero == all_one { 0.0 } else { 1.0 }, || {
            Witness::new([idx], values[0], if zero { 1.0 } else { 0.0 })
        });
        for (w, pair) in values.windows(2).zip(s_sorted.windows(2)) {
            monotone.observe(w[0] - w[1], || Witness::new([idx, pair[0], pair[1]], w[0], w[1]));
        }
        let far_s = 2.0 * e.g(1.0 - plan.alpha_tol / 4.0)?;
        if far_s.is_finite() {
            let far = e.norm(far_s.max(1.0))?;
            monotone.observe(1.0 - 2.0 * plan.alpha_tol - far, || Witness::new([idx, far_s], far, 1.0));
        }
        let mut prev = 0.0f64;
        for &a in &plan.alphas {
            let g = e.g(a)?;
            g_mono.observe(prev - g, || Witness::new([idx, a], g, prev));
            prev = g;
        }
        cache.push(values);

        for &lambda in &plan.lambdas {
            let scaled = OperatorNorm::new(e.operator().scaled(lambda), plan.sampling, plan.alpha_tol)?;
            let phi = e.operator().codomain().phi().eval(lambda);
            for &s in &s_sorted {
                let (lhs, rhs) = (scaled.norm(s)?, e.norm(s / phi)?);
                scaling.observe((lhs - rhs).abs(), || Witness::new([idx, lambda, s], lhs, rhs));
            }
        }
    }

    for i in 0..engines.len() {
        for j in i + 1..engines.len() {
            let (a, b) = (&engines[i], &engines[j]);
            let sum = OperatorNorm::new(a.operator().combine(1.0, b.operator(), 1.0)?, plan.sampling, plan.alpha_tol)?;
            let k = a.operator().k();
            let tn = a.operator().codomain().tnorm();
            for (si, &s) in s_sorted.iter().enumerate() {
                for (ti, &t) in s_sorted.iter().enumerate() {
                    let rhs = tn.apply(cache[i][si], cache[j][ti]);
                    let lhs = sum.norm(s + k * t)?;
                    triangle.observe(rhs - lhs, || Witness::new([i as f64, j as f64, s, t], lhs, rhs));
                }
            }
        }
    }

    Ok(AxiomReport {
        subject: format!("operator fuzzy norm on {} operators", fleet.len()),
        seed: Some(plan.sampling.seed),
        tol,
        outcomes: vec![
            vanish.finish(),
            unit.finish(),
            scaling.finish(),
            triangle.finish(),
            monotone.finish(),
            g_mono.finish(),
        ],
    })
}

/// `d^Y_α(Tx) / d^X_{1-α}(x)` for a single vector.
pub fn gain_at(t: &LinearOperator, x: &DVector<f64>, alpha: f64) -> Result<f64> {
    let num = t.codomain().d_alpha_fine(&t.apply(x), alpha)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = t.domain().d_alpha_fine(x, 1.0 - alpha)?;
    Ok(if den == 0.0 { f64::INFINITY } else { num / den })
}
