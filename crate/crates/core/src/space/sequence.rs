//! Finite-horizon convergence and Cauchy verdicts for vector sequences.

use nalgebra::DVector;
use serde::Serialize;

use super::FuzzySpace;
use crate::error::{Error, Result};

/// Closed-form sequence families `x_k`, `k >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    /// `x + k^{-q} v`; `q = 0` gives the constant offset `x + v`.
    Power { base: DVector<f64>, direction: DVector<f64>, q: f64 },
    /// `x + r^k v`
    Geometric { base: DVector<f64>, direction: DVector<f64>, r: f64 },
    /// `x + (-1)^k v`
    Alternating { base: DVector<f64>, direction: DVector<f64> },
    /// Explicit terms `x_1, x_2, …`; the horizon is capped at the table length.
    Table(Vec<DVector<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub limit: Option<DVector<f64>>,
}

impl SequenceSpec {
    pub fn power(base: DVector<f64>, direction: DVector<f64>, q: f64) -> Self {
        SequenceSpec {
            limit: Some(base.clone()),
            kind: SequenceKind::Power { base, direction, q },
        }
    }

    pub fn constant(x: DVector<f64>) -> Self {
        let zero = DVector::zeros(x.len());
        Self::power(x, zero, 0.0)
    }

    pub fn with_limit(mut self, limit: DVector<f64>) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SequenceKind::Power { base, .. }
            | SequenceKind::Geometric { base, .. }
            | SequenceKind::Alternating { base, .. } => base.len(),
            SequenceKind::Table(t) => t.first().map_or(0, |v| v.len()),
        }
    }

    pub fn len_limit(&self) -> Option<u64> {
        match &self.kind {
            SequenceKind::Table(t) => Some(t.len() as u64),
            _ => None,
        }
    }

    /// The perturbation `x_k - base` for the parametric families.
    pub fn term(&self, k: u64) -> DVector<f64> {
        let k = k.max(1);
        match &self.kind {
            SequenceKind::Power { base, direction, q } => base + direction * (k as f64).powf(-q),
            SequenceKind::Geometric { base, direction, r } => base + direction * r.powf(k as f64),
            SequenceKind::Alternating { base, direction } => {
                if k % 2 == 0 {
                    base + direction
                } else {
                    base - direction
                }
            }
            SequenceKind::Table(t) => t[(k as usize - 1).min(t.len() - 1)].clone(),
        }
    }
}

/// How the size of a difference `x_n - x` is measured.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Mode {
    /// `max_t (1 - N(z, t))` over a grid of `t`.
    Classical { t_grid: Vec<f64> },
    /// Strict level infimum of `N(z, ·)` at level `1 - α`.
    AlphaFuzzy { alpha: f64 },
    /// The `α`-fuzzy measure maximised over a grid of `α`.
    LFuzzy { alphas: Vec<f64> },
}

impl Mode {
    pub fn classical_default() -> Self {
        Mode::Classical {
            t_grid: vec![0.1, 1.0, 10.0],
        }
    }

    /// The size of `z` under this mode; 0 means "converged".
    pub fn measure(&self, sp: &FuzzySpace, z: &DVector<f64>) -> Result<f64> {
        let rho = sp.rho().eval(z);
        self.measure_rho(sp, rho)
    }

    pub fn measure_rho(&self, sp: &FuzzySpace, rho: f64) -> Result<f64> {
        match self {
            Mode::Classical { t_grid } => Ok(t_grid
                .iter()
                .map(|&t| 1.0 - sp.norm_from_rho(rho, t))
                .fold(0.0, f64::max)),
            Mode::AlphaFuzzy { alpha } => sp.level_fine(rho, 1.0 - alpha, true),
            Mode::LFuzzy { alphas } => {
                let mut worst = 0.0f64;
                for &a in alphas {
                    worst = worst.max(sp.level_fine(rho, 1.0 - a, true)?);
                }
                Ok(worst)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converges,
    Inconclusive,
    Diverges,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    /// Checkpoint index.
    pub n: u64,
    /// For Cauchy traces, the pair `(n, m)` attaining `value`.
    pub pair: Option<(u64, u64)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceOutcome {
    pub verdict: Verdict,
    pub trace: Vec<TracePoint>,
    /// The last checkpoint when the verdict is not `Converges`.
    pub witness: Option<TracePoint>,
}

/// 1, 2, 5, 10, 20, 50, … up to `n_max`, always ending at `n_max`.
pub fn checkpoints(n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = m * decade;
            if c >= n_max {
                break 'outer;
            }
            out.push(c);
        }
        decade *= 10;
    }
    out.push(n_max.max(1));
    out
}

/// Classify a trace of sizes at increasing checkpoints.
///
/// Converges when the final size is within `tol`. Diverges when the tail
/// (checkpoints from `n_max / 10` on) stays above `tol` and the final size has
/// not dropped below 90% of the first one. Anything else is inconclusive.
pub fn classify(trace: &[TracePoint], tol: f64) -> Verdict {
    let Some(last) = trace.last() else {
        return Verdict::Inconclusive;
    };
    if last.value <= tol {
        return Verdict::Converges;
    }
    let cut = last.n / 10;
    let tail_min = trace
        .iter()
        .filter(|p| p.n >= cut)
        .map(|p| p.value)
        .fold(f64::INFINITY, f64::min);
    if tail_min > tol && last.value >= 0.9 * trace[0].value {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    }
}

fn finish(trace: Vec<TracePoint>, tol: f64) -> SequenceOutcome {
    let verdict = classify(&trace, tol);
    let witness = (verdict != Verdict::Converges).then(|| trace.last().cloned()).flatten();
    SequenceOutcome { verdict, trace, witness }
}

fn horizon(seq: &SequenceSpec, n_max: u64) -> Result<u64> {
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be positive"));
    }
    Ok(seq.len_limit().map_or(n_max, |l| l.min(n_max)))
}

/// Does `x_n → limit` under `mode`, judged at checkpoints up to `n_max`?
pub fn seq_convergence(sp: &FuzzySpace, seq: &SequenceSpec, mode: &Mode, n_max: u64, tol: f64) -> Result<SequenceOutcome> {
    let limit = seq
        .limit
        .as_ref()
        .ok_or_else(|| Error::invalid("limit", "a limit candidate is required"))?;
    if limit.len() != sp.dim() || seq.dim() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: seq.dim(),
        });
    }
    let n_max = horizon(seq, n_max)?;
    let mut trace = Vec::new();
    for n in checkpoints(n_max) {
        let value = mode.measure(sp, &(seq.term(n) - limit))?;
        trace.push(TracePoint { n, pair: None, value });
    }
    Ok(finish(trace, tol))
}

/// Cauchy-ness, measured at checkpoint `N` by the worst pair among
/// `{⌈N/2⌉, ⌈N/2⌉ + 1, N - 1, N}` and the checkpoints in `[N/2, N]`.
pub fn seq_cauchy(sp: &FuzzySpace, seq: &SequenceSpec, mode: &Mode, n_max: u64, tol: f64) -> Result<SequenceOutcome> {
    if seq.dim() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: seq.dim(),
        });
    }
    let n_max = horizon(seq, n_max)?;
    let cps = checkpoints(n_max);
    let mut trace = Vec::new();
    for &big in &cps {
        let idx = pair_indices(big, &cps);
        let terms: Vec<(u64, DVector<f64>)> = idx.iter().map(|&k| (k, seq.term(k))).collect();
        let mut worst = TracePoint {
            n: big,
            pair: Some((big, big)),
            value: 0.0,
        };
        for (i, (n, xn)) in terms.iter().enumerate() {
            for (m, xm) in &terms[i + 1..] {
                let v = mode.measure(sp, &(xn - xm))?;
                if v > worst.value {
                    worst.pair = Some((*n, *m));
                    worst.value = v;
                }
            }
        }
        trace.push(worst);
    }
    Ok(finish(trace, tol))
}

pub(crate) fn pair_indices(big: u64, cps: &[u64]) -> Vec<u64> {
    let half = big.div_ceil(2);
    let mut idx: Vec<u64> = [half, half + 1, big.saturating_sub(1), big]
        .into_iter()
        .chain(cps.iter().copied().filter(|&c| 2 * c >= big && c <= big))
        .filter(|&k| k >= 1 && k <= big)
        .collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}
