use std::fmt;
use std::sync::Arc;

use crate::check::{AxiomReport, Tally, Witness};
use crate::error::{Error, Result};

pub type UnaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The scalar reweighting `φ` governing `N(cx, t) = N(x, t / φ(c))`.
#[derive(Clone)]
pub enum Phi {
    /// `|c|`
    Abs,
    /// `|c|^p`, `p > 0`
    Power(f64),
    /// `2 c^(2n) / (|c| + 1)`, `n >= 1`
    Rational(u32),
    Custom { name: String, f: UnaryFn },
}

impl Phi {
    pub fn power(p: f64) -> Result<Self> {
        if p > 0.0 && p.is_finite() {
            Ok(if p == 1.0 { Phi::Abs } else { Phi::Power(p) })
        } else {
            Err(Error::invalid("p", format!("exponent must be positive, got {p}")))
        }
    }

    pub fn rational(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "rational example needs n >= 1"));
        }
        Ok(Phi::Rational(n))
    }

    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Phi::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Abs => "abs".into(),
            Phi::Power(p) => format!("abs-power({p})"),
            Phi::Rational(n) => format!("rational({n})"),
            Phi::Custom { name, .. } => name.clone(),
        }
    }

    /// Exponent `p` when `φ = |·|^p`.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            Phi::Abs => Some(1.0),
            Phi::Power(p) => Some(*p),
            _ => None,
        }
    }

    #[inline]
    pub fn eval(&self, c: f64) -> f64 {
        match self {
            Phi::Abs => c.abs(),
            Phi::Power(p) => c.abs().powf(*p),
            Phi::Rational(n) => 2.0 * c.abs().powi(2 * *n as i32) / (c.abs() + 1.0),
            Phi::Custom { f, .. } => f(c),
        }
    }

    /// Solve `φ(c) = y` for `c > 0` by bisection, relying on strict
    /// monotonicity on `(0, ∞)`. Succeeds once `|φ(c) - y| <= tol`.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::OutOfRange {
                name: "y",
                value: y,
                range: "(0, ∞)",
            });
        }
        let f = |c: f64| self.eval(c);
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        while f(hi) < y {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::BracketExpansion { limit: 1e300 });
            }
        }
        while f(lo) > y {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::BracketExpansion { limit: 1e-300 });
            }
        }
        let mut best = if (f(lo) - y).abs() < (f(hi) - y).abs() { lo } else { hi };
        loop {
            if (f(best) - y).abs() <= tol {
                return Ok(best);
            }
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                return Err(Error::NotConverged {
                    tol,
                    residual: (f(best) - y).abs(),
                });
            }
            if f(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            best = mid;
        }
    }

    pub fn axiom_check(&self, opts: &PhiCheck) -> AxiomReport {
        let grid = opts.grid();
        let tol = opts.tol;
        let rel = |a: f64| a.abs().max(1.0);

        let mut even = Tally::new("even", tol);
        for &u in &grid {
            let (p, m) = (self.eval(u), self.eval(-u));
            even.observe((p - m).abs() / rel(p), || Witness::new([u], m, p));
        }

        let mut unit = Tally::new("unit", tol);
        let one = self.eval(1.0);
        unit.observe((one - 1.0).abs(), || Witness::new([1.0], one, 1.0));

        let mut increasing = Tally::new("strictly-increasing", 0.0);
        for w in grid.windows(2) {
            let (a, b) = (self.eval(w[0]), self.eval(w[1]));
            // strict: equal neighbours count as a violation of size 1
            let v = if b > a { 0.0 } else { (a - b).max(0.0) + 1.0 };
            increasing.observe(v, || Witness::new([w[0], w[1]], a, b));
        }

        let mut continuous = Tally::new("continuity", opts.continuity_gap);
        for &u in &grid {
            let (a, b) = (self.eval(u), self.eval(u * (1.0 + opts.continuity_step)));
            continuous.observe((b - a).abs() / a.abs().max(f64::MIN_POSITIVE), || {
                Witness::new([u, u * (1.0 + opts.continuity_step)], a, b)
            });
        }

        let mut limits = Tally::new("limits", 0.0);
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        let (at_lo, at_hi) = (self.eval(lo), self.eval(hi));
        limits.observe(if at_lo < opts.small_value { 0.0 } else { at_lo }, || {
            Witness::new([lo], at_lo, opts.small_value)
        });
        limits.observe(if at_hi > opts.large_value { 0.0 } else { 1.0 }, || {
            Witness::new([hi], at_hi, opts.large_value)
        });

        AxiomReport {
            subject: format!("phi {}", self.name()),
            seed: None,
            tol,
            outcomes: vec![
                even.finish(),
                unit.finish(),
                increasing.finish(),
                continuous.finish(),
                limits.finish(),
            ],
        }
    }
}

/// Grid and thresholds for [`Phi::axiom_check`].
///
/// The limits at `0` and `∞` are checked as `φ(lo) < small_value` and
/// `φ(hi) > large_value` at the grid ends, with strict growth in between.
#[derive(Debug, Clone)]
pub struct PhiCheck {
    pub grid_size: usize,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub small_value: f64,
    pub large_value: f64,
    pub continuity_step: f64,
    pub continuity_gap: f64,
}

impl Default for PhiCheck {
    fn default() -> Self {
        PhiCheck {
            grid_size: 1000,
            lo: 1e-12,
            hi: 1e12,
            tol: 1e-12,
            small_value: 1e-3,
            large_value: 1e3,
            continuity_step: 1e-9,
            continuity_gap: 1e-6,
        }
    }
}

impl PhiCheck {
    pub fn with_grid(grid_size: usize, tol: f64) -> Self {
        PhiCheck {
            grid_size,
            tol,
            ..Default::default()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_size.max(2);
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
