//! Profile-induced fuzzy strong φ-b-norms on `R^n`.

mod crisp;
mod profile;
pub mod sequence;

pub use crisp::CrispFunctional;
pub use profile::Profile;

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::bisect;
use crate::check::{AxiomReport, Tally, Witness};
use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::{Phi, TNorm};

/// Default absolute tolerance on `t` for level infima.
pub const LEVEL_TOL: f64 = 1e-10;
/// The bracket `[0, ρ(x)·U]` may grow to `U = 2^60` before giving up.
pub const MAX_DOUBLINGS: u32 = 60;

/// `(R^n, N, φ, K, *)` with `N(x, t) = s(t / ρ(x))` for `t > 0`, `x ≠ θ`.
#[derive(Debug, Clone)]
pub struct FuzzySpace {
    rho: CrispFunctional,
    profile: Profile,
    phi: Phi,
    k: f64,
    tnorm: TNorm,
}

/// A level infimum `⋀{t > 0 : N(x, t) ≥ α}` (or `> α` when `strict`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelValue {
    pub x: Vec<f64>,
    pub alpha: f64,
    pub strict: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceCheck {
    pub axioms: AxiomReport,
    pub satisfies_nvi: bool,
}

impl FuzzySpace {
    /// φ and K are derived from the crisp functional: `φ = |·|^p`, `K = 2^{p-1}`.
    pub fn new(rho: CrispFunctional, profile: Profile, tnorm: TNorm) -> Self {
        FuzzySpace {
            phi: rho.phi(),
            k: rho.b_constant(),
            rho,
            profile,
            tnorm,
        }
    }

    pub fn euclidean(n: usize, p: f64, profile: Profile, tnorm: TNorm) -> Result<Self> {
        Ok(Self::new(CrispFunctional::euclidean(n, p)?, profile, tnorm))
    }

    /// Override the b-constant; any `K` at least the derived one keeps the triangle valid.
    pub fn with_k(mut self, k: f64) -> Result<Self> {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::invalid("K", format!("b-constant must be >= 1, got {k}")));
        }
        self.k = k;
        Ok(self)
    }

    /// Replace φ. Only useful for checking that a mismatched φ is caught.
    pub fn with_phi(mut self, phi: Phi) -> Self {
        self.phi = phi;
        self
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
    pub fn rho(&self) -> &CrispFunctional {
        &self.rho
    }
    pub fn profile(&self) -> &Profile {
        &self.profile
    }
    pub fn phi(&self) -> &Phi {
        &self.phi
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn tnorm(&self) -> &TNorm {
        &self.tnorm
    }

    pub fn satisfies_nvi(&self) -> bool {
        self.profile.satisfies_nvi()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} on R^{} (p={}, K={}, {})",
            self.profile.name(),
            self.dim(),
            self.rho.p(),
            self.k,
            self.tnorm
        )
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn norm_eval(&self, x: &DVector<f64>, t: f64) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm_from_rho(self.rho.eval(x), t))
    }

    /// `N(x, t)` given `ρ(x)`.
    #[inline]
    pub fn norm_from_rho(&self, rho: f64, t: f64) -> f64 {
        if !(t > 0.0) {
            0.0
        } else if rho == 0.0 {
            1.0
        } else {
            self.profile.eval(t / rho)
        }
    }

    pub fn level_infimum(&self, x: &DVector<f64>, alpha: f64, strict: bool, tol: f64) -> Result<LevelValue> {
        self.check_dim(x)?;
        let value = self.level_from_rho(self.rho.eval(x), alpha, strict, tol)?;
        Ok(LevelValue {
            x: x.iter().copied().collect(),
            alpha,
            strict,
            value,
        })
    }

    /// `d_α(x)` with the default tolerance.
    pub fn d_alpha(&self, x: &DVector<f64>, alpha: f64) -> Result<f64> {
        Ok(self.level_infimum(x, alpha, false, LEVEL_TOL)?.value)
    }

    /// Level infimum bisected to `LEVEL_TOL · min(1, ρ)`: never looser than
    /// the default, and relative for small vectors, so ratios of level infima
    /// keep the `φ(c)` scaling of `x ↦ cx` to full accuracy.
    pub fn level_fine(&self, rho: f64, alpha: f64, strict: bool) -> Result<f64> {
        self.level_from_rho(rho, alpha, strict, (LEVEL_TOL * rho.min(1.0)).max(f64::MIN_POSITIVE))
    }

    /// [`Self::d_alpha`] through [`Self::level_fine`].
    pub fn d_alpha_fine(&self, x: &DVector<f64>, alpha: f64) -> Result<f64> {
        self.check_dim(x)?;
        self.level_fine(self.rho.eval(x), alpha, false)
    }

    /// Level infimum for a vector with `ρ(x) = rho`, by bisection on `t`.
    pub fn level_from_rho(&self, rho: f64, alpha: f64, strict: bool, tol: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "(0, 1)",
            });
        }
        if !(tol > 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: tol,
                range: "(0, ∞)",
            });
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        let pred = |t: f64| {
            let n = self.norm_from_rho(rho, t);
            if strict {
                n > alpha
            } else {
                n >= alpha
            }
        };
        let hi = bisect::expand_upper(rho, MAX_DOUBLINGS, pred).ok_or(Error::BracketExpansion {
            limit: rho * 2f64.powi(MAX_DOUBLINGS as i32),
        })?;
        let mut b = bisect::boundary(0.0, hi, tol, pred);
        // An infimum of exactly 0 never moves `lo`; keep halving to tell it
        // apart from a small positive one.
        let floor = rho * 2f64.powi(-(MAX_DOUBLINGS as i32));
        while b.lo == 0.0 && b.hi > floor {
            let mid = 0.5 * b.hi;
            if pred(mid) {
                b.hi = mid;
            } else {
                b.lo = mid;
            }
        }
        if b.lo == 0.0 {
            return Ok(0.0);
        }
        Ok(b.midpoint())
    }

    /// Sampled check of the five fuzzy strong φ-b-norm axioms.
    ///
    /// Pairs `(x, y)` are drawn with log-uniform lengths; one in four is
    /// collinear (`y = cx`), where the b-triangle is tightest. `s` and `t` are
    /// drawn relative to `ρ(x)` and `ρ(y)` so the profiles are probed around
    /// their transition rather than deep in saturation.
    pub fn axiom_check_bn(&self, sample_count: usize, seed: u64, tol: f64) -> SpaceCheck {
        let n = self.dim();
        let mut rng = sampling::rng(seed);
        let big = 1e15;

        let mut nonpos = Tally::new("zero-for-nonpositive-t", tol);
        let mut unit = Tally::new("unit-iff-zero-vector", tol);
        let mut homog = Tally::new("phi-homogeneity", tol);
        let mut triangle = Tally::new("b-triangle", tol);
        let mut symmetric = Tally::new("symmetric-b-triangle", tol).informational();
        let mut monotone = Tally::new("monotone-with-unit-limit", tol);

        let theta = DVector::zeros(n);
        let rho0 = self.rho.eval(&theta);
        for _ in 0..sample_count {
            let x = sampling::scaled_vector(&mut rng, n, 1e-2, 1e2);
            let y = if rng.random_bool(0.25) {
                let c = sampling::log_uniform(&mut rng, 1e-2, 1e2);
                if rng.random_bool(0.5) {
                    &x * c
                } else {
                    &x * -c
                }
            } else {
                sampling::scaled_vector(&mut rng, n, 1e-2, 1e2)
            };
            let (rx, ry) = (self.rho.eval(&x), self.rho.eval(&y));
            let s = rx * sampling::log_uniform(&mut rng, 0.05, 20.0);
            let mut t = ry * sampling::log_uniform(&mut rng, 0.05, 20.0);
            let (nxs, nyt) = (self.norm_from_rho(rx, s), self.norm_from_rho(ry, t));

            for tt in [0.0, -s] {
                let v = self.norm_from_rho(rx, tt);
                nonpos.observe(v, || Witness::new([tt], v, 0.0));
            }

            let at_theta = self.norm_from_rho(rho0, s);
            unit.observe(1.0 - at_theta, || Witness::new([0.0, s], at_theta, 1.0));
            let tiny = self.norm_from_rho(rx, rx * 1e-9);
            unit.observe(if tiny < 1.0 { 0.0 } else { 1.0 }, || Witness::new([rx, rx * 1e-9], tiny, 1.0));

            let c = {
                let m = sampling::log_uniform(&mut rng, 1e-2, 1e2);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            };
            let fc = self.phi.eval(c);
            if fc != 0.0 {
                let lhs = self.norm_from_rho(self.rho.eval(&(&x * c)), s);
                let rhs = self.norm_from_rho(rx, s / fc);
                homog.observe((lhs - rhs).abs(), || Witness::new([c, s], lhs, rhs));
            }

            // the triangle is claimed for every real s, t; nonpositive ones make the right side vanish
            if rng.random_ratio(1, 16) {
                t = -t;
            }
            let nyt = if t > 0.0 { nyt } else { self.norm_from_rho(ry, t) };
            let rxy = self.rho.eval(&(&x + &y));
            let rhs = self.tnorm.apply(nxs, nyt);
            let lhs = self.norm_from_rho(rxy, s + self.k * t);
            triangle.observe(rhs - lhs, || Witness::new([rx, ry, rxy, s, t], lhs, rhs));
            let lhs_sym = self.norm_from_rho(rxy, self.k * (s + t));
            symmetric.observe(rhs - lhs_sym, || Witness::new([rx, ry, rxy, s, t], lhs_sym, rhs));

            let t2 = s * sampling::log_uniform(&mut rng, 1.0, 100.0);
            let n2 = self.norm_from_rho(rx, t2);
            monotone.observe(nxs - n2, || Witness::new([s, t2], nxs, n2));
            let far = self.norm_from_rho(rx, rx * big);
            monotone.observe(1.0 - far, || Witness::new([rx, rx * big], far, 1.0));
        }

        SpaceCheck {
            axioms: AxiomReport {
                subject: self.describe(),
                seed: Some(seed),
                tol,
                outcomes: vec![
                    nonpos.finish(),
                    unit.finish(),
                    homog.finish(),
                    triangle.finish(),
                    symmetric.finish(),
                    monotone.finish(),
                ],
            },
            satisfies_nvi: self.satisfies_nvi(),
        }
    }
}
