use serde::Serialize;

use crate::error::{Error, Result};

/// Membership profile `s : (0, ∞) → [0, 1]`; the fuzzy norm is `s(t / ρ(x))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `s(u) = h` on `(0, 1]`, `1` beyond. The jump at `u = 1` takes the left value.
    Step { h: f64 },
    /// `s(u) = max(0, 1 - 1/u)`.
    Reciprocal,
    /// Constant `v_0` up to `u_0`, linear between knots; the last value is 1.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

impl Profile {
    pub fn step(h: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&h) {
            return Err(Error::InvalidProfile(format!("step height {h} outside [0, 1)")));
        }
        Ok(Profile::Step { h })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidProfile("need at least two knots".into()));
        }
        for w in knots.windows(2) {
            let ((u0, v0), (u1, v1)) = (w[0], w[1]);
            if !(u1 > u0) {
                return Err(Error::InvalidProfile(format!("knot abscissae not increasing at {u1}")));
            }
            if v1 < v0 {
                return Err(Error::InvalidProfile(format!("profile decreases at u = {u1}")));
            }
        }
        let (u0, v0) = knots[0];
        if !(u0 > 0.0) || !(0.0..=1.0).contains(&v0) {
            return Err(Error::InvalidProfile(format!("first knot ({u0}, {v0}) out of range")));
        }
        let last = knots[knots.len() - 1].1;
        if last != 1.0 {
            return Err(Error::InvalidProfile(format!("last knot value {last} must be 1")));
        }
        Ok(Profile::PiecewiseLinear { knots })
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Step { h } => format!("step({h})"),
            Profile::Reciprocal => "reciprocal".into(),
            Profile::PiecewiseLinear { knots } => format!("piecewise-linear({} knots)", knots.len()),
        }
    }

    /// `s(u)` for `u > 0`; returns 0 for `u <= 0`.
    pub fn eval(&self, u: f64) -> f64 {
        if !(u > 0.0) {
            return 0.0;
        }
        match self {
            Profile::Step { h } => {
                if u > 1.0 {
                    1.0
                } else {
                    *h
                }
            }
            Profile::Reciprocal => (1.0 - 1.0 / u).max(0.0),
            Profile::PiecewiseLinear { knots } => {
                if u <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let ((u0, v0), (u1, v1)) = (w[0], w[1]);
                    if u <= u1 {
                        return v0 + (v1 - v0) * (u - u0) / (u1 - u0);
                    }
                }
                1.0
            }
        }
    }

    /// `q(α) = inf { u > 0 : s(u) >= α }`.
    pub fn quantile(&self, alpha: f64) -> f64 {
        self.quantile_impl(alpha, false)
    }

    /// `inf { u > 0 : s(u) > α }`.
    pub fn strict_quantile(&self, alpha: f64) -> f64 {
        self.quantile_impl(alpha, true)
    }

    fn quantile_impl(&self, alpha: f64, strict: bool) -> f64 {
        let reaches = |v: f64| if strict { v > alpha } else { v >= alpha };
        match self {
            Profile::Step { h } => {
                if reaches(*h) {
                    0.0
                } else {
                    1.0
                }
            }
            Profile::Reciprocal => {
                if alpha <= 0.0 {
                    0.0
                } else {
                    1.0 / (1.0 - alpha)
                }
            }
            Profile::PiecewiseLinear { knots } => {
                if reaches(knots[0].1) {
                    return 0.0;
                }
                for w in knots.windows(2) {
                    let ((u0, v0), (u1, v1)) = (w[0], w[1]);
                    if reaches(v1) {
                        // v0 < α <= v1 (or v0 <= α < v1 when strict); v1 > v0 here
                        return u0 + (alpha - v0) / (v1 - v0) * (u1 - u0);
                    }
                }
                f64::INFINITY
            }
        }
    }

    /// True iff `s(u) = 0` for some `u > 0`, i.e. every nonzero vector has
    /// `N(x, t) = 0` for small enough `t > 0`.
    pub fn satisfies_nvi(&self) -> bool {
        match self {
            Profile::Step { h } => *h == 0.0,
            Profile::Reciprocal => true,
            Profile::PiecewiseLinear { knots } => knots[0].1 == 0.0,
        }
    }

    /// Continuous and strictly increasing wherever `0 < s < 1`, so the strict
    /// and non-strict level infima agree.
    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            Profile::Step { .. } => false,
            Profile::Reciprocal => true,
            Profile::PiecewiseLinear { knots } => knots.windows(2).all(|w| w[1].1 > w[0].1 || w[0].1 == 0.0),
        }
    }
}
