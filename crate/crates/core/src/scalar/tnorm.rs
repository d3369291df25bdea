use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::check::{AxiomReport, Tally, Witness};
use crate::error::{Error, Result};
use crate::sampling;

/// Declared regularity of a t-norm. Continuous implies lower semicontinuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuity {
    Continuous,
    LowerSemicontinuous,
    None,
}

pub type BinaryFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A t-norm on `[0, 1]`.
#[derive(Clone)]
pub enum TNorm {
    /// `min(a, b)`
    Minimum,
    /// `a * b`
    Product,
    /// `max(0, a + b - 1)`
    BoundedDifference,
    /// `a` if `b = 1`, `b` if `a = 1`, otherwise `0`.
    Drastic,
    /// A black-box operation; nothing about it is assumed until checked.
    Custom {
        name: String,
        op: BinaryFn,
        continuity: Continuity,
    },
}

/// Gap allowed by the left-continuity probe at step [`LSC_PROBE_STEP`].
pub const LSC_PROBE_GAP: f64 = 1e-6;
pub const LSC_PROBE_STEP: f64 = 1e-10;

const PROBES: [f64; 9] = [0.5, 0.25, 0.75, 0.0, 1.0, 0.125, 0.375, 0.625, 0.875];

fn check_unit(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::OutOfRange {
            name,
            value: v,
            range: "[0, 1]",
        })
    }
}

impl TNorm {
    pub fn custom<F>(name: impl Into<String>, continuity: Continuity, op: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        TNorm::Custom {
            name: name.into(),
            op: Arc::new(op),
            continuity,
        }
    }

    pub fn builtins() -> [TNorm; 4] {
        [
            TNorm::Minimum,
            TNorm::Product,
            TNorm::BoundedDifference,
            TNorm::Drastic,
        ]
    }

    pub fn name(&self) -> &str {
        match self {
            TNorm::Minimum => "min",
            TNorm::Product => "product",
            TNorm::BoundedDifference => "bounded-difference",
            TNorm::Drastic => "drastic",
            TNorm::Custom { name, .. } => name,
        }
    }

    pub fn continuity(&self) -> Continuity {
        match self {
            TNorm::Minimum | TNorm::Product | TNorm::BoundedDifference => Continuity::Continuous,
            TNorm::Drastic => Continuity::None,
            TNorm::Custom { continuity, .. } => *continuity,
        }
    }

    pub fn is_lower_semicontinuous(&self) -> bool {
        matches!(
            self.continuity(),
            Continuity::Continuous | Continuity::LowerSemicontinuous
        )
    }

    /// Evaluate without range checks; used on values already known to lie in `[0, 1]`.
    #[inline]
    pub fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Minimum => a.min(b),
            TNorm::Product => a * b,
            // `1 - hi` is exact once hi >= 1/2, which keeps the identity T(a, 1) = a exact
            TNorm::BoundedDifference => (a.min(b) - (1.0 - a.max(b))).max(0.0),
            TNorm::Drastic => {
                if b == 1.0 {
                    a
                } else if a == 1.0 {
                    b
                } else {
                    0.0
                }
            }
            TNorm::Custom { op, .. } => op(a, b),
        }
    }

    pub fn eval(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.apply(check_unit("a", a)?, check_unit("b", b)?))
    }

    /// `a * a * ... * a` with `n` factors, folded from the left.
    pub fn power(&self, a: f64, n: u32) -> Result<f64> {
        let a = check_unit("a", a)?;
        if n == 0 {
            return Err(Error::invalid("n", "power needs at least one factor"));
        }
        Ok((1..n).fold(a, |acc, _| self.apply(acc, a)))
    }

    /// Smallest `beta` on the grid `{step, 2 step, ...} ∩ (0, 1)` with `beta * beta >= alpha`.
    pub fn square_root_level(&self, alpha: f64, step: f64) -> Option<f64> {
        let k_max = (1.0 / step).round() as u64;
        (1..k_max)
            .map(|k| k as f64 / k_max as f64)
            .find(|&beta| self.apply(beta, beta) >= alpha)
    }

    /// Sampled check of the t-norm axioms, plus the positivity condition
    /// `a > 0 => a * a > 0` (informational) and, for t-norms declared at least
    /// lower semicontinuous, a left-continuity probe.
    ///
    /// Structured probe points are evaluated before the `sample_count` random
    /// draws, so the witness of a failure is reproducible and usually simple.
    pub fn axiom_check(&self, sample_count: usize, seed: u64, tol: f64) -> AxiomReport {
        let mut rng = sampling::rng(seed);
        let t = |a: f64, b: f64| self.apply(a, b);

        let mut identity = Tally::new("identity", tol);
        let mut range = Tally::new("range", tol);
        for a in PROBES
            .iter()
            .copied()
            .chain((0..sample_count).map(|_| rng.random::<f64>()))
        {
            let v = t(a, 1.0);
            identity.observe((v - a).abs(), || Witness::new([a, 1.0], v, a));
            range.observe((-v).max(v - 1.0), || Witness::new([a, 1.0], v, v.clamp(0.0, 1.0)));
        }

        let mut commutative = Tally::new("commutativity", tol);
        let structured_pairs = PROBES
            .iter()
            .flat_map(|&a| PROBES.iter().map(move |&b| (a, b)))
            .collect::<Vec<_>>();
        let random_pairs = (0..sample_count)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect::<Vec<_>>();
        for &(a, b) in structured_pairs.iter().chain(&random_pairs) {
            let (l, r) = (t(a, b), t(b, a));
            commutative.observe((l - r).abs(), || Witness::new([a, b], l, r));
            range.observe((-l).max(l - 1.0), || Witness::new([a, b], l, l.clamp(0.0, 1.0)));
        }

        let mut associative = Tally::new("associativity", tol);
        let structured_triples = PROBES.iter().flat_map(|&a| {
            PROBES
                .iter()
                .flat_map(move |&b| PROBES.iter().map(move |&c| (a, b, c)))
        });
        let random_triples = (0..sample_count)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()))
            .collect::<Vec<_>>();
        for (a, b, c) in structured_triples.chain(random_triples.iter().copied()) {
            let l = t(t(a, b), c);
            let r = t(a, t(b, c));
            associative.observe((l - r).abs(), || Witness::new([a, b, c], l, r));
        }

        let mut monotone = Tally::new("monotonicity", tol);
        let structured_quads = structured_pairs
            .iter()
            .flat_map(|&(a, b)| structured_pairs.iter().map(move |&(c, d)| (a, b, c, d)));
        let random_quads = (0..sample_count)
            .map(|_| {
                (
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                )
            })
            .collect::<Vec<_>>();
        for (a, b, c, d) in structured_quads.chain(random_quads.iter().copied()) {
            let (lo1, hi1) = (a.min(b), a.max(b));
            let (lo2, hi2) = (c.min(d), c.max(d));
            let l = t(lo1, lo2);
            let r = t(hi1, hi2);
            monotone.observe(l - r, || Witness::new([lo1, hi1, lo2, hi2], l, r));
        }

        let mut positive = Tally::new("positivity", 0.0).informational();
        for a in PROBES
            .iter()
            .copied()
            .filter(|&a| a > 0.0)
            .chain((0..sample_count).map(|_| rng.random::<f64>()).filter(|&a| a > 0.0))
        {
            let v = t(a, a);
            positive.observe(if v > 0.0 { 0.0 } else { a }, || Witness::new([a, a], v, 0.0));
        }

        let mut outcomes = vec![
            identity.finish(),
            commutative.finish(),
            associative.finish(),
            monotone.finish(),
            range.finish(),
            positive.finish(),
        ];

        if self.is_lower_semicontinuous() {
            let mut lsc = Tally::new("left-continuity", LSC_PROBE_GAP);
            let h = LSC_PROBE_STEP;
            for (a, b) in PROBES
                .iter()
                .flat_map(|&a| PROBES.iter().map(move |&b| (a, b)))
                .chain(random_pairs.iter().copied())
                .filter(|&(a, b)| a > h && b > h)
            {
                let at = t(a, b);
                let below = t(a - h, b - h);
                lsc.observe(at - below, || Witness::new([a, b, h], below, at));
            }
            outcomes.push(lsc.finish());
        }

        AxiomReport {
            subject: format!("t-norm {}", self.name()),
            seed: Some(seed),
            tol,
            outcomes,
        }
    }
}

impl fmt::Debug for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TNorm::Custom {
                name, continuity, ..
            } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("continuity", continuity)
                .finish_non_exhaustive(),
            other => f.write_str(other.name()),
        }
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" | "minimum" | "standard-intersection" => Ok(TNorm::Minimum),
            "product" | "algebraic-product" => Ok(TNorm::Product),
            "bounded-difference" | "lukasiewicz" => Ok(TNorm::BoundedDifference),
            "drastic" | "drastic-intersection" => Ok(TNorm::Drastic),
            other => Err(Error::invalid("tnorm", format!("unknown t-norm `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn averaging() -> TNorm {
        TNorm::custom("average", Continuity::Continuous, |a, b| 0.5 * (a + b))
    }

    #[test]
    fn closed_forms() {
        assert_eq!(TNorm::Minimum.eval(0.3, 0.7).unwrap(), 0.3);
        assert!((TNorm::BoundedDifference.eval(0.5, 0.7).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(TNorm::Drastic.eval(0.5, 0.7).unwrap(), 0.0);
        assert_eq!(TNorm::Drastic.eval(0.5, 1.0).unwrap(), 0.5);
        assert_eq!(TNorm::Drastic.eval(1.0, 0.3).unwrap(), 0.3);
        for t in TNorm::builtins() {
            for a in [0.0, 0.2, 0.5, 0.93, 1.0] {
                assert_eq!(t.eval(a, 1.0).unwrap(), a, "{t}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            TNorm::Minimum.eval(-0.1, 0.5),
            Err(Error::OutOfRange { name: "a", .. })
        ));
        assert!(TNorm::Product.eval(0.5, 1.5).is_err());
        assert!(TNorm::Product.eval(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(TNorm::Minimum.power(0.4, 5).unwrap(), 0.4);
        assert_eq!(TNorm::Product.power(0.5, 3).unwrap(), 0.125);
        assert!((TNorm::BoundedDifference.power(0.9, 2).unwrap() - 0.8).abs() < 1e-15);
        assert!(TNorm::Product.power(0.5, 0).is_err());
    }

    #[test]
    fn builtins_satisfy_axioms() {
        for t in [TNorm::Minimum, TNorm::Product, TNorm::BoundedDifference] {
            let r = t.axiom_check(10_000, 7, 1e-12);
            assert!(r.passed(), "{t}: {:?}", r.failures().collect::<Vec<_>>());
            assert!(r.outcome("positivity").unwrap().passed == !matches!(t, TNorm::BoundedDifference));
            assert!(r.outcome("left-continuity").unwrap().passed);
        }
    }

    #[test]
    fn drastic_passes_axioms_but_not_positivity() {
        let r = TNorm::Drastic.axiom_check(10_000, 7, 1e-12);
        assert!(r.passed());
        let t1 = r.outcome("positivity").unwrap();
        assert!(!t1.passed);
        let w = t1.witness.as_ref().unwrap();
        assert_eq!(w.inputs, vec![0.5, 0.5]);
        assert_eq!(w.lhs, 0.0);
        assert!(r.outcome("left-continuity").is_none());
    }

    #[test]
    fn averaging_fails_identity_at_one_half() {
        let r = averaging().axiom_check(10_000, 7, 1e-12);
        assert!(!r.passed());
        let id = r.outcome("identity").unwrap();
        assert!(!id.passed);
        let w = id.witness.as_ref().unwrap();
        assert_eq!(w.inputs[0], 0.5);
        assert_eq!(w.lhs, 0.75);
        assert_eq!(id.worst_violation, 0.5);
    }

    #[test]
    fn square_root_levels() {
        assert_eq!(TNorm::Minimum.square_root_level(0.3, 1e-3), Some(0.3));
        let b = TNorm::Product.square_root_level(0.25, 1e-3).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        let b = TNorm::BoundedDifference.square_root_level(0.5, 1e-3).unwrap();
        assert!((b - 0.75).abs() < 1e-12);
        assert_eq!(TNorm::Drastic.square_root_level(0.5, 1e-3), None);
    }

    #[test]
    fn parse_names() {
        assert!(matches!("min".parse::<TNorm>(), Ok(TNorm::Minimum)));
        assert!(matches!("lukasiewicz".parse::<TNorm>(), Ok(TNorm::BoundedDifference)));
        assert!("hamacher".parse::<TNorm>().is_err());
    }
}
