use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Phi;

/// `ρ(x) = (Σ wᵢ xᵢ²)^{p/2}`: a weighted Euclidean norm raised to `p >= 1`.
///
/// `ρ(cx) = |c|^p ρ(x)` and `ρ(x + y) <= 2^{p-1} (ρ(x) + ρ(y))` by convexity
/// of `u ↦ u^p`, so `ρ` is a b-functional with constant `K = 2^{p-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrispFunctional {
    weights: Vec<f64>,
    p: f64,
}

impl CrispFunctional {
    pub fn euclidean(n: usize, p: f64) -> Result<Self> {
        Self::weighted(vec![1.0; n], p)
    }

    pub fn weighted(weights: Vec<f64>, p: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("dimension", "must be at least 1"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("weights", format!("weights must be positive and finite, got {w}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("exponent must be >= 1, got {p}")));
        }
        Ok(CrispFunctional { weights, p })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The weighted Euclidean norm `‖x‖_w`, before the power `p`.
    pub fn base_norm(&self, x: &DVector<f64>) -> f64 {
        x.iter()
            .zip(&self.weights)
            .map(|(xi, w)| w * xi * xi)
            .sum::<f64>()
            .sqrt()
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        let b = self.base_norm(x);
        if self.p == 1.0 {
            b
        } else {
            b.powf(self.p)
        }
    }

    /// The homogeneity function `|c|^p`.
    pub fn phi(&self) -> Phi {
        if self.p == 1.0 {
            Phi::Abs
        } else {
            Phi::Power(self.p)
        }
    }

    pub fn b_constant(&self) -> f64 {
        2f64.powf(self.p - 1.0)
    }

    /// Rescale `x` so that `ρ(x) = 1`; `None` for the zero vector.
    pub fn normalize(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let b = self.base_norm(x);
        (b > 0.0).then(|| x / b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    #[test]
    fn weighted_power_norm() {
        let rho = CrispFunctional::weighted(vec![4.0, 1.0], 2.0).unwrap();
        let x = DVector::from_vec(vec![1.0, 2.0]);
        assert!((rho.eval(&x) - 8.0).abs() < 1e-12);
        assert_eq!(rho.b_constant(), 2.0);
        let u = rho.normalize(&x).unwrap();
        assert!((rho.eval(&u) - 1.0).abs() < 1e-12);
        assert!(rho.normalize(&DVector::zeros(2)).is_none());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CrispFunctional::euclidean(2, 0.5).is_err());
        assert!(CrispFunctional::weighted(vec![1.0, 0.0], 1.0).is_err());
        assert!(CrispFunctional::weighted(vec![], 1.0).is_err());
    }

    #[test]
    fn homogeneity_and_b_triangle_on_samples() {
        let mut rng = sampling::rng(5);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let rho = CrispFunctional::weighted(vec![1.0, 2.0, 0.5], p).unwrap();
            let k = rho.b_constant();
            for _ in 0..2000 {
                let x = sampling::scaled_vector(&mut rng, 3, 1e-3, 1e3);
                let y = sampling::scaled_vector(&mut rng, 3, 1e-3, 1e3);
                let c = sampling::log_uniform(&mut rng, 1e-3, 1e3);
                let (rx, ry) = (rho.eval(&x), rho.eval(&y));
                assert!((rho.eval(&(&x * c)) - c.powf(p) * rx).abs() <= 1e-10 * c.powf(p) * rx);
                assert!(rho.eval(&(&x + &y)) <= k * (rx + ry) * (1.0 + 1e-12));
            }
        }
    }
}
