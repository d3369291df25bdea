//! Matrices between profile-induced fuzzy spaces and their boundedness.

mod bounded;
mod continuity;
mod independence;
mod subspace;

pub use bounded::{
    bounded_certificate, boundedness_ratio, defn_equivalence_check, equivalence_with_m, Bound, BoundednessCertificate, CertEntry,
    EquivalenceOutcome, DEFAULT_CEILING,
};
pub use continuity::{
    continuity_probe, counterexample_suite, probe_points, ContinuityOutcome, CounterexampleOutcome, CounterexampleVariant,
    PointProbe, ProbeSettings,
};
pub use independence::{independence_constant, independence_inequality_check, IndependenceConstant, InequalityOutcome};
pub use subspace::{finite_dim_boundedness_sweep, subspace_check, SubspaceEntry, SubspaceOutcome, SweepOutcome};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sampling;
use crate::space::FuzzySpace;

/// A matrix `A : R^{n_X} → R^{n_Y}` between two fuzzy spaces sharing φ and K.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    matrix: DMatrix<f64>,
    domain: Arc<FuzzySpace>,
    codomain: Arc<FuzzySpace>,
}

impl LinearOperator {
    pub fn new(matrix: DMatrix<f64>, domain: Arc<FuzzySpace>, codomain: Arc<FuzzySpace>) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: matrix.ncols(),
            });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim(),
                got: matrix.nrows(),
            });
        }
        if domain.rho().p() != codomain.rho().p() {
            return Err(Error::invalid(
                "p",
                format!("domain and codomain exponents differ ({} vs {})", domain.rho().p(), codomain.rho().p()),
            ));
        }
        if domain.k() != codomain.k() {
            return Err(Error::invalid("K", format!("b-constants differ ({} vs {})", domain.k(), codomain.k())));
        }
        if matrix.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("matrix", "entries must be finite"));
        }
        Ok(LinearOperator {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(space: Arc<FuzzySpace>) -> Self {
        let n = space.dim();
        LinearOperator {
            matrix: DMatrix::identity(n, n),
            domain: space.clone(),
            codomain: space,
        }
    }

    pub fn zero(domain: Arc<FuzzySpace>, codomain: Arc<FuzzySpace>) -> Result<Self> {
        Self::new(DMatrix::zeros(codomain.dim(), domain.dim()), domain, codomain)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
    pub fn domain(&self) -> &Arc<FuzzySpace> {
        &self.domain
    }
    pub fn codomain(&self) -> &Arc<FuzzySpace> {
        &self.codomain
    }
    pub fn k(&self) -> f64 {
        self.domain.k()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|a| *a == 0.0)
    }

    /// Same spaces, different matrix.
    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix, self.domain.clone(), self.codomain.clone())
    }

    pub fn scaled(&self, c: f64) -> Self {
        LinearOperator {
            matrix: &self.matrix * c,
            ..self.clone()
        }
    }

    fn same_spaces(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.domain, &other.domain) && Arc::ptr_eq(&self.codomain, &other.codomain) {
            Ok(())
        } else {
            Err(Error::invalid("operator", "operators act between different spaces"))
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_spaces(other)?;
        Ok(LinearOperator {
            matrix: &self.matrix * a + &other.matrix * b,
            ..self.clone()
        })
    }

    /// `‖W_Y^{1/2} A W_X^{-1/2}‖₂`, the largest gain `‖Ax‖_w / ‖x‖_w`.
    pub fn weighted_spectral_norm(&self) -> f64 {
        let wx = self.domain.rho().weights();
        let wy = self.codomain.rho().weights();
        let m = DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            wy[i].sqrt() * self.matrix[(i, j)] / wx[j].sqrt()
        });
        m.singular_values().iter().copied().fold(0.0, f64::max)
    }
}

/// Sphere-sampling knobs: how many unit-ρ directions and which seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSampling {
    pub count: usize,
    pub seed: u64,
}

impl SphereSampling {
    pub fn new(count: usize, seed: u64) -> Self {
        SphereSampling { count, seed }
    }

    /// Dimension-dependent default count.
    pub fn default_for(n: usize, seed: u64) -> Self {
        SphereSampling {
            count: sampling::default_sphere_samples(n),
            seed,
        }
    }
}

/// Directions with `ρ(x) = 1` in `space`; deterministic given the sampling knobs.
pub fn unit_directions(space: &FuzzySpace, sampling: SphereSampling) -> Vec<DVector<f64>> {
    sampling::sphere_directions(space.dim(), sampling.count, sampling.seed)
        .into_iter()
        .filter_map(|d| space.rho().normalize(&d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::TNorm;
    use crate::space::{CrispFunctional, Profile};

    #[test]
    fn construction_checks() {
        let a = Arc::new(FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap());
        let b = Arc::new(FuzzySpace::euclidean(3, 2.0, Profile::Reciprocal, TNorm::Minimum).unwrap());
        assert!(LinearOperator::new(DMatrix::zeros(3, 2), a.clone(), b.clone()).is_err());
        assert!(LinearOperator::new(DMatrix::zeros(2, 3), a.clone(), a.clone()).is_err());
        assert!(LinearOperator::new(DMatrix::from_element(2, 2, f64::NAN), a.clone(), a.clone()).is_err());
        let i = LinearOperator::identity(a.clone());
        let other = LinearOperator::identity(Arc::new(FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap()));
        assert!(i.combine(1.0, &other, 1.0).is_err());
        assert!(i.combine(1.0, &i, -1.0).unwrap().is_zero());
    }

    #[test]
    fn linearity_is_exact() {
        let a = Arc::new(FuzzySpace::euclidean(2, 1.0, Profile::Reciprocal, TNorm::Minimum).unwrap());
        let t = LinearOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]), a.clone(), a).unwrap();
        let x = DVector::from_vec(vec![0.25, -1.5]);
        let y = DVector::from_vec(vec![2.0, 0.5]);
        assert_eq!(t.apply(&(&x + &y)), t.apply(&x) + t.apply(&y));
        assert_eq!(t.apply(&(&x * 4.0)), t.apply(&x) * 4.0);
    }

    #[test]
    fn unit_directions_have_unit_rho() {
        let sp = FuzzySpace::new(
            CrispFunctional::weighted(vec![1.0, 4.0, 9.0], 2.0).unwrap(),
            Profile::Reciprocal,
            TNorm::Product,
        );
        let dirs = unit_directions(&sp, SphereSampling::new(100, 1));
        assert_eq!(dirs.len(), 100);
        for d in dirs {
            assert!((sp.rho().eval(&d) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_gain() {
        let sp = Arc::new(FuzzySpace::new(
            CrispFunctional::weighted(vec![4.0, 1.0], 1.0).unwrap(),
            Profile::Reciprocal,
            TNorm::Minimum,
        ));
        // maps e2 (‖e2‖_w = 1) to e1 (‖e1‖_w = 2)
        let t = LinearOperator::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]), sp.clone(), sp).unwrap();
        assert!((t.weighted_spectral_norm() - 2.0).abs() < 1e-12);
    }
}
