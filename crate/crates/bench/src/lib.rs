//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use phibnorm::{FuzzySpace, LinearOperator, Profile, TNorm};

pub fn reciprocal(dim: usize, p: f64) -> Arc<FuzzySpace> {
    Arc::new(FuzzySpace::euclidean(dim, p, Profile::Reciprocal, TNorm::Minimum).expect("valid space"))
}

/// A fixed, well-conditioned `dim × dim` operator on the reciprocal p = 1 space.
pub fn operator(dim: usize) -> LinearOperator {
    let sp = reciprocal(dim, 1.0);
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { 2.0 } else { 1.0 / (1.0 + (i + 2 * j) as f64) });
    LinearOperator::new(m, sp.clone(), sp).expect("square operator")
}

pub fn point(dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |i, _| (i as f64 + 1.0).sin())
}
