//! Scalar ingredients: t-norms and φ-functions.

pub mod phi;
pub mod tnorm;

pub use phi::{Phi, PhiCheck};
pub use tnorm::{Continuity, TNorm};
