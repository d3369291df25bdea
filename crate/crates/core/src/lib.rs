//! Numerical toolkit for fuzzy strong φ-b-normed spaces on `R^n`.
//!
//! A space is described by a crisp b-functional `ρ(x) = ‖x‖_w^p`, a membership
//! profile `s` and a t-norm; the fuzzy norm is `N(x, t) = s(t / ρ(x))`. On top
//! of that representation the crate computes level infima `d_α`, certifies
//! fuzzy boundedness of matrices, evaluates the operator fuzzy norm and runs
//! sequence and completeness experiments.

pub mod bisect;
pub mod check;
pub mod completeness;
pub mod error;
pub mod sampling;
pub mod scalar;
pub mod operator;
pub mod opnorm;
pub mod space;

pub use check::{AxiomOutcome, AxiomReport, Witness};
pub use error::{Error, Result};
pub use scalar::{Continuity, Phi, PhiCheck, TNorm};
pub use completeness::{Decay, OperatorSequence};
pub use operator::{LinearOperator, SphereSampling};
pub use opnorm::OperatorNorm;
pub use space::{CrispFunctional, FuzzySpace, LevelValue, Profile};
