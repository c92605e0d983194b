//! Computational free probability over matrix algebras.
//!
//! Scalar side: discrete measures and moment sequences, Jacobi coefficients,
//! continued-fraction Cauchy transforms and Stieltjes inversion. Operator side:
//! the semicircular fixed-point equation `bG = 1 + (D + η(G))G` over `M_n(ℂ)`,
//! scalar distributions through states, and atoms of nilpotent-variance models.

pub mod atoms;
pub mod cauchy_cf;
pub mod closed_form;
pub mod error;
pub mod format;
pub mod jacobi;
pub mod measure;
pub mod opval;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use jacobi::JacobiCoefficients;
pub use measure::{DiscreteMeasure, MomentSequence};
