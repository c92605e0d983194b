//! Operator-valued layer over `M_n(ℂ)`.

pub mod covering;
pub mod identity;
pub mod kraus;
pub mod matrix;
pub mod model;
pub mod solver;

pub use covering::{covering_decomposition, Covering};
pub use identity::{diagonal_transform_identity_check, IdentityReport};
pub use kraus::{cp_apply, KrausMap};
pub use matrix::ComplexMatrix;
pub use model::{model_from_jacobi, ModelSpec, Orientation, SemicircularModel, State};
pub use solver::{residual, scalar_transform, solve_cauchy, solve_cauchy_with, Method, Solution, SolveOptions};
