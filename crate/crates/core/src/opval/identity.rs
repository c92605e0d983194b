//! Diagonal structure of the transform of models built from Jacobi coefficients.

use num_complex::Complex64;
use serde::Serialize;

use super::matrix::ComplexMatrix;
use super::model::{model_from_jacobi, Orientation};
use super::solver::solve_cauchy;
use crate::cauchy_cf::{convergent, tail_fraction};
use crate::error::Result;
use crate::jacobi::JacobiCoefficients;

pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Comparison of `G(ξ·1_n)` with continued fractions of `jc`.
///
/// `convergent_errors[k−1]` compares entry `(k,k)` with the `(n−k+1)`-th
/// convergent (forward) or the `k`-th convergent (reversed). `tail_errors`
/// compares it with the fraction over levels `k..n` (forward) or
/// `n+1−k..n` (reversed). `state_error` is the entry at `e_1` (forward) or
/// `e_n` (reversed) against the `n`-th convergent.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub orientation: Orientation,
    pub off_diagonal_norm: f64,
    pub convergent_errors: Vec<f64>,
    pub tail_errors: Vec<f64>,
    pub state_error: f64,
}

impl IdentityReport {
    pub fn max_convergent_error(&self) -> f64 {
        self.convergent_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_tail_error(&self) -> f64 {
        self.tail_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> bool {
        self.off_diagonal_norm <= IDENTITY_TOLERANCE
    }

    /// Every diagonal entry is the convergent of matching length.
    pub fn convergent_identity_holds(&self) -> bool {
        self.diagonal() && self.max_convergent_error() <= IDENTITY_TOLERANCE
    }

    /// Every diagonal entry is the tail fraction of matching levels.
    pub fn tail_identity_holds(&self) -> bool {
        self.diagonal() && self.max_tail_error() <= IDENTITY_TOLERANCE
    }
}

pub fn diagonal_transform_identity_check(
    jc: &JacobiCoefficients,
    n: usize,
    orientation: Orientation,
    xi: Complex64,
) -> Result<IdentityReport> {
    let model = model_from_jacobi(jc, n, orientation)?;
    let g = solve_cauchy(&model, &ComplexMatrix::scalar(n, xi))?;
    let mut convergent_errors = Vec::with_capacity(n);
    let mut tail_errors = Vec::with_capacity(n);
    for k in 1..=n {
        let entry = g[(k - 1, k - 1)];
        let (conv_len, tail_start) = match orientation {
            Orientation::Forward => (n - k + 1, k),
            Orientation::Reversed => (k, n + 1 - k),
        };
        let levels = n + 1 - tail_start;
        convergent_errors.push((entry - convergent(jc, conv_len, xi)?).norm());
        tail_errors.push((entry - tail_fraction(jc, tail_start, xi, levels)?).norm());
    }
    let state_index = match orientation {
        Orientation::Forward => 0,
        Orientation::Reversed => n - 1,
    };
    let state_error = (g[(state_index, state_index)] - convergent(jc, n, xi)?).norm();
    Ok(IdentityReport {
        n,
        orientation,
        off_diagonal_norm: g.off_diagonal_norm(),
        convergent_errors,
        tail_errors,
        state_error,
    })
}
