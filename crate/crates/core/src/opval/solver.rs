//! Solver for `bG = 1 + (D + η(G))G` on the upper half-plane of `M_n(ℂ)`.
//!
//! Damped Picard iteration `G ← (1−λ)G + λ(b − D − η(G))⁻¹` runs first. When
//! it stalls (typically for `b` close to the real axis) and `n ≤ 16`, the
//! solver switches to Newton's method continued along `b + it·1` from large
//! `t` down to `t = 0`, which tracks the half-plane branch.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::matrix::ComplexMatrix;
use super::model::{SemicircularModel, State};
use crate::error::{Error, Result};

/// Largest dimension for which the dense Newton fallback is used.
pub const NEWTON_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Total iteration budget over all phases.
    pub max_iterations: usize,
    /// Residual target is `tolerance·(1 + ‖b‖)`.
    pub tolerance: f64,
    /// Picard iterations before switching to continuation.
    pub picard_patience: usize,
    /// Allow the Newton continuation fallback.
    pub newton: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 10_000,
            tolerance: 1e-10,
            picard_patience: 300,
            newton: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Continuation,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub g: ComplexMatrix,
    pub iterations: usize,
    pub residual: f64,
    pub method: Method,
}

/// `bG − 1 − (D + η(G))G`.
pub fn residual(model: &SemicircularModel, b: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    let m = shifted(model, b, g);
    &(&m * g) - &ComplexMatrix::identity(model.dim())
}

/// `b − D − η(G)`.
fn shifted(model: &SemicircularModel, b: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    &(b - model.mean()) - &model.variance().apply(g)
}

fn residual_norm(model: &SemicircularModel, b: &ComplexMatrix, g: &ComplexMatrix) -> f64 {
    residual(model, b, g).frobenius_norm()
}

/// Solves for `G(b)` with default options.
pub fn solve_cauchy(model: &SemicircularModel, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(solve_cauchy_with(model, b, &SolveOptions::default(), None)?.g)
}

/// Solves for `G(b)`, optionally starting the Picard phase at `start`.
pub fn solve_cauchy_with(
    model: &SemicircularModel,
    b: &ComplexMatrix,
    opts: &SolveOptions,
    start: Option<&ComplexMatrix>,
) -> Result<Solution> {
    let n = model.dim();
    b.check_dim(n)?;
    if !b.is_finite() {
        return Err(Error::Domain("b must have finite entries".into()));
    }
    let y_min = b.imag_part().hermitian_eigenvalues()[0];
    if !(y_min > 0.0) {
        return Err(Error::Domain(format!(
            "Im b must be positive definite (smallest eigenvalue {y_min:e})"
        )));
    }
    if let Some(s) = start {
        s.check_dim(n)?;
    }
    let tol = opts.tolerance * (1.0 + b.op_norm());
    let newton_ok = opts.newton && n <= NEWTON_MAX_DIM;
    let patience = if newton_ok {
        opts.picard_patience.min(opts.max_iterations)
    } else {
        opts.max_iterations
    };

    let start = match start {
        Some(s) => s.clone(),
        None => b.inverse()?,
    };
    let picard = picard(model, b, start, tol, patience);
    let (mut g, mut iterations, mut res, mut method) = match picard {
        Ok(p) => (p.0, p.1, p.2, Method::Picard),
        Err(Error::SingularMatrix) if newton_ok => (b.inverse()?, 0, f64::INFINITY, Method::Picard),
        Err(e) => return Err(e),
    };

    if res > tol && newton_ok {
        let budget = opts.max_iterations.saturating_sub(iterations);
        let (cg, used, cres) = continuation(model, b, y_min, tol, budget)?;
        g = cg;
        iterations += used;
        res = cres;
        method = Method::Continuation;
    }
    if !(res <= tol) {
        return Err(Error::NonConvergence {
            iterations,
            residual: res,
        });
    }
    let max_imag = *g.imag_part().hermitian_eigenvalues().last().unwrap();
    if max_imag > 1e-9 * g.op_norm().max(1.0) {
        return Err(Error::OffBranch {
            max_eigenvalue: max_imag,
        });
    }
    Ok(Solution {
        g,
        iterations,
        residual: res,
        method,
    })
}

/// Damped fixed-point iteration. Returns the last iterate, iterations used and its residual.
fn picard(
    model: &SemicircularModel,
    b: &ComplexMatrix,
    mut g: ComplexMatrix,
    tol: f64,
    budget: usize,
) -> Result<(ComplexMatrix, usize, f64)> {
    let mut res = residual_norm(model, b, &g);
    let mut lambda = 1.0f64;
    let mut it = 0;
    while it < budget && res > tol {
        it += 1;
        let next = shifted(model, b, &g).inverse()?;
        let cand = &g.scale(Complex64::new(1.0 - lambda, 0.0)) + &next.scale(Complex64::new(lambda, 0.0));
        let cres = residual_norm(model, b, &cand);
        if cres < res || lambda <= 1.0 / 16.0 {
            g = cand;
            res = cres;
            lambda = (2.0 * lambda).min(1.0);
        } else {
            lambda *= 0.5;
        }
    }
    log::debug!("picard: {it} iterations, residual {res:e}");
    Ok((g, it, res))
}

/// Newton's method continued along `b + it·1`, `t` halving from a model
/// scale down to zero.
fn continuation(
    model: &SemicircularModel,
    b: &ComplexMatrix,
    y_min: f64,
    tol: f64,
    budget: usize,
) -> Result<(ComplexMatrix, usize, f64)> {
    let n = model.dim();
    let eta_one = model.variance().apply(&ComplexMatrix::identity(n)).op_norm();
    let mut t = model.mean().op_norm() + 2.0 * eta_one.sqrt() + 1.0;
    let mut used = 0;
    let mut g: Option<ComplexMatrix> = None;
    loop {
        let bt = b + &ComplexMatrix::scalar(n, Complex64::new(0.0, t));
        let stage_tol = tol.max(1e-10 * (1.0 + bt.op_norm()));
        let g0 = match g.take() {
            Some(prev) => prev,
            None => bt.inverse()?,
        };
        let (gs, k, res) = newton(model, &bt, g0, stage_tol, budget - used)?;
        used += k;
        if t == 0.0 {
            log::debug!("continuation: {used} newton steps, residual {res:e}");
            return Ok((gs, used, res));
        }
        if res > 1e3 * stage_tol || used >= budget {
            return Err(Error::NonConvergence {
                iterations: used,
                residual: res,
            });
        }
        g = Some(gs);
        t = if t / 2.0 < y_min { 0.0 } else { t / 2.0 };
    }
}

fn vec_of(m: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

fn unvec(v: &DVector<Complex64>, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| v[i * n + j])
}

/// Newton iteration on `F(G) = (b − D − η(G))G − 1` with backtracking.
fn newton(
    model: &SemicircularModel,
    b: &ComplexMatrix,
    mut g: ComplexMatrix,
    tol: f64,
    budget: usize,
) -> Result<(ComplexMatrix, usize, f64)> {
    let n = model.dim();
    let eta = model.variance();
    let mut f = residual(model, b, &g);
    let mut res = f.frobenius_norm();
    let mut it = 0;
    while res > tol && it < budget.min(100) {
        it += 1;
        let m = shifted(model, b, &g);
        let mut jac = DMatrix::<Complex64>::zeros(n * n, n * n);
        for p in 0..n {
            for q in 0..n {
                let e = ComplexMatrix::unit(n, p, q);
                let col = &(&m * &e) - &(&eta.apply(&e) * &g);
                for (r, z) in col.as_slice().iter().enumerate() {
                    jac[(r, p * n + q)] = *z;
                }
            }
        }
        let step = jac.lu().solve(&(-vec_of(&f))).ok_or(Error::SingularMatrix)?;
        let step = unvec(&step, n);
        let mut s = 1.0;
        let mut accepted = false;
        while s > 1e-3 {
            let cand = &g + &step.scale(Complex64::new(s, 0.0));
            let cf = residual(model, b, &cand);
            let cres = cf.frobenius_norm();
            if cres.is_finite() && cres < (1.0 - 1e-4 * s) * res {
                g = cand;
                f = cf;
                res = cres;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // stagnated at the rounding floor
            break;
        }
    }
    Ok((g, it, res))
}

/// `φ(G(ξ·1))`.
pub fn scalar_transform(model: &SemicircularModel, state: State, xi: Complex64) -> Result<Complex64> {
    let b = ComplexMatrix::scalar(model.dim(), xi);
    state.apply(&solve_cauchy(model, &b)?)
}
