//! Jacobi coefficients of a measure.
//!
//! The monic orthogonal polynomials of a measure satisfy
//! `t·p_m = p_{m+1} + α_{m+1}·p_m + ω_m·p_{m-1}` with `p_0 = 1`,
//! `p_1 = t − α_1`. For a measure with exactly `N` support points the
//! recurrence stops after `N` levels with `p_N = 0`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, MomentSequence};

/// Lanczos vectors whose norm drops below this (relative to the support
/// radius) signal loss of the Krylov basis.
const BREAKDOWN_NORM: f64 = 1e-13;

/// Pivots `ω_k / R²` below this stop the moment-based recurrence.
const SINGULAR_PIVOT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJacobi", deny_unknown_fields)]
pub struct JacobiCoefficients {
    alphas: Vec<f64>,
    omegas: Vec<f64>,
    exhausted: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJacobi {
    alphas: Vec<f64>,
    omegas: Vec<f64>,
    exhausted: bool,
}

impl TryFrom<RawJacobi> for JacobiCoefficients {
    type Error = Error;

    fn try_from(raw: RawJacobi) -> Result<Self> {
        JacobiCoefficients::new(raw.alphas, raw.omegas, raw.exhausted)
    }
}

impl JacobiCoefficients {
    /// `alphas` holds `α_1..α_M`, `omegas` holds `ω_1..ω_{M-1}`.
    pub fn new(alphas: Vec<f64>, omegas: Vec<f64>, exhausted: bool) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidInput("at least one α coefficient is required".into()));
        }
        if omegas.len() + 1 != alphas.len() {
            return Err(Error::InvalidInput(format!(
                "{} α coefficients need {} ω coefficients, got {}",
                alphas.len(),
                alphas.len() - 1,
                omegas.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite α coefficient {a}")));
        }
        if let Some(w) = omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "ω coefficients must be positive, got {w}"
            )));
        }
        Ok(Self {
            alphas,
            omegas,
            exhausted,
        })
    }

    /// `levels` levels of the constant recurrence `α_m = alpha`, `ω_m = omega`.
    ///
    /// `constant(0.0, 1.0, M)` is the standard semicircle law truncated to `M` levels.
    pub fn constant(alpha: f64, omega: f64, levels: usize) -> Result<Self> {
        Self::new(
            vec![alpha; levels.max(1)],
            vec![omega; levels.max(1) - 1],
            false,
        )
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// True when the recurrence terminated because the measure has exactly
    /// `levels()` support points.
    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn levels(&self) -> usize {
        self.alphas.len()
    }

    /// The first `levels` levels, no longer marked exhausted unless nothing was cut.
    pub fn truncated(&self, levels: usize) -> Result<Self> {
        if levels == 0 || levels > self.levels() {
            return Err(Error::InsufficientCoefficients {
                needed: levels,
                available: self.levels(),
            });
        }
        Self::new(
            self.alphas[..levels].to_vec(),
            self.omegas[..levels - 1].to_vec(),
            self.exhausted && levels == self.levels(),
        )
    }

    /// Levels `start..` (1-based) as a coefficient set of their own.
    pub fn tail(&self, start: usize) -> Result<Self> {
        if start == 0 || start > self.levels() {
            return Err(Error::InsufficientCoefficients {
                needed: start,
                available: self.levels(),
            });
        }
        Self::new(
            self.alphas[start - 1..].to_vec(),
            self.omegas[start - 1..].to_vec(),
            self.exhausted,
        )
    }

    /// The symmetric tridiagonal Jacobi matrix: `α` on the diagonal and
    /// `√ω` beside it.
    pub fn jacobi_matrix(&self) -> DMatrix<f64> {
        let m = self.levels();
        let mut j = DMatrix::zeros(m, m);
        for (k, a) in self.alphas.iter().enumerate() {
            j[(k, k)] = *a;
        }
        for (k, w) in self.omegas.iter().enumerate() {
            let b = w.sqrt();
            j[(k, k + 1)] = b;
            j[(k + 1, k)] = b;
        }
        j
    }

    /// The measure whose first `2·levels()` moments these coefficients
    /// reproduce: nodes are the eigenvalues of the Jacobi matrix, weights the
    /// squared first components of its eigenvectors. For exhausted
    /// coefficients this is the original measure.
    pub fn quadrature_measure(&self) -> Result<DiscreteMeasure> {
        let eig = SymmetricEigen::new(self.jacobi_matrix());
        let points: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let weights: Vec<f64> = (0..points.len())
            .map(|k| eig.eigenvectors[(0, k)].powi(2))
            .collect();
        DiscreteMeasure::normalized(points, weights)
    }

    /// Eigenvalues of the Jacobi matrix, ascending.
    pub fn nodes(&self) -> Vec<f64> {
        let mut nodes: Vec<f64> = SymmetricEigen::new(self.jacobi_matrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes
    }

    /// `max_m (|α_m| + √ω_m)`. Bounded by `2·sup|t|` over the support.
    pub fn coefficient_radius(&self) -> f64 {
        (0..self.levels())
            .map(|k| self.alphas[k].abs() + self.omegas.get(k).map_or(0.0, |w| w.sqrt()))
            .fold(0.0, f64::max)
    }
}

/// Stieltjes procedure: Lanczos tridiagonalisation of multiplication by `t`
/// in `L²(μ)`, started from the constant function and fully reorthogonalised.
pub fn jacobi_from_discrete(measure: &DiscreteMeasure) -> Result<JacobiCoefficients> {
    let t = measure.points();
    let n = t.len();
    let scale = measure.support_radius().max(1.0);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    basis.push(measure.weights().iter().map(|w| w.sqrt()).collect());
    let mut alphas = Vec::with_capacity(n);
    let mut omegas = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n {
        let q = &basis[k];
        let mut v: Vec<f64> = q.iter().zip(t).map(|(qi, ti)| qi * ti).collect();
        let alpha = dot(q, &v);
        alphas.push(alpha);
        if k + 1 == n {
            break;
        }
        // two passes of classical Gram-Schmidt against every previous vector
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let beta = norm(&v);
        if beta < BREAKDOWN_NORM * scale {
            return Err(Error::Breakdown {
                level: k + 1,
                norm: beta,
            });
        }
        omegas.push(beta * beta);
        v.iter_mut().for_each(|vi| *vi /= beta);
        basis.push(v);
    }

    JacobiCoefficients::new(alphas, omegas, true)
}

/// Chebyshev algorithm on the raw moments `M_0..M_{2·depth−1}`.
///
/// If a pivot `ω_k` collapses (relative to `R²`) before `depth` levels, the
/// sequence is either that of a `k`-point measure (the truncation reproduces
/// every supplied moment, and the result is marked exhausted) or numerically
/// unusable past level `k`, which is reported as [`Error::HankelSingular`].
pub fn jacobi_from_moments(ms: &MomentSequence, depth: usize) -> Result<JacobiCoefficients> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let mu = ms.moments();
    let needed = 2 * depth;
    if mu.len() < needed {
        // a single level only consumes M_0 and M_1
        if !(depth == 1 && mu.len() >= 2) {
            return Err(Error::InvalidInput(format!(
                "depth {depth} needs {needed} moments, got {}",
                mu.len()
            )));
        }
    }
    let usable = needed.min(mu.len());
    let r2 = ms.support_bound().powi(2);

    let mut alphas = vec![mu[1] / mu[0]];
    let mut omegas: Vec<f64> = Vec::new();
    let mut prev: Vec<f64> = vec![0.0; usable];
    let mut cur: Vec<f64> = mu[..usable].to_vec();
    let mut beta_prev = mu[0];

    for k in 1..depth {
        let mut next = vec![0.0; usable];
        let a = alphas[k - 1];
        for l in k..(usable - k) {
            next[l] = cur[l + 1] - a * cur[l] - beta_prev * prev[l];
        }
        let pivot = next[k];
        let omega = pivot / cur[k - 1];
        if !(omega > SINGULAR_PIVOT * r2) {
            return finish_early(ms, alphas, omegas, k);
        }
        alphas.push(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
        omegas.push(omega);
        beta_prev = omega;
        prev = cur;
        cur = next;
    }

    JacobiCoefficients::new(alphas, omegas, false)
}

fn finish_early(
    ms: &MomentSequence,
    alphas: Vec<f64>,
    omegas: Vec<f64>,
    reliable_depth: usize,
) -> Result<JacobiCoefficients> {
    let jc = JacobiCoefficients::new(alphas, omegas, true)?;
    let r = ms.support_bound();
    let reproduced = moments_from_jacobi(&jc, ms.len() - 1);
    let consistent = ms
        .moments()
        .iter()
        .zip(&reproduced)
        .enumerate()
        .all(|(m, (a, b))| (a - b).abs() <= 1e-8 * r.powi(m as i32).max(1.0));
    if consistent {
        Ok(jc)
    } else {
        Err(Error::HankelSingular { reliable_depth })
    }
}

/// Moments `M_0..=M_order` of the measure with these coefficients, read off
/// as the `(1,1)` entries of powers of the Jacobi matrix.
///
/// For truncated (non-exhausted) coefficients with `M` levels, only the
/// first `2M` moments are those of the underlying measure.
pub fn moments_from_jacobi(jc: &JacobiCoefficients, order: usize) -> Vec<f64> {
    let m = jc.levels();
    let a = jc.alphas();
    let b: Vec<f64> = jc.omegas().iter().map(|w| w.sqrt()).collect();
    let mut v = vec![0.0; m];
    v[0] = 1.0;
    let mut out = Vec::with_capacity(order + 1);
    out.push(1.0);
    for _ in 0..order {
        let mut next = vec![0.0; m];
        for k in 0..m {
            let mut s = a[k] * v[k];
            if k > 0 {
                s += b[k - 1] * v[k - 1];
            }
            if k + 1 < m {
                s += b[k] * v[k + 1];
            }
            next[k] = s;
        }
        v = next;
        out.push(v[0]);
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
