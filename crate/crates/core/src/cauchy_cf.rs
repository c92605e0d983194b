//! Continued-fraction evaluation of Cauchy transforms and Stieltjes inversion.
//!
//! All fractions are evaluated from the innermost level outwards with a zero
//! tail, which keeps every intermediate value in the lower half-plane when
//! `Im ξ > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::JacobiCoefficients;

/// Depth used when the caller does not pick one and the coefficients are not exhausted.
pub const DEFAULT_DEPTH: usize = 200;

fn require_upper(xi: Complex64) -> Result<()> {
    if xi.re.is_finite() && xi.im.is_finite() && xi.im > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("need Im ξ > 0, got {xi}")))
    }
}

/// Number of levels actually used when `depth` levels are requested from `start`.
fn resolve_depth(jc: &JacobiCoefficients, start: usize, depth: usize) -> Result<usize> {
    if start == 0 || depth == 0 {
        return Err(Error::InvalidInput(format!(
            "start and depth must be at least 1 (got start {start}, depth {depth})"
        )));
    }
    let levels = jc.levels();
    if start > levels {
        return Err(Error::InsufficientCoefficients {
            needed: start,
            available: levels,
        });
    }
    let available = levels - start + 1;
    if depth <= available {
        Ok(depth)
    } else if jc.exhausted() {
        // the fraction genuinely ends here
        Ok(available)
    } else {
        Err(Error::InsufficientCoefficients {
            needed: start + depth - 1,
            available: levels,
        })
    }
}

/// `1/(ξ − α_0 − ω_0/(ξ − α_1 − ⋯ − ω_{m−2}/(ξ − α_{m−1})))` over the given slices.
fn fraction(alphas: &[f64], omegas: &[f64], xi: Complex64, first_level: usize) -> Result<Complex64> {
    let m = alphas.len();
    let mut tail = Complex64::new(0.0, 0.0);
    for k in (0..m).rev() {
        let mut denom = xi - alphas[k];
        if k + 1 < m {
            denom -= omegas[k] * tail;
        }
        if denom.norm() == 0.0 || !denom.is_finite() {
            return Err(Error::ZeroDenominator {
                level: first_level + k,
            });
        }
        tail = denom.inv();
    }
    Ok(tail)
}

/// The continued fraction of the Cauchy transform truncated after `depth` levels.
///
/// For exhausted coefficients a depth beyond the last level is clamped, so
/// the full fraction equals the transform of the underlying finite measure.
pub fn cf_eval(jc: &JacobiCoefficients, xi: Complex64, depth: usize) -> Result<Complex64> {
    tail_fraction(jc, 1, xi, depth)
}

/// The `n`-th convergent: the fraction through `α_n` with no trailing `ω_n` term.
pub fn convergent(jc: &JacobiCoefficients, n: usize, xi: Complex64) -> Result<Complex64> {
    cf_eval(jc, xi, n)
}

/// The fraction whose outermost level is `start` (1-based):
/// `1/(ξ − α_start − ω_start/(ξ − α_{start+1} − ⋯))`, truncated after `depth` levels.
pub fn tail_fraction(
    jc: &JacobiCoefficients,
    start: usize,
    xi: Complex64,
    depth: usize,
) -> Result<Complex64> {
    require_upper(xi)?;
    let d = resolve_depth(jc, start, depth)?;
    let lo = start - 1;
    let hi = lo + d;
    fraction(&jc.alphas()[lo..hi], &jc.omegas()[lo..hi - 1], xi, start)
}

/// A transform value together with a depth-halving Cauchy estimate
/// `|G_d − G_{d/2}|`. The estimate is a heuristic: nothing guarantees a rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: Complex64,
    pub depth: usize,
    pub doubling_gap: f64,
}

/// Evaluates at `depth` (default [`DEFAULT_DEPTH`], clamped to the available
/// levels) and reports how far the value moved since half that depth.
/// Exhausted coefficients evaluated at full depth report a gap of zero.
pub fn cf_eval_with_estimate(
    jc: &JacobiCoefficients,
    xi: Complex64,
    depth: Option<usize>,
) -> Result<Estimate> {
    let depth = depth.unwrap_or(DEFAULT_DEPTH.min(jc.levels()));
    let used = resolve_depth(jc, 1, depth)?;
    let value = cf_eval(jc, xi, used)?;
    let doubling_gap = if jc.exhausted() && used == jc.levels() {
        0.0
    } else if used >= 2 {
        (value - cf_eval(jc, xi, used / 2)?).norm()
    } else {
        f64::INFINITY
    };
    Ok(Estimate {
        value,
        depth: used,
        doubling_gap,
    })
}

/// Density samples `max(0, −Im G(x + iε)/π)` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub epsilon: f64,
    pub densities: Vec<f64>,
}

impl DensityGrid {
    /// Trapezoid rule over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.densities.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1]))
            .sum()
    }

    /// `x,density` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (x, d) in self.xs.iter().zip(&self.densities) {
            out.push_str(&crate::format::plain_decimal(*x));
            out.push(',');
            out.push_str(&crate::format::plain_decimal(*d));
            out.push('\n');
        }
        out
    }
}

/// `steps` equally spaced points from `xmin` to `xmax` inclusive.
pub fn grid(xmin: f64, xmax: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(xmin < xmax) || !xmin.is_finite() || !xmax.is_finite() {
        return Err(Error::InvalidInput(format!(
            "grid needs xmin < xmax and at least 2 steps (got [{xmin}, {xmax}], {steps})"
        )));
    }
    let h = (xmax - xmin) / (steps - 1) as f64;
    Ok((0..steps).map(|k| xmin + h * k as f64).collect())
}

/// Stieltjes–Perron inversion of a transform on a grid.
pub fn stieltjes_density<F>(mut g: F, xs: &[f64], epsilon: f64) -> Result<DensityGrid>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let mut densities = Vec::with_capacity(xs.len());
    for &x in xs {
        let value = -g(Complex64::new(x, epsilon))?.im / PI;
        if value < -1e-9 {
            log::warn!("negative density {value:e} at x = {x}; evaluator is not Herglotz there");
        }
        densities.push(value.max(0.0));
    }
    Ok(DensityGrid {
        xs: xs.to_vec(),
        epsilon,
        densities,
    })
}
