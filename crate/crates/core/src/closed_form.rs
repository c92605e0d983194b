//! Closed-form Cauchy transforms used as reference values.
//!
//! Square roots of the form `√(ξ² − c)` are taken as `ξ·√(1 − c/ξ²)` with the
//! principal root, which is analytic on the upper half-plane and makes every
//! transform below satisfy `ξG(ξ) → 1`.

use num_complex::Complex64;

/// `√(ξ² − c)` continued from `ξ` at infinity; `c ≥ 0`.
pub fn sqrt_sq_minus(xi: Complex64, c: f64) -> Complex64 {
    xi * (1.0 - c / (xi * xi)).sqrt()
}

/// Of several candidate transform values, the one in the open lower
/// half-plane closest to `1/ξ` relative to the candidates' spread.
pub fn lower_branch(xi: Complex64, candidates: &[Complex64]) -> Option<Complex64> {
    let target = xi.inv();
    candidates
        .iter()
        .copied()
        .filter(|g| g.im < 0.0)
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

/// Semicircle of variance `v`: `(ξ − √(ξ² − 4v))/(2v)`.
pub fn semicircle(xi: Complex64, v: f64) -> Complex64 {
    // rationalized form of (ξ − √(ξ² − 4v))/(2v), free of cancellation for large ξ
    2.0 / (xi + sqrt_sq_minus(xi, 4.0 * v))
}

/// Density of the semicircle of variance `v`.
pub fn semicircle_density(x: f64, v: f64) -> f64 {
    let r2 = 4.0 * v - x * x;
    if r2 <= 0.0 {
        0.0
    } else {
        r2.sqrt() / (2.0 * std::f64::consts::PI * v)
    }
}

/// Normalized trace of the transform for `D = 0`, single Kraus operator
/// `[[0, α], [β, 0]]`, with `|α| ≠ |β|`.
pub fn two_by_two_offdiag_trace(alpha: f64, beta: f64, xi: Complex64) -> Complex64 {
    let a = alpha * alpha;
    let b = beta * beta;
    let lo = (alpha.abs() - beta.abs()).powi(2);
    let hi = (alpha.abs() + beta.abs()).powi(2);
    // ξ⁴ − 2ξ²(A+B) + (A−B)² = (ξ² − lo)(ξ² − hi)
    let s = sqrt_sq_minus(xi, lo) * sqrt_sq_minus(xi, hi);
    // (A+B)(ξ² − S) − (A−B)² with ξ² − S rationalized
    let xi2 = xi * xi;
    let d2 = (a - b).powi(2);
    let top = 2.0 * xi2 * (a + b).powi(2) - d2 * (a + b + xi2 + s);
    top / ((xi2 + s) * 4.0 * xi * a * b)
}

/// Mass at zero of the same distribution: `½(1 − |β/α|^{2 sgn(1 − |β/α|)})`.
pub fn two_by_two_offdiag_atom(alpha: f64, beta: f64) -> f64 {
    let r = (beta / alpha).abs();
    let sgn = (1.0 - r).signum();
    0.5 * (1.0 - r.powf(2.0 * sgn))
}

/// Support of the same distribution: `||α| − |β|| ≤ |x| ≤ |α| + |β|`, plus the atom at 0.
pub fn two_by_two_offdiag_band(alpha: f64, beta: f64) -> (f64, f64) {
    ((alpha.abs() - beta.abs()).abs(), alpha.abs() + beta.abs())
}

/// Normalized trace for `D = 0` and the 3×3 Kraus operator
/// `[[0,1,1],[0,0,1],[0,0,0]]`: `(1/ξ + g + (ξ² − 1)g³)/3` with `g` the
/// standard semicircle transform.
pub fn three_by_three_trace(xi: Complex64) -> Complex64 {
    let g = semicircle(xi, 1.0);
    (xi.inv() + g + (xi * xi - 1.0) * g * g * g) / 3.0
}

/// `¼δ₋₁ + ½δ₀ + ¼δ₁`: `(ξ² − ½)/(ξ³ − ξ)`.
pub fn three_atom_trace(xi: Complex64) -> Complex64 {
    (xi * xi - 0.5) / (xi * xi * xi - xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn probes() -> Vec<Complex64> {
        let mut out = Vec::new();
        for re in [-5.0, -2.0, -1.0, -0.3, 0.0, 0.4, 1.5, 3.0] {
            for im in [1e-3, 0.05, 0.5, 2.0, 30.0] {
                out.push(c(re, im));
            }
        }
        out
    }

    #[test]
    fn semicircle_branch_and_quadratic() {
        for xi in probes() {
            let g = semicircle(xi, 1.0);
            assert!(g.im < 0.0, "{xi} -> {g}");
            assert!((g * g - xi * g + 1.0).norm() < 1e-12);
        }
        let big = c(0.0, 1e6);
        assert!((big * semicircle(big, 1.0) - 1.0).norm() < 1e-11);
    }

    #[test]
    fn semicircle_matches_lower_branch_picker() {
        for xi in probes() {
            let d = (xi * xi - 4.0).sqrt();
            let picked = lower_branch(xi, &[(xi - d) / 2.0, (xi + d) / 2.0]).unwrap();
            assert!((picked - semicircle(xi, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn semicircle_density_limit() {
        let eps = 1e-7;
        for x in [-1.5, 0.0, 0.7, 1.9] {
            let d = -semicircle(c(x, eps), 1.0).im / std::f64::consts::PI;
            assert!((d - semicircle_density(x, 1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn offdiag_trace_is_herglotz_and_normalized() {
        for (a, b) in [(2.0, 1.0), (1.0, 2.0), (3.0, 1.0), (2.0, 3.0)] {
            for xi in probes() {
                assert!(two_by_two_offdiag_trace(a, b, xi).im < 0.0);
            }
            let big = c(0.3, 1e5);
            assert!((big * two_by_two_offdiag_trace(a, b, big) - 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn offdiag_atoms() {
        assert!((two_by_two_offdiag_atom(2.0, 1.0) - 0.375).abs() < 1e-15);
        assert!((two_by_two_offdiag_atom(1.0, 2.0) - 0.375).abs() < 1e-15);
        assert!((two_by_two_offdiag_atom(2.0, 3.0) - 5.0 / 18.0).abs() < 1e-15);
        // ξ·tr G(ξ) at a small vertical offset approaches the atom
        let eps = 1e-8;
        let xi = c(0.0, eps);
        let m = (xi * two_by_two_offdiag_trace(2.0, 1.0, xi)).re;
        assert!((m - 0.375).abs() < 1e-6);
    }

    #[test]
    fn three_by_three_has_third_at_zero() {
        let xi = c(0.0, 1e-8);
        let m = (xi * three_by_three_trace(xi)).re;
        assert!((m - 1.0 / 3.0).abs() < 1e-6);
        for xi in probes() {
            assert!(three_by_three_trace(xi).im < 0.0);
        }
    }

    #[test]
    fn three_atom_partial_fractions() {
        let xi = c(0.2, 0.9);
        let direct = 0.25 / (xi + 1.0) + 0.5 / xi + 0.25 / (xi - 1.0);
        assert!((direct - three_atom_trace(xi)).norm() < 1e-14);
    }
}
