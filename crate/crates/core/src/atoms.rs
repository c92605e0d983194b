//! Point masses from boundary limits of Cauchy transforms, and the
//! nilpotent-variance analysis that predicts a mass at zero.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::opval::{ComplexMatrix, KrausMap, SemicircularModel};

/// Vertical offsets used for `(ξ − r)G(ξ)` at `ξ = r + iε`.
pub const EPSILONS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, Serialize)]
pub struct AtomReport {
    pub location: f64,
    pub mass: f64,
    pub epsilons: Vec<f64>,
    /// `(ξ − r)G(ξ)` at each ε, as `[re, im]`.
    #[serde(serialize_with = "pairs")]
    pub raw_estimates: Vec<Complex64>,
    /// Set when the evaluator failed before the smallest ε.
    pub truncated: bool,
}

fn pairs<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// `μ({r})` from `lim (ξ − r)G(ξ)` along `ξ = r + iε`, linearly extrapolated
/// to `ε = 0` from the two smallest offsets that evaluated.
pub fn atom_mass<F>(mut g: F, r: f64) -> Result<AtomReport>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("atom location must be finite, got {r}")));
    }
    let mut epsilons = Vec::new();
    let mut raw = Vec::new();
    let mut truncated = false;
    for &eps in &EPSILONS {
        let offset = Complex64::new(0.0, eps);
        match g(Complex64::new(r, eps)) {
            Ok(v) if v.is_finite() => {
                epsilons.push(eps);
                raw.push(offset * v);
            }
            Ok(_) | Err(_) => {
                log::warn!("transform evaluation failed at {r} + {eps:e}i; using larger offsets only");
                truncated = true;
                break;
            }
        }
    }
    let k = raw.len();
    let estimate = match k {
        0 => {
            return Err(Error::AtomExtraction(format!(
                "transform could not be evaluated near {r}"
            )))
        }
        1 => raw[0].re,
        _ => {
            let (ea, fa) = (epsilons[k - 2], raw[k - 2].re);
            let (eb, fb) = (epsilons[k - 1], raw[k - 1].re);
            (ea * fb - eb * fa) / (ea - eb)
        }
    };
    Ok(AtomReport {
        location: r,
        mass: estimate.clamp(0.0, 1.0),
        epsilons,
        raw_estimates: raw,
        truncated,
    })
}

/// `η` as a linear operator on `M_n(ℂ)`, least `m ≤ n²` with `‖η^m‖` negligible.
pub fn nilpotency_index(eta: &KrausMap) -> Option<usize> {
    let s = eta.superoperator();
    let n2 = s.nrows();
    let base = s.norm().max(1.0);
    let mut p = s.clone();
    for m in 1..=n2 {
        if p.norm() <= 1e-12 * base.powi(m as i32) {
            return Some(m);
        }
        p = &s * &p;
    }
    None
}

fn is_nilpotent_matrix(a: &ComplexMatrix) -> bool {
    let n = a.dim();
    let scale = a.max_abs().max(1.0).powi(n as i32);
    let mut p = a.clone();
    for _ in 1..n {
        p = &p * a;
    }
    p.max_abs() <= 1e-12 * scale
}

/// Cross-check of Kraus-operator nilpotency and commutation against `η`.
#[derive(Debug, Clone, Serialize)]
pub struct KrausCheck {
    pub all_nilpotent: bool,
    pub all_commute: bool,
    pub eta_nilpotent: Option<usize>,
    /// `η` nilpotent implies every Kraus operator is nilpotent.
    pub nilpotent_implies_ops_nilpotent: bool,
    /// Nilpotent commuting operators imply `η` nilpotent.
    pub commuting_nilpotent_implies_eta_nilpotent: bool,
}

pub fn kraus_nilpotent_commuting_check(eta: &KrausMap) -> KrausCheck {
    let ops = eta.ops();
    let all_nilpotent = ops.iter().all(is_nilpotent_matrix);
    let scale = ops.iter().map(|a| a.max_abs()).fold(1.0, f64::max).powi(2);
    let mut all_commute = true;
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            if (&(a * b) - &(b * a)).max_abs() > 1e-12 * scale {
                all_commute = false;
            }
        }
    }
    let eta_nilpotent = nilpotency_index(eta);
    KrausCheck {
        all_nilpotent,
        all_commute,
        eta_nilpotent,
        nilpotent_implies_ops_nilpotent: eta_nilpotent.is_none() || all_nilpotent,
        commuting_nilpotent_implies_eta_nilpotent: !(all_nilpotent && all_commute) || eta_nilpotent.is_some(),
    }
}

/// The largest projection `q` with `η^{m−1}(q) = 0`, `m` the nilpotency index.
///
/// A positive `c` satisfies `η^{m−1}(c) = Σ V c V* = 0` (sum over length-`(m−1)`
/// Kraus products `V`) exactly when its range lies in `⋂ ker V = ker (η*)^{m−1}(1)`,
/// so `q` is the spectral projection of `(η*)^{m−1}(1)` onto its null space.
pub fn max_kernel_projection(eta: &KrausMap) -> Result<ComplexMatrix> {
    let n = eta.dim();
    let m = nilpotency_index(eta).ok_or(Error::NotNilpotent)?;
    if m == 1 {
        return Ok(ComplexMatrix::zeros(n));
    }
    let p = eta.apply_dual_power(m - 1, &ComplexMatrix::identity(n));
    let (vals, vecs) = p.hermitian_eigen();
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let zero_cut = 1e-10 * top.max(1e-300);
    let rank = vals.iter().filter(|v| **v <= zero_cut).count();
    let gap = vals.get(rank).copied().unwrap_or(top);
    // null eigenvalues must sit clearly apart from the rest
    if rank < n && gap < 1e-6 * top {
        return Err(Error::ProjectionUncertified {
            gap,
            candidate_rank: rank,
        });
    }
    let q = ComplexMatrix::from_fn(n, |i, j| {
        (0..rank).map(|k| vecs[(i, k)] * vecs[(j, k)].conj()).sum()
    });
    let image = eta.apply_power(m - 1, &q).max_abs();
    if image > 1e-9 * eta.apply_power(m - 1, &ComplexMatrix::identity(n)).max_abs().max(1.0) {
        return Err(Error::ProjectionUncertified {
            gap: image,
            candidate_rank: rank,
        });
    }
    Ok(q)
}

/// `tr_n(1 − q)` for a centered model with nilpotent variance.
pub fn predicted_atom_mass(model: &SemicircularModel) -> Result<f64> {
    if !model.is_centered() {
        return Err(Error::InvalidInput("predicted atom mass needs D = 0".into()));
    }
    let q = max_kernel_projection(model.variance())?;
    Ok(1.0 - q.normalized_trace().re)
}
