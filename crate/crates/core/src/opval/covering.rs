//! Realizing a finitely supported measure as a vector-state component of a
//! semicircular model, and the trace-state distribution as the average of all
//! components.

use num_complex::Complex64;
use serde::Serialize;

use super::matrix::ComplexMatrix;
use super::model::{model_from_jacobi, Orientation, SemicircularModel};
use super::solver::solve_cauchy;
use crate::atoms::atom_mass;
use crate::error::{Error, Result};
use crate::jacobi::JacobiCoefficients;
use crate::measure::DiscreteMeasure;

#[derive(Debug, Clone, Serialize)]
pub struct Covering {
    /// `μ_k`, the distribution of the forward model in the vector state `e_k`.
    pub components: Vec<DiscreteMeasure>,
    /// `(1/n) Σ_k μ_k`.
    pub mixture: DiscreteMeasure,
}

/// Component measures of the forward model built from exhausted coefficients.
///
/// The transform `⟨G(ξ·1_n)e_k, e_k⟩` of each component is a finite
/// continued fraction, so its atoms sit at the eigenvalues of the Jacobi
/// matrix of levels `k..n`; masses are read off the solver's transform by
/// boundary limits.
pub fn covering_decomposition(jc: &JacobiCoefficients) -> Result<Covering> {
    if !jc.exhausted() {
        return Err(Error::InvalidInput(
            "covering decomposition needs exhausted coefficients".into(),
        ));
    }
    let n = jc.levels();
    let model = model_from_jacobi(jc, n, Orientation::Forward)?;
    let mut components = Vec::with_capacity(n);
    for k in 1..=n {
        let candidates = jc.tail(k)?.nodes();
        let mut masses = Vec::with_capacity(candidates.len());
        for &r in &candidates {
            let rep = atom_mass(|z| vector_transform(&model, k, z), r)?;
            masses.push(rep.mass);
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::AtomExtraction(format!(
                "component {k} atoms carry mass {total}, expected 1"
            )));
        }
        components.push(DiscreteMeasure::normalized(candidates, masses)?);
    }
    let w = 1.0 / n as f64;
    let parts: Vec<(f64, &DiscreteMeasure)> = components.iter().map(|m| (w, m)).collect();
    let mixture = DiscreteMeasure::mixture(&parts)?;
    Ok(Covering { components, mixture })
}

fn vector_transform(model: &SemicircularModel, k: usize, xi: Complex64) -> Result<Complex64> {
    let g = solve_cauchy(model, &ComplexMatrix::scalar(model.dim(), xi))?;
    Ok(g[(k - 1, k - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::jacobi_from_discrete;
    use crate::measure::cauchy_exact;
    use crate::opval::{scalar_transform, State};

    fn close(a: &DiscreteMeasure, b: &DiscreteMeasure, tol: f64) -> bool {
        a.len() == b.len()
            && a.points().iter().zip(b.points()).all(|(x, y)| (x - y).abs() <= tol)
            && a.weights().iter().zip(b.weights()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn point_mass_covers_itself() {
        let mu = DiscreteMeasure::point_mass(1.5);
        let cov = covering_decomposition(&jacobi_from_discrete(&mu).unwrap()).unwrap();
        assert_eq!(cov.components.len(), 1);
        assert!(close(&cov.components[0], &mu, 1e-9));
        assert!(close(&cov.mixture, &mu, 1e-9));
    }

    #[test]
    fn bernoulli_components() {
        let mu = DiscreteMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let cov = covering_decomposition(&jacobi_from_discrete(&mu).unwrap()).unwrap();
        assert!(close(&cov.components[0], &mu, 1e-6));
        assert!(close(&cov.components[1], &DiscreteMeasure::point_mass(0.0), 1e-6));
        let expected = DiscreteMeasure::new(vec![-1.0, 0.0, 1.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert!(close(&cov.mixture, &expected, 1e-6));
    }

    #[test]
    fn mixture_matches_trace_state() {
        let mu = DiscreteMeasure::uniform(vec![-3.0, -1.0, 1.0, 3.0]).unwrap();
        let jc = jacobi_from_discrete(&mu).unwrap();
        let cov = covering_decomposition(&jc).unwrap();
        assert!(close(&cov.components[0], &mu, 1e-6));
        let model = model_from_jacobi(&jc, 4, Orientation::Forward).unwrap();
        for xi in [Complex64::new(0.3, 0.5), Complex64::new(-2.0, 1.0), Complex64::new(4.0, 0.1)] {
            let lhs = cauchy_exact(&cov.mixture, xi).unwrap();
            let rhs = scalar_transform(&model, State::Trace, xi).unwrap();
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn needs_exhausted_coefficients() {
        let jc = JacobiCoefficients::constant(0.0, 1.0, 3).unwrap();
        assert!(covering_decomposition(&jc).is_err());
    }
}
