use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Completely positive map `η(a) = Σ_j a_j a a_j*` in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = ops
            .first()
            .ok_or_else(|| Error::InvalidInput("a Kraus map needs at least one operator".into()))?
            .dim();
        for op in &ops {
            op.check_dim(dim)?;
            if !op.is_finite() {
                return Err(Error::InvalidInput("Kraus operators must be finite".into()));
            }
        }
        Ok(KrausMap { dim, ops })
    }

    pub fn single(op: ComplexMatrix) -> Self {
        KrausMap {
            dim: op.dim(),
            ops: vec![op],
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::single(ComplexMatrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `Σ_j a_j a a_j*`.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.ops {
            out = &out + &(&(k * a) * &k.adjoint());
        }
        out
    }

    /// The Hilbert–Schmidt adjoint `Σ_j a_j* a a_j`.
    pub fn apply_dual(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.ops {
            out = &out + &(&(&k.adjoint() * a) * k);
        }
        out
    }

    /// `η^m(a)` by repeated application.
    pub fn apply_power(&self, m: usize, a: &ComplexMatrix) -> ComplexMatrix {
        (0..m).fold(a.clone(), |x, _| self.apply(&x))
    }

    /// `(η*)^m(a)` by repeated application.
    pub fn apply_dual_power(&self, m: usize, a: &ComplexMatrix) -> ComplexMatrix {
        (0..m).fold(a.clone(), |x, _| self.apply_dual(&x))
    }

    /// Matrix of `η` acting on row-major `vec(a)`; column `p·n + q` is `vec(η(e_pq))`.
    pub fn superoperator(&self) -> DMatrix<Complex64> {
        let n = self.dim;
        let mut s = DMatrix::zeros(n * n, n * n);
        for p in 0..n {
            for q in 0..n {
                let image = self.apply(&ComplexMatrix::unit(n, p, q));
                for (r, z) in image.as_slice().iter().enumerate() {
                    s[(r, p * n + q)] = *z;
                }
            }
        }
        s
    }
}

/// `η(a)` with a dimension check.
pub fn cp_apply(eta: &KrausMap, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_dim(eta.dim())?;
    Ok(eta.apply(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_kraus() {
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 2.0), c(3.0, 0.0)], vec![c(0.0, -1.0), c(4.0, 4.0)]])
            .unwrap();
        let eta = KrausMap::single(ComplexMatrix::identity(2));
        assert_eq!(cp_apply(&eta, &a).unwrap(), a);
    }

    #[test]
    fn upper_shift_moves_corner() {
        let (z, v, y, w) = (c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0), c(5.0, -2.0));
        let a = ComplexMatrix::from_rows(vec![vec![z, v], vec![y, w]]).unwrap();
        let eta = KrausMap::single(ComplexMatrix::unit(2, 0, 1));
        let out = cp_apply(&eta, &a).unwrap();
        let expected = ComplexMatrix::from_rows(vec![vec![w, c(0.0, 0.0)], vec![c(0.0, 0.0); 2]]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn zero_map_and_errors() {
        let eta = KrausMap::zero(3);
        let a = ComplexMatrix::identity(3);
        assert_eq!(cp_apply(&eta, &a).unwrap(), ComplexMatrix::zeros(3));
        assert!(matches!(
            cp_apply(&eta, &ComplexMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(KrausMap::new(vec![]).is_err());
        assert!(KrausMap::new(vec![ComplexMatrix::zeros(2), ComplexMatrix::zeros(3)]).is_err());
    }

    #[test]
    fn zero_padding_is_ignored() {
        let op = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[1.0, 0.0]]).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 3.0]]).unwrap();
        let mut padded = vec![op.clone()];
        padded.extend(std::iter::repeat(ComplexMatrix::zeros(2)).take(3));
        let padded = KrausMap::new(padded).unwrap();
        assert_eq!(padded.apply(&a), KrausMap::single(op).apply(&a));
    }

    #[test]
    fn superoperator_matches_apply() {
        let op = ComplexMatrix::from_rows(vec![vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let eta = KrausMap::single(op);
        let s = eta.superoperator();
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(0.0, 1.0), c(3.0, 0.0)]])
            .unwrap();
        let v = nalgebra::DVector::from_column_slice(a.as_slice());
        let image = &s * v;
        let direct = eta.apply(&a);
        for (x, y) in image.iter().zip(direct.as_slice()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn dual_is_hilbert_schmidt_adjoint() {
        let op = ComplexMatrix::from_rows(vec![vec![c(0.3, 1.0), c(1.0, 0.0)], vec![c(0.5, -2.0), c(0.1, 0.0)]])
            .unwrap();
        let eta = KrausMap::single(op);
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, -1.0]]).unwrap();
        let b = ComplexMatrix::from_rows(vec![vec![c(0.0, 1.0), c(1.0, 1.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        // ⟨η(a), b⟩ = ⟨a, η*(b)⟩ with ⟨x, y⟩ = tr(x* y)
        let lhs = (&eta.apply(&a).adjoint() * &b).trace();
        let rhs = (&a.adjoint() * &eta.apply_dual(&b)).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    fn arb_kraus(n: usize) -> impl Strategy<Value = KrausMap> {
        prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n), 1..4).prop_map(
            move |ops| {
                KrausMap::new(
                    ops.into_iter()
                        .map(|v| ComplexMatrix::from_fn(n, |i, j| c(v[i * n + j].0, v[i * n + j].1)))
                        .collect(),
                )
                .unwrap()
            },
        )
    }

    fn arb_square(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| ComplexMatrix::from_fn(n, |i, j| c(v[i * n + j].0, v[i * n + j].1)))
    }

    proptest! {
        #[test]
        fn preserves_hermitian(eta in arb_kraus(3), x in arb_square(3)) {
            let h = x.real_part();
            prop_assert!(eta.apply(&h).hermitian_defect() < 1e-12);
        }

        #[test]
        fn preserves_positivity(eta in arb_kraus(3), x in arb_square(3)) {
            let p = &x * &x.adjoint();
            let min = eta.apply(&p).hermitian_eigenvalues()[0];
            prop_assert!(min >= -1e-9);
        }

        #[test]
        fn power_composes(eta in arb_kraus(2), x in arb_square(2)) {
            let twice = eta.apply(&eta.apply(&x));
            prop_assert!((&eta.apply_power(2, &x) - &twice).max_abs() < 1e-12);
            prop_assert_eq!(eta.apply_power(0, &x), x);
        }
    }
}
