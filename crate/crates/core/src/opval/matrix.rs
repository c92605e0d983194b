use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, ONE)
    }

    pub fn scalar(dim: usize, z: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// Matrix unit `e_pq` (0-based).
    pub fn unit(dim: usize, p: usize, q: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(p, q)] = ONE;
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix must be at least 1×1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        let m = ComplexMatrix { dim, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| Complex64::new(*x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr_n = trace/n`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.dim as f64
    }

    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `(A + A*)/2`.
    pub fn real_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `(A − A*)/(2i)`.
    pub fn imag_part(&self) -> Self {
        let half_over_i = Complex64::new(0.0, -0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half_over_i)
    }

    /// Largest entrywise distance from being hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..=i {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigen-decomposition of the hermitian part, eigenvalues ascending,
    /// eigenvectors as the matching columns.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.real_part().to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(self.dim, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    /// Eigenvalues of the hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .real_part()
            .to_nalgebra()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    /// Inverse by Gaussian elimination with partial pivoting.
    /// Warns when the 1-norm condition estimate exceeds 1e12.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self.solve(&Self::identity(self.dim))?;
        let cond = self.one_norm() * inv.one_norm();
        if cond > 1e12 {
            log::warn!("inverting a matrix with condition number ≈ {cond:.3e}");
        }
        Ok(inv)
    }

    /// Solves `A X = B` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<Self> {
        rhs.check_dim(self.dim)?;
        let n = self.dim;
        let mut a = self.data.clone();
        let mut x = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            let p = a[pivot * n + col];
            if p.norm() == 0.0 || !p.is_finite() {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    x.swap(pivot * n + k, col * n + k);
                }
            }
            let pinv = p.inv();
            for r in col + 1..n {
                let f = a[r * n + col] * pinv;
                if f == ZERO {
                    continue;
                }
                for k in col..n {
                    let t = a[col * n + k];
                    a[r * n + k] -= f * t;
                }
                for k in 0..n {
                    let t = x[col * n + k];
                    x[r * n + k] -= f * t;
                }
            }
        }
        for col in (0..n).rev() {
            let pinv = a[col * n + col].inv();
            for k in 0..n {
                let mut s = x[col * n + k];
                for j in col + 1..n {
                    s -= a[col * n + j] * x[j * n + k];
                }
                x[col * n + k] = s * pinv;
            }
        }
        let out = ComplexMatrix { dim: n, data: x };
        if !out.is_finite() {
            return Err(Error::SingularMatrix);
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// `[re, im]` pairs, as used in every JSON document.
pub(crate) fn to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub(crate) fn from_pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .data
            .chunks(self.dim)
            .map(|r| r.iter().copied().map(to_pair).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(from_pair).collect())
            .collect();
        ComplexMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
            ComplexMatrix::from_fn(n, |i, j| {
                let (re, im) = v[i * n + j];
                c(re, im)
            })
        })
    }

    #[test]
    fn small_inverse() {
        let a = ComplexMatrix::from_rows(vec![vec![c(0.0, 1.0), c(2.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let inv = a.inverse().unwrap();
        // det = −2, inverse = [[0, 2], [1, −i]]/2
        let expected =
            ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.5, 0.0), c(0.0, -0.5)]])
                .unwrap();
        assert!((&inv - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(a.inverse(), Err(Error::SingularMatrix)));
        assert!(matches!(ComplexMatrix::zeros(3).inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn parts_and_norms() {
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 2.0), c(0.0, 1.0)], vec![c(3.0, 0.0), c(-1.0, -1.0)]])
            .unwrap();
        let recombined = &a.real_part() + &a.imag_part().scale(c(0.0, 1.0));
        assert!((&recombined - &a).max_abs() < 1e-15);
        assert!(a.real_part().hermitian_defect() < 1e-15);
        assert!(a.imag_part().hermitian_defect() < 1e-15);
        let d = ComplexMatrix::diagonal(&[3.0, -4.0]);
        assert!((d.op_norm() - 4.0).abs() < 1e-12);
        assert!((d.frobenius_norm() - 5.0).abs() < 1e-12);
        assert_eq!(d.normalized_trace(), c(-0.5, 0.0));
    }

    #[test]
    fn hermitian_eigen_of_pauli_y() {
        let y = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap();
        let (vals, vecs) = y.hermitian_eigen();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let lam = ComplexMatrix::diagonal(&vals);
        let back = &(&vecs * &lam) * &vecs.adjoint();
        assert!((&back - &y).max_abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let a = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 2.0)], vec![c(0.0, 0.0), c(-1.5, 0.5)]])
            .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[0.0,2.0]],[[0.0,0.0],[-1.5,0.5]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0],[0,0]]]").is_err());
        assert!(serde_json::from_str::<ComplexMatrix>("[]").is_err());
    }

    proptest! {
        #[test]
        fn inverse_times_matrix_is_identity(a in arb_matrix(5)) {
            // shift away from singularity
            let a = &a + &ComplexMatrix::scalar(5, c(0.0, 12.0));
            let inv = a.inverse().unwrap();
            let err = (&(&a * &inv) - &ComplexMatrix::identity(5)).max_abs();
            prop_assert!(err < 1e-12);
        }

        #[test]
        fn adjoint_reverses_products(a in arb_matrix(4), b in arb_matrix(4)) {
            let lhs = (&a * &b).adjoint();
            let rhs = &b.adjoint() * &a.adjoint();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }
}
