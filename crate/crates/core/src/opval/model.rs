use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kraus::KrausMap;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::jacobi::JacobiCoefficients;

/// Matrix-valued semicircular element over `M_n(ℂ)`: hermitian mean `D` and variance `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemicircularModel {
    mean: ComplexMatrix,
    variance: KrausMap,
}

impl SemicircularModel {
    pub fn new(mean: ComplexMatrix, variance: KrausMap) -> Result<Self> {
        mean.check_dim(variance.dim())?;
        let defect = mean.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "mean must be hermitian (defect {defect:e})"
            )));
        }
        Ok(SemicircularModel { mean, variance })
    }

    /// `D = 0` with a single Kraus operator.
    pub fn centered(op: ComplexMatrix) -> Self {
        let n = op.dim();
        SemicircularModel {
            mean: ComplexMatrix::zeros(n),
            variance: KrausMap::single(op),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    pub fn mean(&self) -> &ComplexMatrix {
        &self.mean
    }

    pub fn variance(&self) -> &KrausMap {
        &self.variance
    }

    pub fn is_centered(&self) -> bool {
        self.mean.max_abs() == 0.0
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<ModelSpec>(s)?.into_model()
    }

    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            dim: self.dim(),
            mean: self.mean.clone(),
            kraus: self.variance.ops().to_vec(),
        }
    }
}

/// JSON form `{"dim":n,"mean":[[...]],"kraus":[[[...]],...]}`, entries `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dim: usize,
    pub mean: ComplexMatrix,
    pub kraus: Vec<ComplexMatrix>,
}

impl ModelSpec {
    pub fn into_model(self) -> Result<SemicircularModel> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("dim must be positive".into()));
        }
        self.mean.check_dim(self.dim)?;
        for k in &self.kraus {
            k.check_dim(self.dim)?;
        }
        SemicircularModel::new(self.mean, KrausMap::new(self.kraus)?)
    }
}

/// A state on `M_n(ℂ)`: the normalized trace, or `T ↦ ⟨T e_k, e_k⟩` with 1-based `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Trace,
    Vector(usize),
}

impl State {
    pub fn apply(&self, t: &ComplexMatrix) -> Result<Complex64> {
        match *self {
            State::Trace => Ok(t.normalized_trace()),
            State::Vector(k) => {
                if k == 0 || k > t.dim() {
                    Err(Error::InvalidInput(format!(
                        "vector state index {k} outside 1..={}",
                        t.dim()
                    )))
                } else {
                    Ok(t[(k - 1, k - 1)])
                }
            }
        }
    }
}

/// Which of the two finite constructions to build from Jacobi coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `D = diag(α_1..α_n)`, Kraus operator with `W[k][k+1] = √ω_k`.
    Forward,
    /// `D = diag(α_n..α_1)`, Kraus operator with `L[k][k−1] = √ω_{n+1−k}`.
    Reversed,
}

/// The `n`-dimensional model whose diagonal transform entries are tail
/// fractions of `jc`; entry `e_1` (forward) or `e_n` (reversed) carries the
/// `n`-th convergent.
pub fn model_from_jacobi(
    jc: &JacobiCoefficients,
    n: usize,
    orientation: Orientation,
) -> Result<SemicircularModel> {
    if n == 0 {
        return Err(Error::InvalidInput("model dimension must be positive".into()));
    }
    if jc.levels() < n {
        return Err(Error::InsufficientCoefficients {
            needed: n,
            available: jc.levels(),
        });
    }
    let alphas = &jc.alphas()[..n];
    let omegas = &jc.omegas()[..n - 1];
    let mut w = ComplexMatrix::zeros(n);
    let d = match orientation {
        Orientation::Forward => {
            for i in 0..n - 1 {
                w[(i, i + 1)] = Complex64::new(omegas[i].sqrt(), 0.0);
            }
            alphas.to_vec()
        }
        Orientation::Reversed => {
            for i in 1..n {
                w[(i, i - 1)] = Complex64::new(omegas[n - 1 - i].sqrt(), 0.0);
            }
            alphas.iter().rev().copied().collect()
        }
    };
    SemicircularModel::new(ComplexMatrix::diagonal(&d), KrausMap::single(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_model() {
        let jc = JacobiCoefficients::new(vec![0.7], vec![], true).unwrap();
        let m = model_from_jacobi(&jc, 1, Orientation::Forward).unwrap();
        assert_eq!(m.mean(), &ComplexMatrix::diagonal(&[0.7]));
        assert_eq!(m.variance().ops()[0], ComplexMatrix::zeros(1));
    }

    #[test]
    fn bernoulli_gives_corner_shift() {
        let jc = JacobiCoefficients::new(vec![0.0, 0.0], vec![1.0], true).unwrap();
        let m = model_from_jacobi(&jc, 2, Orientation::Forward).unwrap();
        assert_eq!(m.mean(), &ComplexMatrix::zeros(2));
        assert_eq!(m.variance().ops()[0], ComplexMatrix::unit(2, 0, 1));
    }

    #[test]
    fn shift_weights() {
        let jc = JacobiCoefficients::new(vec![1.0, 2.0, 3.0], vec![4.0, 9.0], true).unwrap();
        let f = model_from_jacobi(&jc, 3, Orientation::Forward).unwrap();
        let w = &f.variance().ops()[0];
        assert_eq!(w[(0, 1)].re, 2.0);
        assert_eq!(w[(1, 2)].re, 3.0);
        assert_eq!(f.mean(), &ComplexMatrix::diagonal(&[1.0, 2.0, 3.0]));
        let r = model_from_jacobi(&jc, 3, Orientation::Reversed).unwrap();
        let l = &r.variance().ops()[0];
        assert_eq!(l[(1, 0)].re, 3.0);
        assert_eq!(l[(2, 1)].re, 2.0);
        assert_eq!(r.mean(), &ComplexMatrix::diagonal(&[3.0, 2.0, 1.0]));
        assert!(matches!(
            model_from_jacobi(&jc, 4, Orientation::Forward),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"dim":2,"mean":[[[0,0],[0,0]],[[0,0],[0,0]]],"kraus":[[[[0,0],[1,0]],[[0,0],[0,0]]]]}"#;
        let m = SemicircularModel::from_json(s).unwrap();
        assert_eq!(m.variance().ops()[0], ComplexMatrix::unit(2, 0, 1));
        let back = serde_json::to_string(&m.to_spec()).unwrap();
        assert_eq!(SemicircularModel::from_json(&back).unwrap(), m);
    }

    #[test]
    fn json_rejections() {
        let extra = r#"{"dim":1,"mean":[[[0,0]]],"kraus":[[[[0,0]]]],"note":1}"#;
        assert!(SemicircularModel::from_json(extra).is_err());
        let wrong_dim = r#"{"dim":2,"mean":[[[0,0]]],"kraus":[[[[0,0]]]]}"#;
        assert!(matches!(
            SemicircularModel::from_json(wrong_dim),
            Err(Error::DimensionMismatch { .. })
        ));
        let not_hermitian = r#"{"dim":2,"mean":[[[0,0],[1,0]],[[0,0],[0,0]]],"kraus":[[[[0,0],[0,0]],[[0,0],[0,0]]]]}"#;
        assert!(SemicircularModel::from_json(not_hermitian).is_err());
        let no_kraus = r#"{"dim":1,"mean":[[[0,0]]],"kraus":[]}"#;
        assert!(SemicircularModel::from_json(no_kraus).is_err());
    }

    #[test]
    fn states() {
        let t = ComplexMatrix::diagonal(&[1.0, 2.0, 6.0]);
        assert_eq!(State::Trace.apply(&t).unwrap().re, 3.0);
        assert_eq!(State::Vector(3).apply(&t).unwrap().re, 6.0);
        assert!(State::Vector(0).apply(&t).is_err());
        assert!(State::Vector(4).apply(&t).is_err());
    }
}
