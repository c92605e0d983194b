//! Compactly supported probability measures on the real line.
//!
//! Finitely supported measures are stored exactly as points and weights.
//! Anything else enters the library as a truncated moment sequence together
//! with a bound on its support.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which two support points are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A probability measure with finite support.
///
/// Points are strictly increasing and every weight is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from atoms. Points are sorted and atoms closer than
    /// `1e-12·R` are merged; the weights must already sum to one.
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let (points, weights) = Self::canonicalize(points, weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { points, weights })
    }

    /// Like [`DiscreteMeasure::new`] but rescales the weights to total mass one.
    pub fn normalized(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let (points, mut weights) = Self::canonicalize(points, weights)?;
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { points, weights })
    }

    pub fn point_mass(location: f64) -> Self {
        Self {
            points: vec![location],
            weights: vec![1.0],
        }
    }

    /// Equal weights on the given points.
    pub fn uniform(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        Self::normalized(points, vec![1.0; n])
    }

    fn canonicalize(points: Vec<f64>, weights: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("no support points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite point {p}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "weights must be finite and strictly positive, got {w}"
            )));
        }

        let mut atoms: Vec<(f64, f64)> = points.into_iter().zip(weights).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let radius = atoms
            .iter()
            .map(|(p, _)| p.abs())
            .fold(0.0_f64, f64::max);
        let merge = MERGE_TOLERANCE * radius;

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match merged.last_mut() {
                Some(last) if p - last.0 <= merge => {
                    // keep the heavier location
                    if w > last.1 {
                        last.0 = p;
                    }
                    last.1 += w;
                }
                _ => merged.push((p, w)),
            }
        }
        Ok(merged.into_iter().unzip())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sup |t|` over the support.
    pub fn support_radius(&self) -> f64 {
        self.points.iter().map(|p| p.abs()).fold(0.0, f64::max)
    }

    /// Weight of the atom at `location`, or zero.
    pub fn mass_at(&self, location: f64) -> f64 {
        let tol = MERGE_TOLERANCE * self.support_radius().max(1.0);
        self.points
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| (**p - location).abs() <= tol)
            .map(|(_, w)| *w)
            .sum()
    }

    /// Moments `M_0..=M_order`.
    pub fn moments(&self, order: usize) -> Vec<f64> {
        (0..=order).map(|m| moments_of(self, m)).collect()
    }

    /// `∫ |t|^m dμ`, the cancellation-free scale of the m-th moment.
    pub fn absolute_moment(&self, order: usize) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * p.abs().powi(order as i32))
            .sum()
    }

    /// Convex combination of measures.
    pub fn mixture(parts: &[(f64, &DiscreteMeasure)]) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (c, mu) in parts {
            if *c <= 0.0 {
                continue;
            }
            points.extend_from_slice(&mu.points);
            weights.extend(mu.weights.iter().map(|w| c * w));
        }
        Self::normalized(points, weights)
    }
}

/// The `order`-th moment `Σ w_k t_k^order`.
pub fn moments_of(measure: &DiscreteMeasure, order: usize) -> f64 {
    measure
        .points
        .iter()
        .zip(&measure.weights)
        .map(|(p, w)| w * p.powi(order as i32))
        .sum()
}

/// Cauchy transform `G(ξ) = Σ w_k / (ξ − t_k)` of a discrete measure.
pub fn cauchy_exact(measure: &DiscreteMeasure, xi: Complex64) -> Result<Complex64> {
    if !(xi.re.is_finite() && xi.im.is_finite()) || xi.im == 0.0 {
        return Err(Error::Domain(format!(
            "Cauchy transform needs Im ξ ≠ 0, got {xi}"
        )));
    }
    Ok(measure
        .points
        .iter()
        .zip(&measure.weights)
        .map(|(p, w)| Complex64::from(*w) / (xi - p))
        .sum())
}

/// A truncated moment sequence `M_0..M_K` of a measure supported in `[-R, R]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    moments: Vec<f64>,
    support_bound: f64,
}

impl MomentSequence {
    pub fn new(moments: Vec<f64>, support_bound: f64) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::InvalidMeasure("empty moment sequence".into()));
        }
        if moments[0] != 1.0 {
            return Err(Error::InvalidMeasure(format!(
                "M_0 must be exactly 1, got {}",
                moments[0]
            )));
        }
        if !(support_bound.is_finite() && support_bound > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "support bound must be positive, got {support_bound}"
            )));
        }
        if let Some(m) = moments.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite moment {m}")));
        }
        for (m, value) in moments.iter().enumerate() {
            let bound = support_bound.powi(m as i32);
            if value.abs() > bound * (1.0 + 1e-9) {
                return Err(Error::InvalidMeasure(format!(
                    "|M_{m}| = {} exceeds R^{m} = {bound}",
                    value.abs()
                )));
            }
        }
        let seq = Self {
            moments,
            support_bound,
        };
        if let Some(level) = seq.hankel_violation() {
            return Err(Error::HankelIndefinite { level });
        }
        Ok(seq)
    }

    pub fn from_measure(measure: &DiscreteMeasure, order: usize) -> Self {
        Self {
            moments: measure.moments(order),
            support_bound: measure.support_radius().max(f64::MIN_POSITIVE),
        }
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    pub fn support_bound(&self) -> f64 {
        self.support_bound
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// Smallest Hankel size whose (scaled) matrix has an eigenvalue below `-1e-9`.
    fn hankel_violation(&self) -> Option<usize> {
        let r = self.support_bound;
        let scaled: Vec<f64> = self
            .moments
            .iter()
            .enumerate()
            .map(|(m, v)| v / r.powi(m as i32))
            .collect();
        let max_size = (scaled.len() - 1) / 2 + 1;
        (1..=max_size).find(|&size| {
            let h = DMatrix::from_fn(size, size, |i, j| scaled[i + j]);
            SymmetricEigen::new(h).eigenvalues.min() < -1e-9
        })
    }
}

/// JSON presentation of a measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Discrete {
        points: Vec<f64>,
        weights: Vec<f64>,
    },
    Moments {
        moments: Vec<f64>,
        support_bound: f64,
    },
}

/// A validated measure.
#[derive(Debug, Clone)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Moments(MomentSequence),
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn into_measure(self) -> Result<Measure> {
        match self {
            MeasureSpec::Discrete { points, weights } => {
                DiscreteMeasure::new(points, weights).map(Measure::Discrete)
            }
            MeasureSpec::Moments {
                moments,
                support_bound,
            } => MomentSequence::new(moments, support_bound).map(Measure::Moments),
        }
    }
}

impl From<&DiscreteMeasure> for MeasureSpec {
    fn from(mu: &DiscreteMeasure) -> Self {
        MeasureSpec::Discrete {
            points: mu.points.clone(),
            weights: mu.weights.clone(),
        }
    }
}
