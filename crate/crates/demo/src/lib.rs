//! Browser bindings for a few opfree computations. The plain functions in
//! [`ops`] do the work and are usable natively; the exported wrappers only
//! translate errors into JS exceptions.

use wasm_bindgen::prelude::*;

pub mod ops {
    use opfree_core::atoms::{atom_mass, predicted_atom_mass};
    use opfree_core::cauchy_cf::{cf_eval, grid, stieltjes_density};
    use opfree_core::closed_form;
    use opfree_core::opval::{scalar_transform, SemicircularModel, State};
    use opfree_core::verify::offdiagonal_model;
    use opfree_core::JacobiCoefficients;

    fn err(e: opfree_core::Error) -> String {
        e.to_string()
    }

    /// Trace-state density of the centered model with operator `[[0, α], [β, 0]]`.
    pub fn offdiagonal_density(
        alpha: f64,
        beta: f64,
        xmin: f64,
        xmax: f64,
        steps: usize,
        epsilon: f64,
    ) -> Result<Vec<f64>, String> {
        let model = offdiagonal_model(alpha, beta);
        let xs = grid(xmin, xmax, steps).map_err(err)?;
        let d = stieltjes_density(|z| scalar_transform(&model, State::Trace, z), &xs, epsilon).map_err(err)?;
        Ok(d.densities)
    }

    /// Density of the semicircle continued fraction cut after `levels` levels,
    /// followed by the exact semicircle density on the same grid.
    pub fn truncated_semicircle(
        levels: usize,
        xmin: f64,
        xmax: f64,
        steps: usize,
        epsilon: f64,
    ) -> Result<Vec<f64>, String> {
        let jc = JacobiCoefficients::constant(0.0, 1.0, levels).map_err(err)?;
        let xs = grid(xmin, xmax, steps).map_err(err)?;
        let mut out = stieltjes_density(|z| cf_eval(&jc, z, levels), &xs, epsilon)
            .map_err(err)?
            .densities;
        out.extend(xs.iter().map(|&x| closed_form::semicircle_density(x, 1.0)));
        Ok(out)
    }

    /// Atom report at `r` for a model given as JSON, with the nilpotent-variance
    /// lower bound when it applies.
    pub fn atom_report(model_json: &str, r: f64) -> Result<String, String> {
        let model = SemicircularModel::from_json(model_json).map_err(err)?;
        let rep = atom_mass(|z| scalar_transform(&model, State::Trace, z), r).map_err(err)?;
        let bound = if r == 0.0 && model.is_centered() {
            predicted_atom_mass(&model).ok()
        } else {
            None
        };
        let v = serde_json::json!({
            "location": rep.location,
            "mass": rep.mass,
            "truncated": rep.truncated,
            "nilpotent_lower_bound": bound,
        });
        Ok(v.to_string())
    }
}

#[wasm_bindgen]
pub fn offdiagonal_density(
    alpha: f64,
    beta: f64,
    xmin: f64,
    xmax: f64,
    steps: usize,
    epsilon: f64,
) -> Result<Vec<f64>, JsError> {
    ops::offdiagonal_density(alpha, beta, xmin, xmax, steps, epsilon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn truncated_semicircle(
    levels: usize,
    xmin: f64,
    xmax: f64,
    steps: usize,
    epsilon: f64,
) -> Result<Vec<f64>, JsError> {
    ops::truncated_semicircle(levels, xmin, xmax, steps, epsilon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn atom_report(model_json: &str, r: f64) -> Result<String, JsError> {
    ops::atom_report(model_json, r).map_err(|e| JsError::new(&e))
}
