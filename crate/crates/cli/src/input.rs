use std::path::Path;

use num_complex::Complex64;
use opfree_core::measure::{Measure, MeasureSpec};
use opfree_core::opval::{ModelSpec, SemicircularModel};
use opfree_core::JacobiCoefficients;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Anything that has a scalar Cauchy transform.
pub enum Source {
    Measure(Measure),
    Jacobi(JacobiCoefficients),
    Model(SemicircularModel),
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Measure(_) => "measure",
            Source::Jacobi(_) => "jacobi",
            Source::Model(_) => "model",
        }
    }
}

pub fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
                .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_value(text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("json: {e}")))
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{what}: {e}")))
}

/// Tells measure, jacobi and model documents apart by their keys.
pub fn classify(v: Value) -> Result<Source, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Input("expected a JSON object".into()))?;
    if obj.contains_key("type") {
        let spec: MeasureSpec = from_value(v, "measure")?;
        Ok(Source::Measure(spec.into_measure()?))
    } else if obj.contains_key("alphas") {
        Ok(Source::Jacobi(from_value(v, "jacobi")?))
    } else if obj.contains_key("dim") {
        let spec: ModelSpec = from_value(v, "model")?;
        Ok(Source::Model(spec.into_model()?))
    } else {
        Err(CliError::Input(
            "unrecognised document: expected a measure (\"type\"), jacobi (\"alphas\") or model (\"dim\")".into(),
        ))
    }
}

pub fn source(text: &str) -> Result<Source, CliError> {
    classify(parse_value(text)?)
}

pub fn measure(text: &str) -> Result<Measure, CliError> {
    let spec: MeasureSpec = from_value(parse_value(text)?, "measure")?;
    Ok(spec.into_measure()?)
}

pub fn model(text: &str) -> Result<SemicircularModel, CliError> {
    let spec: ModelSpec = from_value(parse_value(text)?, "model")?;
    Ok(spec.into_model()?)
}

/// `{"jacobi"|"model": {...}, "points": [[re, im], ...]}`.
pub fn with_points(text: &str, key: &str) -> Result<(Value, Vec<Complex64>), CliError> {
    let mut v = parse_value(text)?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| CliError::Input("expected a JSON object".into()))?;
    let inner = obj
        .remove(key)
        .ok_or_else(|| CliError::Input(format!("missing \"{key}\"")))?;
    let points: Vec<[f64; 2]> = from_value(
        obj.remove("points")
            .ok_or_else(|| CliError::Input("missing \"points\"".into()))?,
        "points",
    )?;
    if let Some(extra) = obj.keys().next() {
        return Err(CliError::Input(format!("unknown field \"{extra}\"")));
    }
    let points = points.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
    Ok((inner, points))
}

pub fn jacobi_value(v: Value) -> Result<JacobiCoefficients, CliError> {
    from_value(v, "jacobi")
}

pub fn model_value(v: Value) -> Result<SemicircularModel, CliError> {
    let spec: ModelSpec = from_value(v, "model")?;
    Ok(spec.into_model()?)
}

/// `--at` list: comma separated reals.
pub fn locations(arg: &str) -> Result<Vec<f64>, CliError> {
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Input(format!("--at: not a finite number: {s:?}")))
        })
        .collect()
}
