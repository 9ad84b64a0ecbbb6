//! Fitted model sets as JSON sidecars.

use std::collections::BTreeMap;

use ratprog_core::pipeline::{MetricModel, MetricModelSet};
use ratprog_core::polyfit::basis::grid;
use ratprog_core::polyfit::{FitReport, Polynomial, RationalFunction};
use ratprog_core::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODELS_FORMAT: &str = "ratprog-models/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsFile {
    num: Vec<u32>,
    den: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    residual_norm: f64,
    numerical_rank: usize,
    truncated: bool,
    singular_values: Vec<f64>,
    holdout_relative_error: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    variables: Vec<String>,
    bounds: BoundsFile,
    num_coeffs: Vec<String>,
    den_coeffs: Vec<String>,
    report: ReportFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    format: String,
    param_names: Vec<String>,
    variables: Vec<String>,
    constants: BTreeMap<String, f64>,
    failures: BTreeMap<String, String>,
    models: BTreeMap<String, ModelFile>,
}

/// Per-variable exponent caps and the coefficients on `grid(caps)`, as
/// rational literals.
fn poly_file(p: &Polynomial) -> (Vec<u32>, Vec<String>) {
    let mut caps = vec![0; p.variables.len()];
    for e in &p.basis {
        for (c, &k) in caps.iter_mut().zip(e) {
            *c = (*c).max(k);
        }
    }
    let coeffs = grid(&caps)
        .iter()
        .map(|e| {
            let c = p.basis.iter().position(|b| b == e).map_or(0.0, |k| p.coefficients[k]);
            Rational::from_f64(c).expect("fitted coefficients are finite").to_string()
        })
        .collect();
    (caps, coeffs)
}

pub fn write_models(set: &MetricModelSet) -> String {
    let file = SetFile {
        format: MODELS_FORMAT.into(),
        param_names: set.param_names.clone(),
        variables: set.variables.clone(),
        constants: set.constants.clone(),
        failures: set.failures.clone(),
        models: set
            .models
            .iter()
            .map(|(name, m)| {
                let r = &m.report;
                let (num_caps, num_coeffs) = poly_file(&m.function.num);
                let (den_caps, den_coeffs) = poly_file(&m.function.den);
                let model = ModelFile {
                    variables: set.variables.clone(),
                    bounds: BoundsFile {
                        num: num_caps,
                        den: den_caps,
                    },
                    num_coeffs,
                    den_coeffs,
                    report: ReportFile {
                        residual_norm: r.residual_norm,
                        numerical_rank: r.numerical_rank,
                        truncated: r.truncated,
                        singular_values: r.singular_values.clone(),
                        holdout_relative_error: r.holdout_relative_error,
                    },
                };
                (name.clone(), model)
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model set serializes");
    text.push('\n');
    text
}

pub fn parse_models(text: &str, origin: &str) -> Result<MetricModelSet> {
    let file: SetFile = serde_json::from_str(text).map_err(|e| Error::data(origin, e))?;
    let bad = |m: String| Error::data(origin, m);
    if file.format != MODELS_FORMAT {
        return Err(bad(format!("format `{}`, expected `{MODELS_FORMAT}`", file.format)));
    }
    if !file.variables.starts_with(&file.param_names) {
        return Err(bad("variables must start with the data parameters".into()));
    }
    let poly = |name: &str, side: &str, caps: &[u32], coeffs: &[String]| {
        let values = coeffs
            .iter()
            .map(|c| {
                c.parse::<Rational>()
                    .map(|r| r.to_f64())
                    .map_err(|e| bad(format!("model `{name}`: {side} coefficient `{c}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Polynomial::on_grid(file.variables.clone(), caps, values).ok_or_else(|| {
            bad(format!("model `{name}`: {side} bounds do not match the variables and coefficient count"))
        })
    };
    let mut models = BTreeMap::new();
    for (name, m) in file.models {
        if m.variables != file.variables {
            return Err(bad(format!("model `{name}`: variables differ from the set")));
        }
        let num = poly(&name, "numerator", &m.bounds.num, &m.num_coeffs)?;
        let den = poly(&name, "denominator", &m.bounds.den, &m.den_coeffs)?;
        let function = RationalFunction::new(num, den).map_err(|e| bad(format!("model `{name}`: {e}")))?;
        let r = m.report;
        let report = FitReport {
            residual_norm: r.residual_norm,
            numerical_rank: r.numerical_rank,
            singular_values: r.singular_values,
            truncated: r.truncated,
            holdout_relative_error: r.holdout_relative_error,
        };
        models.insert(name, MetricModel { function, report });
    }
    Ok(MetricModelSet {
        param_names: file.param_names,
        variables: file.variables,
        models,
        constants: file.constants,
        failures: file.failures,
    })
}
