use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::PipelineError;
use crate::datakit::SampleSet;
use crate::perfmodel::{MetricFunctions, MetricSource, CONFIG_INPUTS};
use crate::polyfit::{fit_rational, DegreeBounds, FitData, FitReport, Polynomial, RationalFunction, DEFAULT_RANK_TOL};
use crate::Rational;

pub const DEFAULT_NUM_DEGREE: u32 = 2;
pub const DEFAULT_DEN_DEGREE: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricModel {
    pub function: RationalFunction,
    pub report: FitReport,
}

/// Fitted metric functions over one shared variable order, plus declared
/// constants and the metrics that could not be fitted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricModelSet {
    pub param_names: Vec<String>,
    /// Data parameters followed by `bx`, `by` and, when used, `bz`.
    pub variables: Vec<String>,
    pub models: BTreeMap<String, MetricModel>,
    /// Declared constants. They take precedence over fitted models.
    pub constants: BTreeMap<String, f64>,
    pub failures: BTreeMap<String, String>,
}

impl MetricModelSet {
    pub fn is_empty(&self) -> bool {
        self.models.is_empty() && self.constants.is_empty()
    }

    pub fn source(&self, metric: &str) -> Option<MetricSource> {
        if let Some(&c) = self.constants.get(metric) {
            return Rational::from_f64(c).map(MetricSource::Constant);
        }
        self.models
            .get(metric)
            .map(|m| MetricSource::Fitted(m.function.clone()))
    }

    /// The metrics the cycle model reads, each from a constant or a model.
    pub fn metric_functions(&self) -> Result<MetricFunctions, PipelineError> {
        if self.is_empty() {
            return Err(PipelineError::EmptyModelSet);
        }
        let mut missing = None;
        let out = MetricFunctions::from_lookup(|name| {
            let s = self.source(name);
            if s.is_none() && missing.is_none() {
                missing = Some(name);
            }
            s
        });
        match (out, missing) {
            (Ok(f), _) => Ok(f),
            (Err(_), Some(name)) => Err(PipelineError::MissingMetric(name.into())),
            (Err(e), None) => Err(e.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    /// Per-metric bounds over [`MetricModelSet::variables`].
    pub bounds: BTreeMap<String, DegreeBounds>,
    /// Caps used on every variable of metrics without explicit bounds.
    pub default_num: u32,
    pub default_den: u32,
    pub rank_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            bounds: BTreeMap::new(),
            default_num: DEFAULT_NUM_DEGREE,
            default_den: DEFAULT_DEN_DEGREE,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

fn fit_variables(samples: &SampleSet) -> Vec<String> {
    let mut vars = samples.param_names().to_vec();
    let dims = if samples.uses_bz() { 3 } else { 2 };
    vars.extend(CONFIG_INPUTS[..dims].iter().map(|s| s.to_string()));
    vars
}

fn constant_model(variables: &[String], value: f64, samples: usize) -> MetricModel {
    MetricModel {
        function: RationalFunction::from_polynomial(Polynomial::constant(variables.to_vec(), value)),
        report: FitReport {
            residual_norm: 0.0,
            numerical_rank: usize::from(samples > 0),
            singular_values: Vec::new(),
            truncated: false,
            holdout_relative_error: None,
        },
    }
}

/// Fits one rational function per metric column. Columns with a single
/// value get a degree-0 model; fitting failures are recorded per metric.
pub fn fit_all_metrics(samples: &SampleSet, options: &FitOptions) -> Result<MetricModelSet, PipelineError> {
    if samples.is_empty() {
        return Err(PipelineError::NoSamples);
    }
    let variables = fit_variables(samples);
    let points: Vec<Vec<f64>> = samples
        .samples()
        .iter()
        .map(|s| {
            let mut p: Vec<f64> = s.data_params.iter().map(|&d| d as f64).collect();
            p.extend([s.config.bx, s.config.by, s.config.bz][..variables.len() - p.len()].iter().map(|&c| c as f64));
            p
        })
        .collect();

    let mut set = MetricModelSet {
        param_names: samples.param_names().to_vec(),
        variables: variables.clone(),
        ..MetricModelSet::default()
    };
    for (k, metric) in samples.metric_names().iter().enumerate() {
        let values: Vec<f64> = samples.samples().iter().map(|s| s.values[k]).collect();
        let first = values[0];
        if values.iter().all(|&v| v == first) {
            set.models
                .insert(metric.clone(), constant_model(&variables, first, values.len()));
            continue;
        }
        let bounds = match options.bounds.get(metric) {
            Some(b) if b.num_vars() != variables.len() => {
                return Err(PipelineError::BoundsMismatch {
                    metric: metric.clone(),
                    expected: variables.len(),
                    found: b.num_vars(),
                })
            }
            Some(b) => b.clone(),
            None => DegreeBounds::uniform(variables.len(), options.default_num, options.default_den),
        };
        let fitted = FitData::new(variables.clone(), points.clone(), values)
            .and_then(|data| fit_rational(&data, &bounds, options.rank_tol));
        match fitted {
            Ok((function, report)) => {
                set.models.insert(metric.clone(), MetricModel { function, report });
            }
            Err(e) => {
                set.failures.insert(metric.clone(), e.to_string());
            }
        }
    }
    if set.models.is_empty() {
        return Err(PipelineError::AllMetricsFailed);
    }
    Ok(set)
}
