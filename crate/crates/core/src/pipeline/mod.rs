//! Fit every metric, compose the cycle-estimate program, search the
//! configuration space and report on the choice.

mod csource;
mod generate;
mod models;
mod report;
mod search;

pub use csource::{c_lowering, emit_c_source, CLowering, C_ENTRY};
pub use generate::{generate_occupancy_rp, generate_rp};
pub use models::{fit_all_metrics, FitOptions, MetricModel, MetricModelSet, DEFAULT_DEN_DEGREE, DEFAULT_NUM_DEGREE};
pub use report::{error_metric, sanity_report, ErrorMetric, ErrorWarning, SanityRow};
pub use search::{
    data_bindings, evaluate_config, evaluate_configs, metric_occupancy, rank, search_optimal, Evaluated,
    RankedConfig, SearchResult, TIE_REL_TOL,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::perfmodel::{DeviceError, EmitError, LaunchConfig};
use crate::ratir::{EvalError, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("no metric could be fitted")]
    AllMetricsFailed,
    #[error("no samples to fit")]
    NoSamples,
    #[error("degree bounds for `{metric}` cover {found} variables, expected {expected}")]
    BoundsMismatch { metric: String, expected: usize, found: usize },
    #[error("the model set is empty")]
    EmptyModelSet,
    #[error("metric `{0}` has neither a model nor a constant")]
    MissingMetric(String),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error("generated program is invalid: {0:?}")]
    InvalidProgram(Vec<Violation>),
    #[error("configuration space is empty")]
    EmptyConfigSpace,
    #[error("no configuration is feasible")]
    NoFeasibleConfig,
    #[error("evaluating {config}: {source}")]
    Eval { config: LaunchConfig, source: EvalError },
    #[error("error metric needs finite times with worst >= best")]
    BadTimes,
}
