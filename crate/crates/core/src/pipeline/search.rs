use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::PipelineError;
use crate::perfmodel::{occupancy, DeviceProfile, LaunchConfig, MetricFunctions, INFEASIBLE};
use crate::ratir::{evaluate, Bindings, RationalProgram, Var, DEFAULT_STEP_LIMIT};
use crate::Rational;

/// Relative tolerance for treating two cycle estimates as equal.
pub const TIE_REL_TOL: f64 = 1e-12;

/// Program output at one configuration; `None` when infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub config: LaunchConfig,
    pub cycles: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedConfig {
    pub config: LaunchConfig,
    pub cycles: f64,
    pub occupancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Ties at the minimum first, then the rest by increasing estimate.
    pub ranked: Vec<RankedConfig>,
    pub chosen: LaunchConfig,
    /// Number of configurations within [`TIE_REL_TOL`] of the minimum.
    pub ties: usize,
    pub infeasible: Vec<LaunchConfig>,
}

/// Bindings for the data parameters; configuration inputs are added per
/// evaluation.
pub fn data_bindings(data: &[(String, i64)]) -> Bindings {
    data.iter()
        .map(|(k, v)| (Var::new(k.as_str()), Rational::from_integer(*v)))
        .collect()
}

pub fn evaluate_config(
    rp: &RationalProgram,
    data: &Bindings,
    config: LaunchConfig,
) -> Result<Option<Rational>, PipelineError> {
    let mut b = data.clone();
    for (name, v) in [("bx", config.bx), ("by", config.by), ("bz", config.bz)] {
        b.insert(Var::new(name), Rational::from_integer(v as i64));
    }
    let value = evaluate(rp, &b, DEFAULT_STEP_LIMIT).map_err(|source| PipelineError::Eval { config, source })?;
    Ok((value != Rational::from_integer(INFEASIBLE)).then_some(value))
}

pub fn evaluate_configs(
    rp: &RationalProgram,
    data: &Bindings,
    configs: &[LaunchConfig],
) -> Result<Vec<Evaluated>, PipelineError> {
    configs
        .iter()
        .map(|&config| {
            Ok(Evaluated {
                config,
                cycles: evaluate_config(rp, data, config)?.map(|v| v.to_f64()),
            })
        })
        .collect()
}

fn by_occupancy_then_config(a: &RankedConfig, b: &RankedConfig) -> Ordering {
    b.occupancy
        .total_cmp(&a.occupancy)
        .then_with(|| a.config.cmp(&b.config))
}

/// Orders evaluated configurations: minimal estimate, then maximal
/// occupancy, then smallest `(bx, by, bz)`.
pub fn rank(
    evaluated: &[Evaluated],
    occupancy: impl Fn(&LaunchConfig) -> f64,
) -> Result<SearchResult, PipelineError> {
    if evaluated.is_empty() {
        return Err(PipelineError::EmptyConfigSpace);
    }
    let mut feasible = Vec::new();
    let mut infeasible = Vec::new();
    for e in evaluated {
        match e.cycles {
            Some(cycles) => feasible.push(RankedConfig {
                config: e.config,
                cycles,
                occupancy: occupancy(&e.config),
            }),
            None => infeasible.push(e.config),
        }
    }
    let best = feasible
        .iter()
        .map(|r| r.cycles)
        .min_by(f64::total_cmp)
        .ok_or(PipelineError::NoFeasibleConfig)?;
    let tied = |r: &RankedConfig| (r.cycles - best).abs() <= TIE_REL_TOL * best.abs();
    let (mut ranked, mut rest): (Vec<_>, Vec<_>) = feasible.into_iter().partition(tied);
    ranked.sort_by(by_occupancy_then_config);
    rest.sort_by(|a, b| a.cycles.total_cmp(&b.cycles).then_with(|| by_occupancy_then_config(a, b)));
    let ties = ranked.len();
    ranked.extend(rest);
    infeasible.sort();
    Ok(SearchResult {
        chosen: ranked[0].config,
        ranked,
        ties,
        infeasible,
    })
}

/// Exhaustive search of `configs` at the data point `data`.
pub fn search_optimal(
    rp: &RationalProgram,
    data: &[(String, i64)],
    configs: &[LaunchConfig],
    occupancy: impl Fn(&LaunchConfig) -> f64,
) -> Result<SearchResult, PipelineError> {
    if configs.is_empty() {
        return Err(PipelineError::EmptyConfigSpace);
    }
    let evaluated = evaluate_configs(rp, &data_bindings(data), configs)?;
    rank(&evaluated, occupancy)
}

/// Occupancy from the register and shared-memory metrics at `data`; 0 where
/// the metrics cannot be evaluated.
pub fn metric_occupancy<'a>(
    hw: &'a DeviceProfile,
    metrics: &'a MetricFunctions,
    data: &[(String, i64)],
) -> impl Fn(&LaunchConfig) -> f64 + 'a {
    let base: BTreeMap<String, f64> = data.iter().map(|(k, v)| (k.clone(), *v as f64)).collect();
    move |cfg: &LaunchConfig| {
        let mut names: Vec<String> = base.keys().cloned().collect();
        let mut values: Vec<f64> = base.values().copied().collect();
        for (n, v) in [("bx", cfg.bx), ("by", cfg.by), ("bz", cfg.bz)] {
            names.push(n.into());
            values.push(v as f64);
        }
        match metrics.eval(&names, &values) {
            Ok(m) => occupancy(hw, m.regs_per_thread, m.shared_words_per_block, cfg.threads()),
            Err(_) => 0.0,
        }
    }
}
