//! Multi-threaded configuration search.

use ratprog_core::perfmodel::{mwpcwp_cycles_with, CaseTag, DeviceProfile, LaunchConfig, MetricFunctions, RepMode};
use ratprog_core::pipeline::{data_bindings, evaluate_configs, rank, Evaluated, PipelineError, SearchResult};
use ratprog_core::ratir::RationalProgram;

/// Evaluates `configs` on up to `jobs` threads over contiguous chunks and
/// merges the results in input order.
pub fn evaluate_parallel(
    rp: &RationalProgram,
    data: &[(String, i64)],
    configs: &[LaunchConfig],
    jobs: usize,
) -> Result<Vec<Evaluated>, PipelineError> {
    let bindings = data_bindings(data);
    let jobs = jobs.clamp(1, configs.len().max(1));
    if jobs == 1 {
        return evaluate_configs(rp, &bindings, configs);
    }
    let chunk = configs.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<Evaluated>, PipelineError>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|part| s.spawn(|| evaluate_configs(rp, &bindings, part)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(configs.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

pub fn search_parallel(
    rp: &RationalProgram,
    data: &[(String, i64)],
    configs: &[LaunchConfig],
    occupancy: impl Fn(&LaunchConfig) -> f64,
    jobs: usize,
) -> Result<SearchResult, PipelineError> {
    if configs.is_empty() {
        return Err(PipelineError::EmptyConfigSpace);
    }
    rank(&evaluate_parallel(rp, data, configs, jobs)?, occupancy)
}

/// MWP-CWP case of the direct model at one configuration, if the metrics
/// can be evaluated and the configuration launches.
pub fn case_tag(
    hw: &DeviceProfile,
    metrics: &MetricFunctions,
    data: &[(String, i64)],
    config: &LaunchConfig,
    rep_mode: RepMode,
) -> Option<CaseTag> {
    let mut names: Vec<String> = data.iter().map(|d| d.0.clone()).collect();
    let mut values: Vec<f64> = data.iter().map(|d| d.1 as f64).collect();
    for (n, v) in [("bx", config.bx), ("by", config.by), ("bz", config.bz)] {
        names.push(n.into());
        values.push(v as f64);
    }
    let m = metrics.eval(&names, &values).ok()?;
    mwpcwp_cycles_with(hw, &m, config, rep_mode).ok().map(|b| b.case_tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ratprog_core::ratir::parse;

    #[test]
    fn jobs_do_not_change_results() {
        let rp = parse("inputs: N bx by\noutput: Y\n0: mul T bx by\n1: floor_div Y N T\n2: halt_return Y\n").unwrap();
        let configs: Vec<LaunchConfig> = (1..=40).map(|k| LaunchConfig::new(k, 41 - k, 1).unwrap()).collect();
        let data = [("N".to_string(), 4096)];
        let serial = evaluate_parallel(&rp, &data, &configs, 1).unwrap();
        assert_eq!(serial.len(), 40);
        for jobs in [2, 3, 8, 64] {
            assert_eq!(evaluate_parallel(&rp, &data, &configs, jobs).unwrap(), serial);
        }
    }
}
