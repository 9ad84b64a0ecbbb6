use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::search::{data_bindings, evaluate_configs, metric_occupancy, rank, Evaluated};
use super::{MetricModelSet, PipelineError};
use crate::datakit::{Sample, SampleSet};
use crate::perfmodel::{mwpcwp_cycles_with, occupancy, DeviceProfile, KernelMetrics, LaunchConfig, MetricFunctions, RepMode};
use crate::ratir::RationalProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorWarning {
    /// `crt` lay outside `[best, worst]` and was clamped.
    Clamped,
    /// `worst == best`; the error is defined as 0.
    EmptyRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetric {
    pub percent: f64,
    pub warning: Option<ErrorWarning>,
}

/// `(crt - best) / (worst - best) * 100`.
pub fn error_metric(crt: f64, best: f64, worst: f64) -> Result<ErrorMetric, PipelineError> {
    if !(crt.is_finite() && best.is_finite() && worst.is_finite()) || worst < best {
        return Err(PipelineError::BadTimes);
    }
    if worst == best {
        return Ok(ErrorMetric {
            percent: 0.0,
            warning: Some(ErrorWarning::EmptyRange),
        });
    }
    let clamped = crt.clamp(best, worst);
    Ok(ErrorMetric {
        percent: (clamped - best) / (worst - best) * 100.0,
        warning: (clamped != crt).then_some(ErrorWarning::Clamped),
    })
}

/// One data point of the sanity table. Fields are `None` when no sampled
/// configuration is feasible for that side.
#[derive(Debug, Clone, PartialEq)]
pub struct SanityRow {
    pub data_params: Vec<i64>,
    /// Best configuration according to the collected metrics.
    pub c_i: Option<LaunchConfig>,
    pub ec_i: Option<f64>,
    /// Best configuration according to the rational program.
    pub c_r: Option<LaunchConfig>,
    pub ec_r: Option<f64>,
    /// Estimate from the collected metrics at `c_r`.
    pub collected_ec: Option<f64>,
}

fn collected_metrics(
    samples: &SampleSet,
    constants: &BTreeMap<String, f64>,
    s: &Sample,
) -> Result<Option<KernelMetrics>, PipelineError> {
    let mut v = [0.0; 7];
    for (slot, name) in v.iter_mut().zip(MetricFunctions::NAMES) {
        *slot = match (samples.metric_index(name), constants.get(name)) {
            (Some(k), _) => s.values[k],
            (None, Some(&c)) => c,
            (None, None) => return Err(PipelineError::MissingMetric(name.into())),
        };
    }
    let [r, z, comp, uncoal, coal, synch, blocks] = v;
    if r < 0.0 || z < 0.0 {
        return Ok(None);
    }
    let round = |x: f64| libm::floor(x + 0.5) as u64;
    Ok(KernelMetrics::new(round(r), round(z), comp, uncoal, coal, synch, blocks).ok())
}

/// Compares, per sampled data point, the configuration the collected
/// metrics select with the one the rational program selects.
pub fn sanity_report(
    models: &MetricModelSet,
    samples: &SampleSet,
    rp: &RationalProgram,
    hw: &DeviceProfile,
    rep_mode: RepMode,
) -> Result<Vec<SanityRow>, PipelineError> {
    let metrics = models.metric_functions()?;
    let mut groups: BTreeMap<&[i64], Vec<&Sample>> = BTreeMap::new();
    for s in samples.samples() {
        groups.entry(&s.data_params).or_default().push(s);
    }

    let mut rows = Vec::new();
    for (params, group) in groups {
        let mut collected: BTreeMap<LaunchConfig, (f64, f64)> = BTreeMap::new();
        let mut evaluated = Vec::new();
        for s in &group {
            let cycles = match collected_metrics(samples, &models.constants, s)? {
                Some(m) => mwpcwp_cycles_with(hw, &m, &s.config, rep_mode).ok().map(|b| {
                    let occ = occupancy(hw, m.regs_per_thread, m.shared_words_per_block, s.config.threads());
                    collected.insert(s.config, (b.total_cycles, occ));
                    b.total_cycles
                }),
                None => None,
            };
            evaluated.push(Evaluated {
                config: s.config,
                cycles,
            });
        }
        let by_instrumentation = rank(&evaluated, |c| collected.get(c).map_or(0.0, |v| v.1)).ok();

        let data: Vec<(String, i64)> = samples.param_names().iter().cloned().zip(params.iter().copied()).collect();
        let configs: Vec<LaunchConfig> = group.iter().map(|s| s.config).collect();
        let by_program = rank(
            &evaluate_configs(rp, &data_bindings(&data), &configs)?,
            metric_occupancy(hw, &metrics, &data),
        )
        .ok();

        let c_r = by_program.as_ref().map(|r| r.chosen);
        rows.push(SanityRow {
            data_params: params.to_vec(),
            c_i: by_instrumentation.as_ref().map(|r| r.chosen),
            ec_i: by_instrumentation.as_ref().map(|r| r.ranked[0].cycles),
            c_r,
            ec_r: by_program.as_ref().map(|r| r.ranked[0].cycles),
            collected_ec: c_r.and_then(|c| collected.get(&c)).map(|v| v.0),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_anchors() {
        assert_eq!(error_metric(0.04, 0.04, 0.34).unwrap().percent, 0.0);
        let e = error_metric(0.16, 0.15, 1.31).unwrap();
        assert!((e.percent - 0.862).abs() < 1e-3 && e.warning.is_none());
        assert_eq!(error_metric(1.31, 0.15, 1.31).unwrap().percent, 100.0);
    }

    #[test]
    fn edge_cases_warn() {
        let e = error_metric(0.1, 0.2, 0.2).unwrap();
        assert_eq!((e.percent, e.warning), (0.0, Some(ErrorWarning::EmptyRange)));
        let e = error_metric(2.0, 0.2, 1.2).unwrap();
        assert_eq!((e.percent, e.warning), (100.0, Some(ErrorWarning::Clamped)));
        assert!(error_metric(0.5, 1.0, 0.2).is_err());
        assert!(error_metric(f64::NAN, 0.0, 1.0).is_err());
    }
}
