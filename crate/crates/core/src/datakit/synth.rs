use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DataError, Point, Provenance, Sample, SampleSet};
use crate::perfmodel::KernelMetrics;
use crate::polyfit::{FitError, RationalFunction};

/// Ground-truth description of an emulated kernel.
///
/// Ground-truth functions read their variables by name from the data
/// parameters and `bx`, `by`, `bz`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticKernelSpec {
    pub name: String,
    pub param_names: Vec<String>,
    pub ground_truth: BTreeMap<String, RationalFunction>,
    /// Metrics with a fixed value, such as register counts. Never noisy.
    pub constants: BTreeMap<String, f64>,
    pub noise_rel: f64,
}

impl SyntheticKernelSpec {
    /// Metric columns: known kernel metrics in their usual order, then any
    /// others alphabetically.
    pub fn metric_names(&self) -> Vec<String> {
        let mut all: Vec<&String> = self.ground_truth.keys().chain(self.constants.keys()).collect();
        all.sort_by_key(|n| {
            let rank = KernelMetrics::NAMES.iter().position(|k| k == n).unwrap_or(usize::MAX);
            (rank, n.as_str())
        });
        all.dedup();
        all.into_iter().cloned().collect()
    }

    /// Noise-free value of one ground-truth metric.
    pub fn eval(&self, metric: &str, point: &Point) -> Result<f64, FitError> {
        if let Some(&c) = self.constants.get(metric) {
            return Ok(c);
        }
        let f = self.ground_truth.get(metric).ok_or(FitError::VariableMismatch)?;
        let (params, cfg) = point;
        let args = f
            .variables()
            .iter()
            .map(|v| match v.as_str() {
                "bx" => Some(cfg.bx as f64),
                "by" => Some(cfg.by as f64),
                "bz" => Some(cfg.bz as f64),
                _ => self
                    .param_names
                    .iter()
                    .position(|p| p == v)
                    .map(|k| params[k] as f64),
            })
            .collect::<Option<Vec<f64>>>()
            .ok_or(FitError::VariableMismatch)?;
        f.eval(&args)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub point: Point,
    pub metric: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutcome {
    pub set: SampleSet,
    pub skipped: Vec<Skipped>,
}

/// Emulated measurements `g(point) * (1 + e)` with `e` uniform in
/// `[-noise_rel, noise_rel]`. Points where some ground truth cannot be
/// evaluated, or is negative, are skipped and listed.
pub fn synthesize(spec: &SyntheticKernelSpec, points: &[Point], seed: u64) -> Result<SynthOutcome, DataError> {
    if !(spec.noise_rel >= 0.0 && spec.noise_rel.is_finite()) {
        return Err(DataError::BadArgument("noise_rel must be finite and non-negative"));
    }
    let names = spec.metric_names();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(points.len());
    let mut skipped = Vec::new();
    'points: for point in points {
        let mut values = Vec::with_capacity(names.len());
        for m in &names {
            let truth = match spec.eval(m, point) {
                Ok(v) if v.is_finite() && v >= 0.0 => v,
                Ok(v) => {
                    skipped.push(Skipped {
                        point: point.clone(),
                        metric: m.clone(),
                        reason: alloc::format!("ground truth is {v}"),
                    });
                    continue 'points;
                }
                Err(e) => {
                    skipped.push(Skipped {
                        point: point.clone(),
                        metric: m.clone(),
                        reason: alloc::format!("{e}"),
                    });
                    continue 'points;
                }
            };
            let noisy = spec.noise_rel > 0.0 && !spec.constants.contains_key(m);
            let eps = if noisy {
                rng.gen_range(-spec.noise_rel..=spec.noise_rel)
            } else {
                0.0
            };
            values.push(truth * (1.0 + eps));
        }
        samples.push(Sample {
            data_params: point.0.clone(),
            config: point.1,
            values,
        });
    }
    let set = SampleSet::new(
        spec.param_names.clone(),
        names,
        samples,
        Provenance::Synthetic {
            seed,
            noise_rel: spec.noise_rel,
        },
    )?;
    Ok(SynthOutcome { set, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datakit::{default_configs, design_points};
    use crate::polyfit::Polynomial;
    use alloc::string::ToString;
    use alloc::vec;

    fn spec(noise: f64) -> SyntheticKernelSpec {
        let vars: Vec<String> = ["N", "bx"].iter().map(|s| s.to_string()).collect();
        // (N^2 + 1) / (bx - 4), singular at bx = 4
        let num = Polynomial::on_grid(vars.clone(), &[2, 0], vec![1.0, 0.0, 1.0]).unwrap();
        let den = Polynomial::on_grid(vars, &[0, 1], vec![-4.0, 1.0]).unwrap();
        let mut ground_truth = BTreeMap::new();
        ground_truth.insert("comp_insts_per_thread".to_string(), RationalFunction::new(num, den).unwrap());
        let mut constants = BTreeMap::new();
        constants.insert("regs_per_thread".to_string(), 20.0);
        SyntheticKernelSpec {
            name: "t".into(),
            param_names: vec!["N".into()],
            ground_truth,
            constants,
            noise_rel: noise,
        }
    }

    #[test]
    fn skips_singular_points_and_orders_columns() {
        let pts = design_points(&[vec![64]], &default_configs()).unwrap();
        let out = synthesize(&spec(0.0), &pts, 1).unwrap();
        assert_eq!(out.set.metric_names(), ["regs_per_thread", "comp_insts_per_thread"]);
        // bx = 4 divides by zero; bx = 1, 2 give negative values
        let bad_bx: Vec<u64> = out.skipped.iter().map(|s| s.point.1.bx).collect();
        assert!(bad_bx.iter().all(|&b| b <= 4));
        assert_eq!(out.set.len() + out.skipped.len(), pts.len());
        let s = &out.set.samples()[0];
        assert_eq!(s.values[0], 20.0);
        assert_eq!(s.values[1], (64.0 * 64.0 + 1.0) / (s.config.bx as f64 - 4.0));
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let pts = design_points(&[vec![64], vec![128]], &default_configs()).unwrap();
        let a = synthesize(&spec(0.01), &pts, 9).unwrap();
        assert_eq!(a, synthesize(&spec(0.01), &pts, 9).unwrap());
        assert_ne!(a.set, synthesize(&spec(0.01), &pts, 10).unwrap().set);
        assert!(a.set.samples().iter().all(|s| s.values[0] == 20.0));
    }
}
