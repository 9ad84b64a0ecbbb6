//! Sample points, sample sets and synthetic measurements.

mod synth;

pub use synth::{synthesize, Skipped, SynthOutcome, SyntheticKernelSpec};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::perfmodel::LaunchConfig;

/// Data parameters and launch configuration of one measurement.
pub type Point = (Vec<i64>, LaunchConfig);

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub data_params: Vec<i64>,
    pub config: LaunchConfig,
    /// Aligned with [`SampleSet::metric_names`].
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Measured,
    Synthetic { seed: u64, noise_rel: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    param_names: Vec<String>,
    metric_names: Vec<String>,
    samples: Vec<Sample>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("sample {index} has {found} data parameters, expected {expected}")]
    ParamCount { index: usize, expected: usize, found: usize },
    #[error("sample {index} has {found} metric values, expected {expected}")]
    MetricCount { index: usize, expected: usize, found: usize },
    #[error("sample {index}: metric `{metric}` is not finite")]
    NonFinite { index: usize, metric: String },
    #[error("duplicate sample point {params:?} {config}")]
    Duplicate { params: Vec<i64>, config: LaunchConfig },
    #[error("duplicate column name `{0}`")]
    DuplicateName(String),
    #[error("{0}")]
    BadArgument(&'static str),
}

impl SampleSet {
    pub fn new(
        param_names: Vec<String>,
        metric_names: Vec<String>,
        samples: Vec<Sample>,
        provenance: Provenance,
    ) -> Result<Self, DataError> {
        let mut names = BTreeSet::new();
        for n in param_names.iter().chain(&metric_names) {
            if !names.insert(n.as_str()) || ["bx", "by", "bz"].contains(&n.as_str()) {
                return Err(DataError::DuplicateName(n.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for (index, s) in samples.iter().enumerate() {
            if s.data_params.len() != param_names.len() {
                return Err(DataError::ParamCount {
                    index,
                    expected: param_names.len(),
                    found: s.data_params.len(),
                });
            }
            if s.values.len() != metric_names.len() {
                return Err(DataError::MetricCount {
                    index,
                    expected: metric_names.len(),
                    found: s.values.len(),
                });
            }
            if let Some(k) = s.values.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonFinite {
                    index,
                    metric: metric_names[k].clone(),
                });
            }
            if !seen.insert((&s.data_params, s.config)) {
                return Err(DataError::Duplicate {
                    params: s.data_params.clone(),
                    config: s.config,
                });
            }
        }
        Ok(SampleSet {
            param_names,
            metric_names,
            samples,
            provenance,
        })
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn metric_names(&self) -> &[String] {
        &self.metric_names
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn metric_index(&self, name: &str) -> Option<usize> {
        self.metric_names.iter().position(|m| m == name)
    }

    /// True when some sample uses a third block dimension.
    pub fn uses_bz(&self) -> bool {
        self.samples.iter().any(|s| s.config.bz != 1)
    }

    fn subset(&self, keep: impl Fn(usize, &Sample) -> bool) -> SampleSet {
        SampleSet {
            param_names: self.param_names.clone(),
            metric_names: self.metric_names.clone(),
            samples: self
                .samples
                .iter()
                .enumerate()
                .filter(|(i, s)| keep(*i, s))
                .map(|(_, s)| s.clone())
                .collect(),
            provenance: self.provenance,
        }
    }
}

/// Every launch configuration with power-of-two dimensions and
/// `min_threads <= bx*by*bz <= max_threads`, in lexicographic order of
/// `(bx, by, bz)`. Unused dimensions are fixed at 1.
pub fn enumerate_configs(
    max_threads: u64,
    min_threads: u64,
    dims: u8,
) -> Result<Vec<LaunchConfig>, DataError> {
    if !(1..=3).contains(&dims) {
        return Err(DataError::BadArgument("dims must be 1, 2 or 3"));
    }
    if !(1 <= min_threads && min_threads <= max_threads && max_threads <= LaunchConfig::MAX_THREADS) {
        return Err(DataError::BadArgument("need 1 <= min_threads <= max_threads <= 1024"));
    }
    let pow2: Vec<u64> = (0..=10).map(|k| 1u64 << k).filter(|&p| p <= max_threads).collect();
    let axis = |d: u8| if dims > d { pow2.clone() } else { alloc::vec![1] };
    let mut out = Vec::new();
    for &bx in &axis(0) {
        for &by in &axis(1) {
            for &bz in &axis(2) {
                let t = bx * by * bz;
                if (min_threads..=max_threads).contains(&t) {
                    out.extend(LaunchConfig::new(bx, by, bz));
                }
            }
        }
    }
    Ok(out)
}

/// The standard search space: two dimensions, 32 to 1024 threads.
pub fn default_configs() -> Vec<LaunchConfig> {
    enumerate_configs(1024, 32, 2).expect("valid defaults")
}

/// Cartesian product of data-parameter vectors and configurations.
pub fn design_points(data: &[Vec<i64>], configs: &[LaunchConfig]) -> Result<Vec<Point>, DataError> {
    if data.is_empty() || configs.is_empty() {
        return Err(DataError::BadArgument("design needs data values and configurations"));
    }
    Ok(data
        .iter()
        .flat_map(|d| configs.iter().map(move |c| (d.clone(), *c)))
        .collect())
}

/// Random split holding out `round(fraction * len)` samples as the test
/// set. Both halves keep the original sample order.
pub fn holdout_split(set: &SampleSet, fraction: f64, seed: u64) -> Result<(SampleSet, SampleSet), DataError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(DataError::BadArgument("holdout fraction must lie in (0, 1)"));
    }
    let n = set.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = libm::round(fraction * n as f64) as usize;
    let test: BTreeSet<usize> = idx[..n_test].iter().copied().collect();
    Ok((
        set.subset(|i, _| !test.contains(&i)),
        set.subset(|i, _| test.contains(&i)),
    ))
}

/// Extrapolation split: samples whose data parameter `param` is at most
/// `max_train` train, the rest test.
pub fn threshold_split(set: &SampleSet, param: &str, max_train: i64) -> Result<(SampleSet, SampleSet), DataError> {
    let k = set
        .param_names
        .iter()
        .position(|p| p == param)
        .ok_or(DataError::BadArgument("unknown data parameter"))?;
    Ok((
        set.subset(|_, s| s.data_params[k] <= max_train),
        set.subset(|_, s| s.data_params[k] > max_train),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn cfg(bx: u64, by: u64) -> LaunchConfig {
        LaunchConfig::new(bx, by, 1).unwrap()
    }

    #[test]
    fn default_grid() {
        let g = default_configs();
        assert_eq!(g.len(), 51);
        for c in [cfg(16, 2), cfg(1, 32), cfg(512, 1), cfg(32, 16), cfg(1, 128), cfg(8, 4)] {
            assert!(g.contains(&c), "{c}");
        }
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|c| c.threads() % 32 == 0));
    }

    #[test]
    fn small_grids() {
        let one = enumerate_configs(1024, 32, 1).unwrap();
        assert_eq!(one.iter().map(|c| c.bx).collect::<Vec<_>>(), [32, 64, 128, 256, 512, 1024]);
        let pairs = enumerate_configs(32, 32, 2).unwrap();
        let want: Vec<_> = [(1, 32), (2, 16), (4, 8), (8, 4), (16, 2), (32, 1)]
            .iter()
            .map(|&(x, y)| cfg(x, y))
            .collect();
        assert_eq!(pairs, want);
        assert!(enumerate_configs(16, 32, 2).is_err());
        assert!(enumerate_configs(2048, 32, 2).is_err());
    }

    #[test]
    fn design_is_a_product() {
        let pts = design_points(&[vec![64], vec![128]], &[cfg(32, 1), cfg(8, 4)]).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1], (vec![64], cfg(8, 4)));
        let ns: Vec<Vec<i64>> = [64, 128, 256, 512].iter().map(|&n| vec![n]).collect();
        assert_eq!(design_points(&ns, &default_configs()).unwrap().len(), 4 * 51);
        assert!(design_points(&ns, &[]).is_err());
    }

    fn set(n: i64) -> SampleSet {
        let samples = (1..=n)
            .map(|k| Sample {
                data_params: vec![k],
                config: cfg(32, 1),
                values: vec![k as f64],
            })
            .collect();
        SampleSet::new(vec!["N".to_string()], vec!["m".to_string()], samples, Provenance::Measured).unwrap()
    }

    #[test]
    fn duplicates_rejected() {
        let s = Sample {
            data_params: vec![1],
            config: cfg(32, 1),
            values: vec![1.0],
        };
        let err = SampleSet::new(
            vec!["N".to_string()],
            vec!["m".to_string()],
            vec![s.clone(), s],
            Provenance::Measured,
        );
        assert!(matches!(err, Err(DataError::Duplicate { .. })));
    }

    #[test]
    fn splits() {
        let s = set(10);
        let (train, test) = holdout_split(&s, 0.5, 3).unwrap();
        assert_eq!((train.len(), test.len()), (5, 5));
        assert_eq!(holdout_split(&s, 0.5, 3).unwrap(), (train, test));
        let (lo, hi) = threshold_split(&s, "N", 7).unwrap();
        assert_eq!((lo.len(), hi.len()), (7, 3));
        assert!(holdout_split(&s, 1.0, 0).is_err());
    }
}
