use std::collections::BTreeMap;

use proptest::prelude::*;
use ratprog_core::datakit::*;
use ratprog_core::polyfit::{Polynomial, RationalFunction};

/// Number of exponent tuples of length `dims` summing to `k`, each at most 10.
fn tuples(dims: u32, k: u32) -> u64 {
    match dims {
        1 => u64::from(k <= 10),
        _ => (0..=k.min(10)).map(|a| tuples(dims - 1, k - a)).sum(),
    }
}

fn closed_form_count(max: u64, min: u64, dims: u32) -> u64 {
    (0..=10u32)
        .filter(|&k| (min..=max).contains(&(1u64 << k)))
        .map(|k| tuples(dims, k))
        .sum()
}

proptest! {
    #[test]
    fn config_count_matches_closed_form(min in 1u64..=1024, span in 0u64..=1024, dims in 1u8..=3) {
        let max = (min + span).min(1024);
        let configs = enumerate_configs(max, min, dims).unwrap();
        prop_assert_eq!(configs.len() as u64, closed_form_count(max, min, dims as u32));
        if min >= 32 {
            prop_assert!(configs.iter().all(|c| c.threads() % 32 == 0));
        }
        prop_assert!(configs.windows(2).all(|w| w[0] < w[1]));
    }
}

fn linear_spec(noise: f64) -> SyntheticKernelSpec {
    let vars: Vec<String> = vec!["N".into(), "bx".into(), "by".into()];
    // 3 + N/bx
    let num = Polynomial::on_grid(vars.clone(), &[1, 1, 0], vec![0.0, 3.0, 1.0, 0.0]).unwrap();
    let den = Polynomial::on_grid(vars, &[0, 1, 0], vec![0.0, 1.0]).unwrap();
    let mut gt = BTreeMap::new();
    gt.insert("comp_insts_per_thread".to_string(), RationalFunction::new(num, den).unwrap());
    SyntheticKernelSpec {
        name: "lin".into(),
        param_names: vec!["N".into()],
        ground_truth: gt,
        constants: BTreeMap::new(),
        noise_rel: noise,
    }
}

fn points() -> Vec<Point> {
    let ns: Vec<Vec<i64>> = (0..20).map(|k| vec![64 + 32 * k]).collect();
    design_points(&ns, &default_configs()).unwrap()
}

#[test]
fn noise_free_values_are_exact() {
    let spec = linear_spec(0.0);
    let out = synthesize(&spec, &points(), 0).unwrap();
    assert!(out.skipped.is_empty());
    for s in out.set.samples() {
        let want = 3.0 + s.data_params[0] as f64 / s.config.bx as f64;
        assert_eq!(s.values[0], want);
    }
}

#[test]
fn uniform_noise_mean_deviation() {
    let noise = 0.01;
    let spec = linear_spec(noise);
    let pts = points();
    assert!(pts.len() >= 1000);
    let out = synthesize(&spec, &pts, 4).unwrap();
    let mean: f64 = out
        .set
        .samples()
        .iter()
        .map(|s| {
            let truth = 3.0 + s.data_params[0] as f64 / s.config.bx as f64;
            (s.values[0] / truth - 1.0).abs()
        })
        .sum::<f64>()
        / out.set.len() as f64;
    // E|e| = noise/2 for e uniform on [-noise, noise]
    assert!((mean / (noise / 2.0) - 1.0).abs() < 0.2, "mean deviation {mean}");
    assert!(out.set.samples().iter().all(|s| {
        let truth = 3.0 + s.data_params[0] as f64 / s.config.bx as f64;
        (s.values[0] / truth - 1.0).abs() <= noise * (1.0 + 1e-12)
    }));
    assert_eq!(out.set.provenance, Provenance::Synthetic { seed: 4, noise_rel: noise });
}
