use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratprog_core::perfmodel::*;
use ratprog_core::polyfit::{Polynomial, RationalFunction};
use ratprog_core::ratir::{build_cfg, evaluate, parse, serialize, validate, Bindings, Var, DEFAULT_STEP_LIMIT};
use ratprog_core::Rational;

fn scan_oracle(hw: &DeviceProfile, r: u64, z: u64, t: u64) -> u64 {
    if t == 0 || t > hw.t_max {
        return 0;
    }
    let warps = t.div_ceil(32);
    (0..=hw.b_max)
        .filter(|&b| b * warps <= hw.w_max && b * r * t <= hw.r_max && b * z <= hw.z_max)
        .max()
        .unwrap_or(0)
}

fn random_hw(rng: &mut ChaCha8Rng) -> DeviceProfile {
    DeviceProfile {
        r_max: rng.gen_range(1..=65536),
        z_max: rng.gen_range(1..=49152),
        t_max: rng.gen_range(1..=1024),
        b_max: rng.gen_range(1..=32),
        w_max: rng.gen_range(1..=64),
        ..DeviceProfile::synthetic()
    }
}

fn random_kernel(rng: &mut ChaCha8Rng) -> (u64, u64, u64) {
    let r = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(1..=128) };
    let z = if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..=16384) };
    (r, z, rng.gen_range(0..=1100))
}

#[test]
fn active_blocks_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let hw = random_hw(&mut rng);
        let (r, z, t) = random_kernel(&mut rng);
        assert_eq!(active_blocks(&hw, r, z, t), scan_oracle(&hw, r, z, t), "{hw:?} R={r} Z={z} T={t}");
    }
}

fn occupancy_bindings(hw: &DeviceProfile, r: u64, z: u64, t: u64) -> Bindings {
    let vals = [hw.r_max, hw.z_max, hw.t_max, hw.b_max, hw.w_max, r, z, t];
    OCCUPANCY_INPUTS
        .iter()
        .zip(vals)
        .map(|(n, v)| (Var::new(*n), Rational::from_integer(v as i64)))
        .collect()
}

#[test]
fn occupancy_program_equals_direct_path() {
    let prog = emit_occupancy_rp();
    let report = validate(&prog);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert!(!report.may_be_non_integer);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let hw = random_hw(&mut rng);
        let (r, z, t) = random_kernel(&mut rng);
        let got = evaluate(&prog, &occupancy_bindings(&hw, r, z, t), DEFAULT_STEP_LIMIT).unwrap();
        let want = active_warps(&hw, active_blocks(&hw, r, z, t), t);
        assert_eq!(got, Rational::from_integer(want as i64));
        assert!(got.is_integer());
    }
}

#[test]
fn occupancy_program_shape() {
    let prog = emit_occupancy_rp();
    let cfg = build_cfg(&prog).unwrap();
    assert!(cfg.blocks.len() >= 5, "{} blocks", cfg.blocks.len());
    // leaders: the entry, every jump target, and every instruction after a
    // terminator
    let branch_targets: std::collections::BTreeSet<usize> = prog
        .body
        .iter()
        .flat_map(|i| i.jump_targets())
        .chain(
            prog.body
                .iter()
                .enumerate()
                .filter(|(_, i)| i.is_terminator())
                .map(|(k, _)| k + 1)
                .filter(|&k| k < prog.body.len()),
        )
        .collect();
    let leaders = branch_targets.len() + usize::from(!branch_targets.contains(&0));
    assert_eq!(cfg.blocks.len(), leaders);

    let hw = DeviceProfile::synthetic();
    let zero = evaluate(&prog, &occupancy_bindings(&hw, 8, 0, 0), DEFAULT_STEP_LIMIT).unwrap();
    assert!(zero.is_zero());
    let round = parse(&serialize(&prog)).unwrap();
    assert_eq!(round, prog);
}

#[test]
fn occupancy_is_one_iff_all_warps_active() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..2000 {
        let hw = random_hw(&mut rng);
        let (r, z, t) = random_kernel(&mut rng);
        let occ = occupancy(&hw, r, z, t);
        assert!((0.0..=1.0).contains(&occ));
        let w = active_warps(&hw, active_blocks(&hw, r, z, t), t);
        assert_eq!(occ == 1.0, w == hw.w_max);
    }
}

proptest! {
    #[test]
    fn resource_use_never_raises_blocks(
        seed in any::<u64>(), dr in 0u64..64, dz in 0u64..4096,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hw = random_hw(&mut rng);
        let (r, z, t) = random_kernel(&mut rng);
        let base = active_blocks(&hw, r, z, t);
        prop_assert!(active_blocks(&hw, r + dr, z, t) <= base);
        prop_assert!(active_blocks(&hw, r, z + dz, t) <= base);
    }

    #[test]
    fn larger_limits_never_lower_blocks(seed in any::<u64>(), which in 0usize..5, extra in 1u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hw = random_hw(&mut rng);
        let (r, z, t) = random_kernel(&mut rng);
        let mut more = hw.clone();
        match which {
            0 => more.r_max += extra,
            1 => more.z_max += extra,
            2 => more.t_max += extra,
            3 => more.b_max += extra,
            _ => more.w_max += extra,
        }
        prop_assert!(active_blocks(&more, r, z, t) >= active_blocks(&hw, r, z, t));
    }

    #[test]
    fn mwp_and_cwp_bounded_by_active_warps(
        seed in any::<u64>(),
        comp in 0.0f64..500.0, uncoal in 0.0f64..20.0, coal in 0.0f64..20.0,
        synch in 0.0f64..4.0, blocks in 1.0f64..1e5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hw = DeviceProfile { t_max: 1024, ..random_hw(&mut rng) };
        let m = KernelMetrics::new(rng.gen_range(0..64), rng.gen_range(0..4096), comp, uncoal, coal, synch, blocks).unwrap();
        let cfg = LaunchConfig::new(1 << rng.gen_range(0..6), 1 << rng.gen_range(0..5), 1).unwrap();
        match mwpcwp_cycles(&hw, &m, &cfg) {
            Ok(b) => {
                let n = b.w_active.max(1) as f64;
                prop_assert!(b.mwp <= n && b.cwp <= n);
                prop_assert!(b.mwp >= 1.0);
                prop_assert_eq!(b.total_cycles, b.cycles_pre_synch + b.synch_cost);
                prop_assert!(b.total_cycles >= 0.0 && b.synch_cost >= 0.0);
            }
            Err(ModelError::ZeroOccupancy(_)) => {
                prop_assert_eq!(active_blocks(&hw, m.regs_per_thread, m.shared_words_per_block, cfg.threads()), 0);
            }
        }
    }
}

fn data_params() -> Vec<String> {
    vec!["N".to_string()]
}

fn vars() -> Vec<String> {
    ["N", "bx", "by"].iter().map(|s| s.to_string()).collect()
}

/// `num / den` on graded-lex grids over (N, bx, by).
fn ratfn(num_caps: &[u32], num: &[f64], den_caps: &[u32], den: &[f64]) -> MetricSource {
    let n = Polynomial::on_grid(vars(), num_caps, num.to_vec()).unwrap();
    let d = Polynomial::on_grid(vars(), den_caps, den.to_vec()).unwrap();
    MetricSource::Fitted(RationalFunction::new(n, d).unwrap())
}

fn sample_metrics() -> MetricFunctions {
    MetricFunctions {
        // 18 + bx/16
        regs_per_thread: ratfn(&[0, 1, 0], &[18.0, 0.0625], &[0, 0, 0], &[1.0]),
        // 2*bx*by
        shared_words_per_block: ratfn(&[0, 1, 1], &[0.0, 0.0, 0.0, 2.0], &[0, 0, 0], &[1.0]),
        // (N^2 + 7 N) / (bx*by) + 12
        comp_insts_per_thread: ratfn(
            &[2, 1, 1],
            &grid_coeffs(&[2, 1, 1], |e| match e {
                [2, 0, 0] => 1.0,
                [1, 0, 0] => 7.0,
                [0, 1, 1] => 12.0,
                _ => 0.0,
            }),
            &[0, 1, 1],
            &[0.0, 0.0, 0.0, 1.0],
        ),
        // N / (bx + 3)
        uncoal_mem_insts_per_thread: ratfn(
            &[1, 0, 0],
            &[0.0, 1.0],
            &[0, 1, 0],
            &[3.0, 1.0],
        ),
        // N/64 + 2
        coal_mem_insts_per_thread: ratfn(&[1, 0, 0], &[2.0, 1.0 / 64.0], &[0, 0, 0], &[1.0]),
        synch_insts_per_block: MetricSource::Constant(Rational::from_integer(2)),
        // N^2 / (bx*by)
        total_blocks: ratfn(&[2, 0, 0], &[0.0, 0.0, 1.0], &[0, 1, 1], &[0.0, 0.0, 0.0, 1.0]),
    }
}

fn grid_coeffs(caps: &[u32], f: impl Fn(&[u32]) -> f64) -> Vec<f64> {
    let mut basis: Vec<Vec<u32>> = vec![vec![]];
    for &c in caps {
        basis = basis
            .into_iter()
            .flat_map(|b| (0..=c).map(move |e| [b.clone(), vec![e]].concat()))
            .collect();
    }
    basis.sort_by(|a, b| (a.iter().sum::<u32>(), a).cmp(&(b.iter().sum::<u32>(), b)));
    basis.iter().map(|e| f(e)).collect()
}

fn bindings(point: &[(&str, f64)], hw: &DeviceProfile) -> Bindings {
    let mut b: Bindings = point
        .iter()
        .map(|(n, v)| (Var::new(*n), Rational::from_f64(*v).unwrap()))
        .collect();
    b.extend(hardware_bindings(hw));
    b
}

#[test]
fn mwpcwp_program_validates_and_round_trips() {
    let prog = emit_mwpcwp_rp(&data_params(), &sample_metrics(), RepMode::Real).unwrap();
    let report = validate(&prog);
    assert!(report.is_valid(), "{:?}", report.violations);
    assert_eq!(parse(&serialize(&prog)).unwrap(), prog);
    let names: Vec<&str> = prog.inputs.iter().map(Var::as_str).collect();
    assert_eq!(&names[..4], ["N", "bx", "by", "bz"]);
    assert_eq!(names.len(), 4 + DeviceProfile::FIELDS.len());
}

#[test]
fn mwpcwp_program_rejects_oversized_blocks() {
    let prog = emit_mwpcwp_rp(&data_params(), &sample_metrics(), RepMode::Real).unwrap();
    let hw = DeviceProfile::synthetic();
    let b = bindings(&[("N", 512.0), ("bx", 64.0), ("by", 32.0), ("bz", 1.0)], &hw);
    assert_eq!(evaluate(&prog, &b, DEFAULT_STEP_LIMIT).unwrap(), Rational::from_integer(INFEASIBLE));
}

fn program_matches_direct(rep_mode: RepMode, seed: u64) -> BTreeMap<&'static str, usize> {
    let metrics = sample_metrics();
    let prog = emit_mwpcwp_rp(&data_params(), &metrics, rep_mode).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = BTreeMap::new();
    let mut feasible = 0;
    while feasible < 200 {
        let hw = DeviceProfile {
            b_max: rng.gen_range(1..=16),
            w_max: rng.gen_range(8..=64),
            mem_latency_cycles: rng.gen_range(100.0..800.0),
            mem_bandwidth_gbps: rng.gen_range(20.0..300.0),
            departure_del_uncoal_cycles: rng.gen_range(2.0..40.0),
            ..DeviceProfile::synthetic()
        };
        let n = rng.gen_range(16..=2048) as f64;
        let bx = (1u64 << rng.gen_range(0..=10)) as f64;
        let by = (1u64 << rng.gen_range(0..=10)) as f64;
        let point = [("N", n), ("bx", bx), ("by", by), ("bz", 1.0)];
        let got = evaluate(&prog, &bindings(&point, &hw), DEFAULT_STEP_LIMIT).unwrap();

        let direct = LaunchConfig::new(bx as u64, by as u64, 1).and_then(|cfg| {
            let m = metrics.eval(&vars(), &[n, bx, by]).ok()?;
            mwpcwp_cycles_with(&hw, &m, &cfg, rep_mode).ok()
        });
        match direct {
            None => assert_eq!(got, Rational::from_integer(INFEASIBLE), "{point:?}"),
            Some(b) => {
                let rel = (got.to_f64() - b.total_cycles).abs() / b.total_cycles.abs();
                assert!(rel < 1e-9, "{point:?}: program {} direct {} ({:?})", got.to_f64(), b.total_cycles, b.case_tag);
                *cases.entry(b.case_tag.as_str()).or_insert(0) += 1;
                feasible += 1;
            }
        }
    }
    cases
}

#[test]
fn mwpcwp_program_equals_direct_path() {
    let cases = program_matches_direct(RepMode::Real, 13);
    assert_eq!(cases.len(), 3, "not every case reached: {cases:?}");
}

#[test]
fn mwpcwp_program_equals_direct_path_with_ceil_rep() {
    program_matches_direct(RepMode::Ceil, 14);
}

#[test]
fn emit_rejects_unknown_variables_and_reserved_names() {
    let mut m = sample_metrics();
    let p = Polynomial::on_grid(vec!["M".into()], &[1], vec![1.0, 1.0]).unwrap();
    m.comp_insts_per_thread = MetricSource::Fitted(RationalFunction::from_polynomial(p));
    assert!(matches!(
        emit_mwpcwp_rp(&data_params(), &m, RepMode::Real),
        Err(EmitError::UnknownVariable { var, .. }) if var == "M"
    ));
    let bad = vec!["W_max".to_string()];
    assert_eq!(
        emit_mwpcwp_rp(&bad, &sample_metrics(), RepMode::Real),
        Err(EmitError::BadParameterName("W_max".into()))
    );
}

#[test]
fn compute_only_kernel_program() {
    let mut m = sample_metrics();
    m.uncoal_mem_insts_per_thread = MetricSource::Constant(Rational::zero());
    m.coal_mem_insts_per_thread = MetricSource::Constant(Rational::zero());
    let prog = emit_mwpcwp_rp(&data_params(), &m, RepMode::Real).unwrap();
    assert!(validate(&prog).is_valid());
    let hw = DeviceProfile::synthetic();
    let (n, bx, by) = (256.0, 16.0, 8.0);
    let got = evaluate(&prog, &bindings(&[("N", n), ("bx", bx), ("by", by), ("bz", 1.0)], &hw), DEFAULT_STEP_LIMIT).unwrap();
    let km = m.eval(&vars(), &[n, bx, by]).unwrap();
    let b = mwpcwp_cycles(&hw, &km, &LaunchConfig::new(16, 8, 1).unwrap()).unwrap();
    assert_eq!(b.cycles_pre_synch, b.comp_cycles * b.rep);
    assert!((got.to_f64() - b.total_cycles).abs() <= 1e-9 * b.total_cycles);
}
