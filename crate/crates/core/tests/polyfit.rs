use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratprog_core::polyfit::*;

fn g1(x: f64) -> f64 {
    (x * x + 1.0) / (x + 2.0)
}

fn g3(p: &[f64]) -> f64 {
    p.iter().map(|&x| g1(x)).sum()
}

fn vars(n: usize) -> Vec<String> {
    ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
}

fn sample3(rng: &mut ChaCha8Rng, m: usize, noise: f64) -> FitData {
    let points: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..3).map(|_| rng.gen_range(0.5..4.0)).collect())
        .collect();
    let values = points
        .iter()
        .map(|p| g3(p) * (1.0 + rng.gen_range(-noise..=noise)))
        .collect();
    FitData::new(vars(3), points, values).unwrap()
}

#[test]
fn recovers_univariate_rational() {
    let xs: Vec<f64> = (0..20).map(|k| 0.25 * k as f64).collect();
    let data = FitData::new(
        vars(1),
        xs.iter().map(|&x| vec![x]).collect(),
        xs.iter().map(|&x| g1(x)).collect(),
    )
    .unwrap();
    let bounds = DegreeBounds::new(vec![2], vec![1]).unwrap();
    let (f, report) = fit_rational(&data, &bounds, DEFAULT_RANK_TOL).unwrap();
    let worst = (0..100)
        .map(|k| 0.1 + 0.0537 * k as f64)
        .map(|x| ((f.eval(&[x]).unwrap() - g1(x)) / g1(x)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-8, "held-out error {worst}");
    assert!(!report.truncated);
    assert_eq!(report.numerical_rank, 4);
    // normalization invariants
    let norm: f64 = f
        .num
        .coefficients
        .iter()
        .chain(&f.den.coefficients)
        .map(|c| c * c)
        .sum();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(f.den.coefficients[0] > 0.0);
    // evaluations at training points sit within the residual of the data
    for (x, y) in data.points.iter().zip(&data.values) {
        assert!((f.eval(x).unwrap() - y).abs() <= 1e-9 * y.abs().max(1.0));
    }
}

#[test]
fn recovers_trivariate_rational_noise_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let train = sample3(&mut rng, 200, 0.0);
    let test = sample3(&mut rng, 100, 0.0);
    let bounds = DegreeBounds::new(vec![2, 2, 2], vec![1, 1, 1]).unwrap();
    let (f, _) = fit_rational(&train, &bounds, DEFAULT_RANK_TOL).unwrap();
    let err = max_relative_error(&f, &test);
    assert!(err < 1e-8, "held-out error {err}");
}

#[test]
fn trivariate_rational_with_one_percent_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let train = sample3(&mut rng, 200, 0.01);
    let test = sample3(&mut rng, 100, 0.0);
    let bounds = DegreeBounds::new(vec![2, 2, 2], vec![1, 1, 1]).unwrap();
    // truncate at roughly the noise level
    let (f, report) = fit_rational(&train, &bounds, 5e-3).unwrap();
    assert!(report.truncated);
    let err = max_relative_error(&f, &test);
    assert!(err < 0.05, "held-out error {err}");
}

#[test]
fn univariate_noisy_200_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..5.0)).collect();
    let ys = xs.iter().map(|&x| g1(x) * (1.0 + rng.gen_range(-0.01..=0.01))).collect();
    let data = FitData::new(vars(1), xs.iter().map(|&x| vec![x]).collect(), ys).unwrap();
    let (f, _) = fit_rational(&data, &DegreeBounds::new(vec![2], vec![1]).unwrap(), 1e-10).unwrap();
    let worst = (0..100)
        .map(|k| 0.05 * k as f64)
        .map(|x| ((f.eval(&[x]).unwrap() - g1(x)) / g1(x)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn exact_interpolation_at_basis_size() {
    // 5 unknowns, homogeneous: 4 poised samples determine the function
    let xs = [0.0, 1.0, 2.5, 4.0];
    let data = FitData::new(
        vars(1),
        xs.iter().map(|&x| vec![x]).collect(),
        xs.iter().map(|&x| g1(x)).collect(),
    )
    .unwrap();
    let (f, report) =
        fit_rational(&data, &DegreeBounds::new(vec![2], vec![1]).unwrap(), 1e-10).unwrap();
    let data_norm = norm(&data.values);
    assert!(report.residual_norm < 1e-10 * data_norm);
    assert!((f.eval(&[3.0]).unwrap() - g1(3.0)).abs() < 1e-9);
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Straightforward normal-equations solve for a well-conditioned design.
fn normal_equations(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = a.cols();
    let ata = a.transpose().mul(a);
    let atb = a.transpose().mul_vec(b);
    // Gaussian elimination with partial pivoting on [AᵀA | Aᵀb]
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| ata[(i, j)]).chain([atb[i]]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        let pivot = m[col].clone();
        for row in &mut m[col + 1..] {
            let f = row[col] / pivot[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

#[test]
fn polynomial_fit_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0 + rng.gen_range(-0.1..0.1)).collect();
    let data = FitData::new(vars(1), xs.iter().map(|&x| vec![x]).collect(), ys.clone()).unwrap();
    let (p, report) = fit_polynomial(&data, &[1], DEFAULT_RANK_TOL).unwrap();

    let a = Matrix::from_rows(&xs.iter().map(|&x| vec![1.0, x]).collect::<Vec<_>>());
    let x = normal_equations(&a, &ys);
    let r: Vec<f64> = a.mul_vec(&x).iter().zip(&ys).map(|(f, y)| y - f).collect();
    assert!((report.residual_norm - norm(&r)).abs() < 1e-8);
    for (c, o) in p.coefficients.iter().zip(&x) {
        assert!((c - o).abs() < 1e-8);
    }
}

#[test]
fn homogeneous_solution_is_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let a = Matrix::from_rows(&rows);
    let dec = svd(&a).unwrap();
    let c_fit = dec.smallest_right_vector();
    let best = norm(&a.mul_vec(&c_fit));
    assert!((best - dec.sigma[5]).abs() < 1e-12);
    for _ in 0..1000 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&c);
        let c: Vec<f64> = c.iter().map(|x| x / n).collect();
        assert!(best <= norm(&a.mul_vec(&c)) + 1e-15);
    }
}

#[test]
fn power_of_two_block_grid_poisedness() {
    let mut pts = Vec::new();
    for a in 0..=10u32 {
        for b in 0..=10u32 {
            if (5..=10).contains(&(a + b)) {
                pts.push(vec![(1u32 << a) as f64, (1u32 << b) as f64]);
            }
        }
    }
    assert_eq!(pts.len(), 51);
    let p = poisedness_report(&pts, &[2, 2], DEFAULT_RANK_TOL).unwrap();
    assert_eq!(p.basis_size, 9);
    assert!(p.rank <= 9);
    assert!(p.condition_estimate > 1e3, "{p:?}");
}

#[test]
fn basis_is_stable() {
    let b = DegreeBounds::new(vec![2, 1, 1], vec![1, 1, 0]).unwrap();
    let expected: Vec<Vec<u32>> = vec![
        vec![0, 0, 0],
        vec![0, 0, 1],
        vec![0, 1, 0],
        vec![1, 0, 0],
        vec![0, 1, 1],
        vec![1, 0, 1],
        vec![1, 1, 0],
        vec![2, 0, 0],
        vec![1, 1, 1],
        vec![2, 0, 1],
        vec![2, 1, 0],
        vec![2, 1, 1],
    ];
    assert_eq!(monomial_basis(&b, Side::Num), expected);
}

fn random_poly(rng: &mut ChaCha8Rng, caps: &[u32]) -> Polynomial {
    let n = monomial_basis(&DegreeBounds::polynomial(caps.to_vec()), Side::Num).len();
    let coeffs = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Polynomial::on_grid(vars(caps.len()), caps, coeffs).unwrap()
}

#[test]
fn eval_matches_term_by_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let p = random_poly(&mut rng, &[3, 2, 1]);
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut naive = 0.0;
        for (e, c) in p.basis.iter().zip(&p.coefficients) {
            let mut term = *c;
            for (xi, &ei) in x.iter().zip(e) {
                for _ in 0..ei {
                    term *= xi;
                }
            }
            naive += term;
        }
        let scale: f64 = p.coefficients.iter().map(|c| c.abs()).sum::<f64>() * 8.0f64.powi(6);
        assert!((p.eval(&x).unwrap() - naive).abs() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scale_invariance(c in 0.01f64..100.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..30).map(|_| rng.gen_range(0.0..5.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| g1(x) * (1.0 + rng.gen_range(-0.01..0.01))).collect();
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let bounds = DegreeBounds::new(vec![2], vec![1]).unwrap();
        let base = FitData::new(vars(1), pts.clone(), ys.clone()).unwrap();
        let scaled = FitData::new(vars(1), pts.clone(), ys.iter().map(|y| c * y).collect()).unwrap();
        let (f, _) = fit_rational(&base, &bounds, 1e-10).unwrap();
        let (fc, _) = fit_rational(&scaled, &bounds, 1e-10).unwrap();
        for x in &pts {
            let (a, b) = (c * f.eval(x).unwrap(), fc.eval(x).unwrap());
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn svd_reconstructs(seed in 0u64..10_000, rows in 1usize..12, cols in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-10.0..10.0)).collect())
            .collect();
        let a = Matrix::from_rows(&data);
        let dec = svd(&a).unwrap();
        prop_assert!(dec.sigma.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(dec.sigma.iter().all(|&s| s >= 0.0));
        let err = a.sub(&dec.reconstruct()).frobenius_norm();
        prop_assert!(err <= 1e-10 * dec.sigma[0].max(1e-300));
    }
}
