use alloc::string::String;
use alloc::vec::Vec;

use super::basis::{monomial_basis, DegreeBounds, Exponents, Side};
use super::matrix::{norm2, Matrix};
use super::poly::{monomial, Polynomial, RationalFunction};
use super::svd::{svd, Svd};
use super::FitError;

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Observations `(points[k], values[k])` over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct FitData {
    pub variables: Vec<String>,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl FitData {
    pub fn new(
        variables: Vec<String>,
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
    ) -> Result<Self, FitError> {
        if points.len() != values.len() {
            return Err(FitError::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if let Some(p) = points.iter().find(|p| p.len() != variables.len()) {
            return Err(FitError::DimensionMismatch {
                expected: variables.len(),
                found: p.len(),
            });
        }
        if points.iter().flatten().chain(&values).any(|x| !x.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(FitData {
            variables,
            points,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-variable maximum magnitude (1 for an all-zero variable) and the
    /// same for the values.
    fn scales(&self) -> (Vec<f64>, f64) {
        let var_scales = (0..self.variables.len())
            .map(|i| nonzero(self.points.iter().map(|p| p[i].abs()).fold(0.0, f64::max)))
            .collect();
        let value_scale = nonzero(self.values.iter().map(|y| y.abs()).fold(0.0, f64::max));
        (var_scales, value_scale)
    }

    fn scaled(&self, var_scales: &[f64], value_scale: f64) -> FitData {
        FitData {
            variables: self.variables.clone(),
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(var_scales).map(|(x, s)| x / s).collect())
                .collect(),
            values: self.values.iter().map(|y| y / value_scale).collect(),
        }
    }
}

fn nonzero(s: f64) -> f64 {
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub residual_norm: f64,
    pub numerical_rank: usize,
    pub singular_values: Vec<f64>,
    pub truncated: bool,
    pub holdout_relative_error: Option<f64>,
}

/// Row `k` is `[num_monomials(x_k), -y_k * den_monomials(x_k)]`, so that
/// `A (alpha ‖ beta) = 0` encodes `p(x_k) - y_k q(x_k) = 0`.
pub fn build_sample_matrix(data: &FitData, bounds: &DegreeBounds) -> Matrix {
    let num = monomial_basis(bounds, Side::Num);
    let den = monomial_basis(bounds, Side::Den);
    let rows: Vec<Vec<f64>> = data
        .points
        .iter()
        .zip(&data.values)
        .map(|(x, &y)| {
            num.iter()
                .map(|e| monomial(x, e))
                .chain(den.iter().map(|e| -y * monomial(x, e)))
                .collect()
        })
        .collect();
    let mut m = Matrix::from_rows(&rows);
    if rows.is_empty() {
        m = Matrix::zeros(0, num.len() + den.len());
    }
    m
}

fn vandermonde(points: &[Vec<f64>], basis: &[Exponents]) -> Matrix {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|x| basis.iter().map(|e| monomial(x, e)).collect())
        .collect();
    if rows.is_empty() {
        Matrix::zeros(0, basis.len())
    } else {
        Matrix::from_rows(&rows)
    }
}

fn check(data: &FitData, bounds: &DegreeBounds) -> Result<(), FitError> {
    if data.is_empty() {
        return Err(FitError::NoSamples);
    }
    if bounds.num_vars() != data.variables.len() {
        return Err(FitError::DimensionMismatch {
            expected: data.variables.len(),
            found: bounds.num_vars(),
        });
    }
    Ok(())
}

/// `c_e / prod(s_i^e_i)`: maps a coefficient on scaled variables back to the
/// original ones.
fn unscale(c: f64, exps: &[u32], var_scales: &[f64]) -> f64 {
    c / monomial(var_scales, exps)
}

/// With a one-dimensional numerical null space this is the smallest right
/// singular vector. When truncation leaves several null directions, the
/// constant denominator coefficient is projected onto their span; the
/// smallest vector is the fallback if that projection vanishes.
fn null_space_solution(dec: &Svd, rank: usize, den_offset: usize) -> Vec<f64> {
    let n = dec.v.cols();
    let first_null = rank.min(n - 1);
    if first_null + 1 == n {
        return dec.smallest_right_vector();
    }
    let mut c = alloc::vec![0.0; n];
    for k in first_null..n {
        let w = dec.v[(den_offset, k)];
        for (ci, i) in c.iter_mut().zip(0..n) {
            *ci += w * dec.v[(i, k)];
        }
    }
    let len = norm2(&c);
    if len <= 1e-8 {
        return dec.smallest_right_vector();
    }
    c.iter().map(|x| x / len).collect()
}

/// Homogeneous least squares: the unit vector minimizing `‖A c‖₂`, read off
/// as the right singular vector of the smallest singular value, taken within
/// the numerical null space when `rank_tol` truncates more than one direction.
///
/// The sample matrix is built on variables and values divided by their
/// maximum magnitudes; the returned coefficients are mapped back to the
/// original variables and then normalized.
pub fn fit_rational(
    data: &FitData,
    bounds: &DegreeBounds,
    rank_tol: f64,
) -> Result<(RationalFunction, FitReport), FitError> {
    check(data, bounds)?;
    let (var_scales, value_scale) = data.scales();
    let scaled = data.scaled(&var_scales, value_scale);
    let a = build_sample_matrix(&scaled, bounds);
    let dec = svd(&a)?;

    let num_basis = monomial_basis(bounds, Side::Num);
    let den_basis = monomial_basis(bounds, Side::Den);
    let numerical_rank = dec.rank(rank_tol);
    let c = null_space_solution(&dec, numerical_rank, num_basis.len());
    let (cn, cd) = c.split_at(num_basis.len());

    let num_coeffs = num_basis
        .iter()
        .zip(cn)
        .map(|(e, &c)| value_scale * unscale(c, e, &var_scales))
        .collect();
    let den_coeffs: Vec<f64> = den_basis
        .iter()
        .zip(cd)
        .map(|(e, &c)| unscale(c, e, &var_scales))
        .collect();

    let scaled_den_norm = norm2(cd);
    if scaled_den_norm <= 1e-10 * norm2(&c) {
        return Err(FitError::DegenerateFit);
    }

    let mut f = RationalFunction {
        num: Polynomial {
            variables: data.variables.clone(),
            basis: num_basis,
            coefficients: num_coeffs,
        },
        den: Polynomial {
            variables: data.variables.clone(),
            basis: den_basis,
            coefficients: den_coeffs,
        },
    };
    f.normalize();

    let cols = a.cols();
    let report = FitReport {
        residual_norm: *dec.sigma.last().unwrap_or(&0.0),
        numerical_rank,
        // one null direction is the solution itself
        truncated: numerical_rank + 1 < cols,
        singular_values: dec.sigma,
        holdout_relative_error: None,
    };
    Ok((f, report))
}

/// Minimum-norm least squares `p(x_k) ≈ y_k` through the truncated SVD
/// pseudo-inverse. `residual_norm` is `‖y - p(x)‖₂` in original units.
pub fn fit_polynomial(
    data: &FitData,
    caps: &[u32],
    rank_tol: f64,
) -> Result<(Polynomial, FitReport), FitError> {
    let bounds = DegreeBounds::polynomial(caps.into());
    check(data, &bounds)?;
    let (var_scales, value_scale) = data.scales();
    let scaled = data.scaled(&var_scales, value_scale);
    let basis = monomial_basis(&bounds, Side::Num);
    let a = vandermonde(&scaled.points, &basis);
    let dec = svd(&a)?;
    let rank = dec.rank(rank_tol);

    let mut x = alloc::vec![0.0; basis.len()];
    for k in 0..rank {
        let uk = dec.u.column(k);
        let coef = uk.iter().zip(&scaled.values).map(|(u, b)| u * b).sum::<f64>() / dec.sigma[k];
        for (xi, vi) in x.iter_mut().zip(dec.v.column(k)) {
            *xi += coef * vi;
        }
    }
    let coefficients = basis
        .iter()
        .zip(&x)
        .map(|(e, &c)| value_scale * unscale(c, e, &var_scales))
        .collect();
    let p = Polynomial {
        variables: data.variables.clone(),
        basis,
        coefficients,
    };
    let residual_norm = libm::sqrt(
        data.points
            .iter()
            .zip(&data.values)
            .map(|(pt, y)| {
                let r = y - p.eval(pt).unwrap_or(f64::NAN);
                r * r
            })
            .sum(),
    );
    let cols = a.cols();
    let report = FitReport {
        residual_norm,
        numerical_rank: rank,
        truncated: rank < cols,
        singular_values: dec.sigma,
        holdout_relative_error: None,
    };
    Ok((p, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Poisedness {
    pub rank: usize,
    pub basis_size: usize,
    /// `sigma_1 / sigma_rank`; infinite when the rank is 0.
    pub condition_estimate: f64,
}

impl Poisedness {
    pub fn is_poised(&self) -> bool {
        self.rank == self.basis_size
    }
}

/// Rank diagnostics of the numerator-basis Vandermonde block on the raw points.
pub fn poisedness_report(
    points: &[Vec<f64>],
    caps: &[u32],
    rank_tol: f64,
) -> Result<Poisedness, FitError> {
    if points.is_empty() {
        return Err(FitError::NoSamples);
    }
    let basis = monomial_basis(&DegreeBounds::polynomial(caps.into()), Side::Num);
    let dec = svd(&vandermonde(points, &basis))?;
    let rank = dec.rank(rank_tol);
    let condition_estimate = if rank == 0 {
        f64::INFINITY
    } else {
        dec.sigma[0] / dec.sigma[rank - 1]
    };
    Ok(Poisedness {
        rank,
        basis_size: basis.len(),
        condition_estimate,
    })
}

/// Largest `|f(x) - y| / |y|` over `data`; evaluation failures count as infinite.
pub fn max_relative_error(f: &RationalFunction, data: &FitData) -> f64 {
    data.points
        .iter()
        .zip(&data.values)
        .map(|(x, &y)| match f.eval(x) {
            Ok(v) => (v - y).abs() / y.abs().max(f64::MIN_POSITIVE),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn univariate(xs: &[f64], ys: &[f64]) -> FitData {
        FitData::new(
            vec!["x".to_string()],
            xs.iter().map(|&x| vec![x]).collect(),
            ys.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn sample_matrix_row_by_hand() {
        let data = univariate(&[1.0], &[2.0]);
        let a = build_sample_matrix(&data, &DegreeBounds::new(vec![1], vec![0]).unwrap());
        assert_eq!(a.row(0), [1.0, 1.0, -2.0]);
        let zero = univariate(&[3.0], &[0.0]);
        let a = build_sample_matrix(&zero, &DegreeBounds::new(vec![1], vec![1]).unwrap());
        assert_eq!(&a.row(0)[2..], [0.0, 0.0]);
    }

    #[test]
    fn collinear_points_are_rank_deficient() {
        let pts: Vec<Vec<f64>> = (1..=4).map(|k| vec![k as f64, 1.0]).collect();
        let p = poisedness_report(&pts, &[1, 1], DEFAULT_RANK_TOL).unwrap();
        assert_eq!((p.rank, p.basis_size), (2, 4));
        assert!(!p.is_poised());
    }

    #[test]
    fn distinct_univariate_points_are_poised() {
        let p = poisedness_report(&[vec![1.0], vec![2.0], vec![5.0]], &[2], DEFAULT_RANK_TOL)
            .unwrap();
        assert!(p.is_poised());
        assert!(p.condition_estimate.is_finite());
    }

    #[test]
    fn constant_data() {
        let data = univariate(&[1.0, 2.0, 3.0, 4.0], &[5.0; 4]);
        let (f, report) = fit_rational(&data, &DegreeBounds::uniform(1, 0, 0), 1e-10).unwrap();
        for x in [0.5, 10.0, -3.0] {
            assert!((f.eval(&[x]).unwrap() - 5.0).abs() < 1e-12);
        }
        assert!(report.residual_norm < 1e-12);
        assert!(!report.truncated);
    }

    #[test]
    fn line_through_three_points() {
        let data = univariate(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        let (p, report) = fit_polynomial(&data, &[1], DEFAULT_RANK_TOL).unwrap();
        assert!((p.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((p.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(report.residual_norm < 1e-12);
    }

    #[test]
    fn duplicate_points_take_rank_deficient_path() {
        let data = univariate(&[2.0, 2.0, 2.0], &[1.0, 1.0, 1.0]);
        let (p, report) = fit_polynomial(&data, &[1], DEFAULT_RANK_TOL).unwrap();
        assert!(report.truncated);
        assert_eq!(report.numerical_rank, 1);
        assert!((p.eval(&[2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(p.coefficients.iter().all(|c| c.is_finite()));
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let data = univariate(&[], &[]);
        assert_eq!(
            fit_rational(&data, &DegreeBounds::uniform(1, 1, 1), 1e-10).unwrap_err(),
            FitError::NoSamples
        );
        let data = univariate(&[1.0], &[1.0]);
        assert!(matches!(
            fit_rational(&data, &DegreeBounds::uniform(2, 1, 1), 1e-10),
            Err(FitError::DimensionMismatch { .. })
        ));
        assert_eq!(
            FitData::new(vec!["x".into()], vec![vec![1.0]], vec![f64::NAN]).unwrap_err(),
            FitError::NonFinite
        );
    }

    #[test]
    fn zero_values_force_degenerate_numerator_only() {
        // y ≡ 0: the numerator must vanish, the denominator is free
        let data = univariate(&[1.0, 2.0, 3.0], &[0.0; 3]);
        let (f, _) = fit_rational(&data, &DegreeBounds::uniform(1, 0, 0), 1e-10).unwrap();
        assert!(f.eval(&[7.0]).unwrap().abs() < 1e-12);
    }
}
