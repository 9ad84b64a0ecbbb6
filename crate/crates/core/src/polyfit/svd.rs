//! One-sided Jacobi singular value decomposition.
//!
//! Columns of a working copy of `A` are rotated pairwise until mutually
//! orthogonal; the accumulated rotations form `V` and the final column norms
//! are the singular values. The method keeps small singular values accurate
//! relative to column scaling, which matters for the badly scaled
//! Vandermonde-like sample matrices the fitter produces.

use alloc::vec::Vec;

use super::matrix::Matrix;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SvdError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// `A = U diag(sigma) V^T` with `U` m×n, `V` n×n orthogonal, and `sigma`
/// non-increasing. When `m < n` the trailing singular values are zero and the
/// matching `U` columns are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
    pub sweeps: usize,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.sigma.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.mul(&self.v.transpose())
    }

    /// Number of singular values strictly above `rel_tol * sigma_1`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * top).count()
    }

    /// Right singular vector for the smallest singular value.
    pub fn smallest_right_vector(&self) -> Vec<f64> {
        self.v.column(self.v.cols() - 1)
    }
}

pub fn svd(a: &Matrix) -> Result<Svd, SvdError> {
    if !a.is_finite() {
        return Err(SvdError::NonFinite);
    }
    let (m, n) = (a.rows(), a.cols());
    // column-major working copies for cache-friendly rotations
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let frob = a.frobenius_norm();
    // columns this small carry no information above rounding level
    let negligible = {
        let t = f64::EPSILON * 1e-3 * frob;
        t * t
    };
    let tol = f64::EPSILON * libm::sqrt(m.max(1) as f64);

    let mut sweeps = 0;
    loop {
        if sweeps == MAX_SWEEPS {
            return Err(SvdError::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&w[p], &w[q]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for i in 0..m {
                        alpha += cp[i] * cp[i];
                        beta += cq[i] * cq[i];
                        gamma += cp[i] * cq[i];
                    }
                    (alpha, beta, gamma)
                };
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                if gamma.abs() <= tol * libm::sqrt(alpha) * libm::sqrt(beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = w.iter().map(|col| super::matrix::norm2(col)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let s = sigma[j];
        for i in 0..m {
            u[(i, k)] = if s > 0.0 { w[j][i] / s } else { 0.0 };
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    sigma = order.iter().map(|&j| sigma[j]).collect();

    Ok(Svd {
        u,
        sigma,
        v: vm,
        sweeps,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}
