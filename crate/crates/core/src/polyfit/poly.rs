use alloc::string::String;
use alloc::vec::Vec;

use super::basis::{grid, DegreeBounds, Exponents};
use super::FitError;

/// `x^e` by repeated squaring.
pub fn powu(x: f64, mut e: u32) -> f64 {
    let (mut base, mut acc) = (x, 1.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

pub fn monomial(point: &[f64], exps: &[u32]) -> f64 {
    point.iter().zip(exps).map(|(&x, &e)| powu(x, e)).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub variables: Vec<String>,
    pub basis: Vec<Exponents>,
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    /// Coefficients aligned with the graded-lex grid bounded by `caps`.
    pub fn on_grid(variables: Vec<String>, caps: &[u32], coefficients: Vec<f64>) -> Option<Self> {
        let basis = grid(caps);
        (caps.len() == variables.len() && basis.len() == coefficients.len()).then_some(Polynomial {
            variables,
            basis,
            coefficients,
        })
    }

    pub fn constant(variables: Vec<String>, c: f64) -> Self {
        let n = variables.len();
        Polynomial {
            variables,
            basis: alloc::vec![alloc::vec![0; n]],
            coefficients: alloc::vec![c],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Largest exponent of each variable over the basis.
    pub fn degree_caps(&self) -> Vec<u32> {
        (0..self.num_vars())
            .map(|i| self.basis.iter().map(|e| e[i]).max().unwrap_or(0))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, FitError> {
        if point.len() != self.num_vars() {
            return Err(FitError::DimensionMismatch {
                expected: self.num_vars(),
                found: point.len(),
            });
        }
        Ok(self
            .basis
            .iter()
            .zip(&self.coefficients)
            .map(|(e, &c)| c * monomial(point, e))
            .sum())
    }
}

/// `num / den` over a shared variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, FitError> {
        if num.variables != den.variables {
            return Err(FitError::VariableMismatch);
        }
        if den.is_zero() {
            return Err(FitError::DegenerateFit);
        }
        Ok(RationalFunction { num, den })
    }

    /// A polynomial viewed as a rational function with denominator 1.
    pub fn from_polynomial(num: Polynomial) -> Self {
        let den = Polynomial::constant(num.variables.clone(), 1.0);
        RationalFunction { num, den }
    }

    pub fn variables(&self) -> &[String] {
        &self.num.variables
    }

    pub fn bounds(&self) -> DegreeBounds {
        DegreeBounds {
            num: self.num.degree_caps(),
            den: self.den.degree_caps(),
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, FitError> {
        let p = self.num.eval(point)?;
        let q = self.den.eval(point)?;
        if q.abs() < 1e-12 * p.abs().max(1.0) {
            return Err(FitError::DenominatorNearZero);
        }
        Ok(p / q)
    }

    /// Scales `(num ‖ den)` to unit 2-norm with the first nonzero
    /// denominator coefficient positive.
    pub fn normalize(&mut self) {
        let norm = libm::sqrt(
            self.num
                .coefficients
                .iter()
                .chain(&self.den.coefficients)
                .map(|c| c * c)
                .sum(),
        );
        if norm == 0.0 {
            return;
        }
        let sign = self
            .den
            .coefficients
            .iter()
            .find(|&&c| c != 0.0)
            .map_or(1.0, |&c| if c < 0.0 { -1.0 } else { 1.0 });
        let k = sign / norm;
        for c in self
            .num
            .coefficients
            .iter_mut()
            .chain(self.den.coefficients.iter_mut())
        {
            *c *= k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn x() -> Vec<String> {
        vec!["x".to_string()]
    }

    #[test]
    fn eval_linear() {
        let p = Polynomial::on_grid(x(), &[1], vec![1.0, 2.0]).unwrap();
        assert_eq!(p.eval(&[3.0]).unwrap(), 7.0);
        let zero = Polynomial::on_grid(x(), &[2], vec![0.0; 3]).unwrap();
        assert_eq!(zero.eval(&[-4.5]).unwrap(), 0.0);
        assert!(matches!(
            p.eval(&[1.0, 2.0]),
            Err(FitError::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn eval_ratfunc() {
        let f = RationalFunction::new(
            Polynomial::on_grid(x(), &[2], vec![1.0, 0.0, 1.0]).unwrap(),
            Polynomial::on_grid(x(), &[1], vec![2.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(f.eval(&[2.0]).unwrap(), 1.25);
        assert_eq!(f.eval(&[-2.0]), Err(FitError::DenominatorNearZero));
        assert_eq!(f.bounds(), DegreeBounds::new(vec![2], vec![1]).unwrap());
    }

    #[test]
    fn zero_denominator_rejected() {
        let zero = Polynomial::on_grid(x(), &[1], vec![0.0, 0.0]).unwrap();
        let one = Polynomial::constant(x(), 1.0);
        assert_eq!(
            RationalFunction::new(one, zero),
            Err(FitError::DegenerateFit)
        );
    }

    #[test]
    fn normalization_preserves_values() {
        let mut f = RationalFunction::new(
            Polynomial::on_grid(x(), &[1], vec![3.0, -1.0]).unwrap(),
            Polynomial::on_grid(x(), &[1], vec![0.0, -2.0]).unwrap(),
        )
        .unwrap();
        let before = f.eval(&[5.0]).unwrap();
        f.normalize();
        assert!((f.eval(&[5.0]).unwrap() - before).abs() < 1e-15);
        assert!(f.den.coefficients[1] > 0.0);
        let norm: f64 = f
            .num
            .coefficients
            .iter()
            .chain(&f.den.coefficients)
            .map(|c| c * c)
            .sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn powu_matches_repeated_product() {
        for e in 0..12 {
            let naive: f64 = (0..e).map(|_| 1.7).product();
            assert!((powu(1.7, e) - naive).abs() <= 1e-12 * naive);
        }
    }
}
