//! Exact rational numbers in canonical form.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use alloc::string::ToString;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// An arbitrary-precision rational, always gcd-reduced with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `None` when `den` is zero.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        Self::from_parts(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_parts(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(Rational(BigRational::new(num, den)))
        }
    }

    /// Exact conversion of a finite binary64 value.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_f64(x).map(Rational)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Mathematical floor, so `floor(-7/2) = -4`.
    pub fn floor(&self) -> Self {
        Rational(BigRational::from_integer(self.numer().div_floor(self.denom())))
    }

    pub fn ceil(&self) -> Self {
        Rational(BigRational::from_integer(-((-self.numer()).div_floor(self.denom()))))
    }

    /// Exact quotient; `None` on a zero divisor.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    /// `floor(self / rhs)`.
    pub fn floor_div(&self, rhs: &Rational) -> Option<Rational> {
        self.checked_div(rhs).map(|q| q.floor())
    }

    /// `ceil(self / rhs)`.
    pub fn ceil_div(&self, rhs: &Rational) -> Option<Rational> {
        self.checked_div(rhs).map(|q| q.ceil())
    }

    /// Euclidean quotient: the integer `q` with `self = q*rhs + r`, `0 <= r < |rhs|`.
    pub fn euclid_quot(&self, rhs: &Rational) -> Option<Rational> {
        let q = self.checked_div(rhs)?;
        Some(if rhs.is_negative() { q.ceil() } else { q.floor() })
    }

    pub fn euclid_rem(&self, rhs: &Rational) -> Option<Rational> {
        let q = self.euclid_quot(rhs)?;
        Some(self - &(&q * rhs))
    }

    /// Nearest binary64 value.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn min<'a>(&'a self, other: &'a Rational) -> &'a Rational {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// Always `num/den`, even for integers.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub alloc::string::String);

/// Accepts `n` or `n/d` with optional leading `-` on the numerator.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let digits = |t: &str| {
            let body = t.strip_prefix('-').unwrap_or(t);
            !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        if !digits(n) || !digits(d) || d.starts_with('-') {
            return Err(err());
        }
        let num: BigInt = n.parse().map_err(|_| err())?;
        let den: BigInt = d.parse().map_err(|_| err())?;
        Rational::from_parts(num, den).ok_or_else(err)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        *self == Rational::from_integer(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_integer(*other)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn canonical_form() {
        let x = r(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(r(0, 7), Rational::zero());
        assert_eq!(Rational::zero().denom(), &BigInt::from(1));
        assert!(Rational::new(1, 0).is_none());
    }

    #[test]
    fn floor_and_ceil_of_negatives() {
        assert_eq!(r(-7, 2).floor(), -4);
        assert_eq!(r(-7, 2).ceil(), -3);
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(7, 2).ceil(), 4);
        assert_eq!(r(6, 2).ceil(), 3);
    }

    #[test]
    fn euclidean_division() {
        let (a, b) = (r(7, 1), r(2, 1));
        assert_eq!(a.euclid_quot(&b).unwrap(), 3);
        assert_eq!(a.euclid_rem(&b).unwrap(), 1);
        // remainder is non-negative for every sign combination
        for (a, b) in [(-7, 2), (7, -2), (-7, -2)] {
            let (a, b) = (r(a, 1), r(b, 1));
            let q = a.euclid_quot(&b).unwrap();
            let rem = a.euclid_rem(&b).unwrap();
            assert!(rem >= 0 && rem < b.abs());
            assert_eq!(&(&q * &b) + &rem, a);
        }
        assert!(a.euclid_quot(&Rational::zero()).is_none());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("7".parse::<Rational>().unwrap(), 7);
        assert_eq!("-3/6".parse::<Rational>().unwrap(), r(-1, 2));
        assert_eq!(r(-1, 2).to_string(), "-1/2");
        assert_eq!(Rational::from_integer(5).to_string(), "5/1");
        for bad in ["", "x", "1/0", "1/-2", "1.5", "--1", "1/"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn f64_conversion_is_exact() {
        let x = Rational::from_f64(0.1).unwrap();
        assert_eq!(x.to_f64(), 0.1);
        assert_ne!(x, r(1, 10));
        assert!(Rational::from_f64(f64::NAN).is_none());
    }
}
