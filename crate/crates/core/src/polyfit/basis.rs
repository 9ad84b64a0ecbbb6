use alloc::vec;
use alloc::vec::Vec;

/// Monomial exponents, one entry per variable.
pub type Exponents = Vec<u32>;

/// Per-variable exponent caps for numerator and denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBounds {
    pub num: Vec<u32>,
    pub den: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Num,
    Den,
}

impl DegreeBounds {
    pub fn new(num: Vec<u32>, den: Vec<u32>) -> Option<Self> {
        (num.len() == den.len()).then_some(DegreeBounds { num, den })
    }

    /// The same caps `u` and `v` on every one of `n` variables.
    pub fn uniform(n: usize, u: u32, v: u32) -> Self {
        DegreeBounds {
            num: vec![u; n],
            den: vec![v; n],
        }
    }

    /// Denominator fixed to the constant 1.
    pub fn polynomial(num: Vec<u32>) -> Self {
        let den = vec![0; num.len()];
        DegreeBounds { num, den }
    }

    pub fn num_vars(&self) -> usize {
        self.num.len()
    }

    pub fn side(&self, side: Side) -> &[u32] {
        match side {
            Side::Num => &self.num,
            Side::Den => &self.den,
        }
    }
}

/// All exponent tuples bounded componentwise by `bounds`, in graded
/// lexicographic order: ascending total degree, ties broken by ascending
/// lexicographic comparison of the tuples. The constant monomial comes first.
pub fn monomial_basis(bounds: &DegreeBounds, side: Side) -> Vec<Exponents> {
    grid(bounds.side(side))
}

pub fn grid(caps: &[u32]) -> Vec<Exponents> {
    let mut out: Vec<Exponents> = vec![Vec::new()];
    for &cap in caps {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=cap).map(move |e| {
                    let mut t = prefix.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out.sort_by(|a, b| {
        let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
        da.cmp(&db).then_with(|| a.cmp(b))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate() {
        let b = DegreeBounds::new(vec![2], vec![0]).unwrap();
        assert_eq!(monomial_basis(&b, Side::Num), [[0], [1], [2]]);
        assert_eq!(monomial_basis(&b, Side::Den), [[0]]);
    }

    #[test]
    fn bivariate_graded_lex() {
        let b = DegreeBounds::uniform(2, 1, 1);
        assert_eq!(
            monomial_basis(&b, Side::Num),
            [[0, 0], [0, 1], [1, 0], [1, 1]]
        );
    }

    #[test]
    fn trivariate_count_matches_product() {
        let b = DegreeBounds::new(vec![2, 1, 1], vec![0, 0, 0]).unwrap();
        let basis = monomial_basis(&b, Side::Num);
        assert_eq!(basis.len(), 3 * 2 * 2);
        assert!(basis.iter().all(|e| e[0] <= 2 && e[1] <= 1 && e[2] <= 1));
        assert_eq!(basis[0], [0, 0, 0]);
        assert_eq!(basis.last().unwrap(), &[2, 1, 1]);
    }

    #[test]
    fn zero_variables() {
        let b = DegreeBounds::uniform(0, 3, 3);
        assert_eq!(monomial_basis(&b, Side::Num), [Vec::<u32>::new()]);
    }
}
