//! Exact Sturm sequence for the polynomial whose sign on `[-1, 1]` decides
//! the monotonicity of the period function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial with exact rational coefficients, lowest degree first, no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

/// The exact rational `n / d`.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    /// From `(numerator, denominator)` pairs, lowest degree first.
    pub fn from_fractions(coeffs: &[(i64, i64)]) -> Self {
        Self::new(coeffs.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    /// Quotient and remainder of Euclidean division by a nonzero `d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let lead = d.0.last().unwrap();
        let dd = d.degree();
        if rem.len() < d.0.len() {
            return (Poly::new(Vec::new()), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            for (i, dc) in d.0.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &Poly, k: usize| p.0.get(k).cloned().unwrap_or_else(BigRational::zero);
        Poly::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }
}

/// `P(x) = x^8 - 32/7 x^6 + 59/7 x^4 - 8 x^2 - 6/7`.
pub fn chicone_polynomial() -> Poly {
    Poly::from_fractions(&[(-6, 7), (0, 1), (-8, 1), (0, 1), (59, 7), (0, 1), (-32, 7), (0, 1), (1, 1)])
}

/// The chain `P0 = P`, `P1 = P'`, `P_{k+1} = -rem(P_{k-1}, P_k)`, stopped
/// at the last nonzero remainder.
#[derive(Debug, Clone)]
pub struct SturmChain {
    pub polynomials: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let mut polynomials = vec![p.clone(), p.derivative()];
        loop {
            let n = polynomials.len();
            if polynomials[n - 1].is_zero() {
                polynomials.pop();
                break;
            }
            let (_, r) = polynomials[n - 2].div_rem(&polynomials[n - 1]);
            if r.is_zero() {
                break;
            }
            polynomials.push(r.neg());
        }
        Self { polynomials }
    }

    /// Checks `P_{k-1} = Q_k P_k - P_{k+1}` with `deg P_{k+1} < deg P_k` for every link.
    pub fn verify(&self) -> bool {
        let ps = &self.polynomials;
        if ps.len() < 2 || ps[1] != ps[0].derivative() {
            return false;
        }
        ps.windows(3).all(|w| {
            let (q, r) = w[0].div_rem(&w[1]);
            r == w[2].neg() && w[2].degree() < w[1].degree() && q.mul(&w[1]).add(&w[2].neg()) == w[0]
        })
    }

    /// Signs (`-1`, `0`, `1`) of every chain member at `x`.
    pub fn signs_at(&self, x: &BigRational) -> Vec<i8> {
        self.polynomials
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    /// Sign changes at `x`, zeros skipped.
    pub fn sign_changes(&self, x: &BigRational) -> usize {
        let signs: Vec<i8> = self.signs_at(x).into_iter().filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn root_count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.sign_changes(a) - self.sign_changes(b)
    }
}

/// True when the polynomial has no root in `[-1, 1]` and is negative at 0,
/// so it is negative on the whole interval.
pub fn chicone_certificate() -> bool {
    let p = chicone_polynomial();
    let chain = SturmChain::new(&p);
    let one = BigRational::one();
    let minus_one = -BigRational::one();
    chain.verify()
        && !p.eval(&minus_one).is_zero()
        && chain.root_count(&minus_one, &one) == 0
        && p.eval(&BigRational::zero()).is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_f64(x: &BigRational) -> f64 {
        use num_traits::ToPrimitive;
        x.to_f64().unwrap()
    }

    #[test]
    fn certificate_holds() {
        assert!(chicone_certificate());
    }

    #[test]
    fn values_at_special_points() {
        let p = chicone_polynomial();
        assert_eq!(p.eval(&BigRational::zero()), rational(-6, 7));
        assert_eq!(p.eval(&BigRational::one()), rational(-4, 1));
        assert_eq!(p.eval(&-BigRational::one()), rational(-4, 1));
    }

    #[test]
    fn chain_signs_match_the_printed_table() {
        let chain = SturmChain::new(&chicone_polynomial());
        assert_eq!(chain.polynomials.len(), 9);
        assert!(chain.verify());
        assert_eq!(chain.signs_at(&-BigRational::one()), vec![-1, 1, 1, -1, -1, 1, 1, -1, -1]);
        assert_eq!(chain.signs_at(&BigRational::one()), vec![-1, -1, 1, 1, -1, -1, 1, 1, -1]);
        assert_eq!(chain.sign_changes(&-BigRational::one()), 4);
        assert_eq!(chain.sign_changes(&BigRational::one()), 4);
    }

    #[test]
    fn third_member_is_the_printed_one() {
        let chain = SturmChain::new(&chicone_polynomial());
        let expected = Poly::from_fractions(&[(6, 7), (0, 1), (6, 1), (0, 1), (-59, 14), (0, 1), (8, 7)]);
        assert_eq!(chain.polynomials[2], expected);
    }

    #[test]
    fn counts_roots_of_a_known_polynomial() {
        // (x^2 - 1/4)(x^2 - 4) = x^4 - 17/4 x^2 + 1
        let p = Poly::from_fractions(&[(1, 1), (0, 1), (-17, 4), (0, 1), (1, 1)]);
        let chain = SturmChain::new(&p);
        assert!(chain.verify());
        assert_eq!(chain.root_count(&rational(-1, 1), &rational(1, 1)), 2);
        assert_eq!(chain.root_count(&rational(-3, 1), &rational(3, 1)), 4);
        assert_eq!(chain.root_count(&rational(1, 1), &rational(3, 2)), 0);
    }

    #[test]
    fn negative_on_the_interval_by_sampling() {
        let p = chicone_polynomial();
        for k in 0..=200 {
            let x = rational(k - 100, 100);
            assert!(to_f64(&p.eval(&x)) < 0.0);
        }
    }
}
