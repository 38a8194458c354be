//! Integer Laurent polynomials in x and truncated power series in T, linked by
//! the substitution x = 1 + T.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{OddPrime, Precision};

/// Σ c_k x^k over a finite range of integer exponents.
///
/// `coeffs[i]` is the coefficient of x^(low + i); both ends are nonzero
/// unless the polynomial is zero, in which case `coeffs` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        LaurentPoly::monomial(c, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, exponent: i64) -> Self {
        LaurentPoly::from_coefficients(exponent, vec![c.into()])
    }

    pub fn from_coefficients(low: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn low_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn high_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, exponent: i64) -> BigInt {
        let i = exponent - self.low;
        if i < 0 {
            return BigInt::zero();
        }
        self.coeffs.get(i as usize).cloned().unwrap_or_default()
    }

    /// Nonzero terms as (exponent, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.low + i as i64, c))
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    /// Value at x = 1.
    pub fn at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Coefficient of T^n in the expansion of this polynomial at x = 1 + T,
    /// using generalized binomials for negative exponents.
    pub fn t_coefficient(&self, n: u64) -> BigInt {
        self.terms().map(|(k, c)| c * generalized_binomial(&BigInt::from(k), n)).sum()
    }

    /// Coefficients of P(1 + T) for a polynomial P (no negative exponents).
    pub fn expand_at_one_plus_t(&self) -> Result<Vec<BigInt>> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        if self.low < 0 {
            return Err(Error::InvalidInput("negative exponents must be cleared before expanding".into()));
        }
        let degree = self.high_exponent().unwrap() as usize;
        let mut out: Vec<BigInt> = Vec::with_capacity(degree + 1);
        // Horner's rule in T: out ← out·(1+T) + c_k, from the top coefficient down.
        for k in (0..=degree).rev() {
            out.push(BigInt::zero());
            for i in (1..out.len()).rev() {
                let prev = out[i - 1].clone();
                out[i] += prev;
            }
            out[0] += self.coeff(k as i64);
        }
        Ok(out)
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let low = self.low.min(rhs.low);
        let high = self.high_exponent().unwrap().max(rhs.high_exponent().unwrap());
        let coeffs = (low..=high).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        LaurentPoly::from_coefficients(low, coeffs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        LaurentPoly::from_coefficients(self.low + rhs.low, coeffs)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "x^{k}")?,
                _ => write!(f, "{mag}x^{k}")?,
            }
        }
        Ok(())
    }
}

/// C(a, n) = a(a−1)…(a−n+1)/n! for any integer a.
pub fn generalized_binomial(a: &BigInt, n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..n {
        acc = acc * (a - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// Whether every coefficient that could matter beyond the window is
/// accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    /// The window reaches past the degree of the distinguished factor, so the
    /// invariants read off it are exact.
    Complete,
    /// Only a prefix is known.
    Prefix,
}

/// β₀ + β₁T + … + β_D T^D, exact or modulo ℓ^P.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ell: OddPrime,
    coeffs: Vec<BigInt>,
    precision: Precision,
    window: Window,
}

impl TruncatedSeries {
    /// `coeffs` is padded or cut to length `degree_cap + 1`.
    pub fn new(ell: OddPrime, mut coeffs: Vec<BigInt>, degree_cap: usize, precision: Precision, window: Window) -> Self {
        coeffs.resize(degree_cap + 1, BigInt::zero());
        if let Precision::Mod(p) = precision {
            let m = ell.pow(p);
            for c in coeffs.iter_mut() {
                *c = c.mod_floor(&m);
            }
        }
        TruncatedSeries { ell, coeffs, precision, window }
    }

    pub fn zero(ell: OddPrime, degree_cap: usize, precision: Precision) -> Self {
        TruncatedSeries::new(ell, Vec::new(), degree_cap, precision, Window::Prefix)
    }

    pub fn one(ell: OddPrime, degree_cap: usize, precision: Precision) -> Self {
        TruncatedSeries::new(ell, vec![BigInt::one()], degree_cap, precision, Window::Prefix)
    }

    pub fn constant(ell: OddPrime, c: impl Into<BigInt>, degree_cap: usize, precision: Precision) -> Self {
        TruncatedSeries::new(ell, vec![c.into()], degree_cap, precision, Window::Prefix)
    }

    pub fn ell(&self) -> OddPrime {
        self.ell
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> BigInt {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    /// Coefficients reduced into (−ℓ^P/2, ℓ^P/2] when the precision is finite.
    pub fn balanced_coefficients(&self) -> Vec<BigInt> {
        match self.precision {
            Precision::Exact => self.coeffs.clone(),
            Precision::Mod(p) => {
                let m = self.ell.pow(p);
                let half = &m / 2;
                self.coeffs.iter().map(|c| if c > &half { c - &m } else { c.clone() }).collect()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    /// Reduces to a coarser precision and/or a shorter window.
    pub fn reduced(&self, precision: Precision, degree_cap: usize) -> Self {
        let p = self.precision.min(precision);
        let d = degree_cap.min(self.degree_cap());
        TruncatedSeries::new(self.ell, self.coeffs[..=d].to_vec(), d, p, Window::Prefix)
    }

    fn combine_meta(&self, other: &TruncatedSeries) -> (usize, Precision) {
        assert_eq!(self.ell, other.ell, "series over different primes");
        (self.degree_cap().min(other.degree_cap()), self.precision.min(other.precision))
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let (d, p) = self.combine_meta(other);
        let coeffs = (0..=d).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect();
        TruncatedSeries::new(self.ell, coeffs, d, p, Window::Prefix)
    }

    pub fn neg(&self) -> TruncatedSeries {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        TruncatedSeries::new(self.ell, coeffs, self.degree_cap(), self.precision, Window::Prefix)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let (d, p) = self.combine_meta(other);
        let mut coeffs = vec![BigInt::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(d + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries::new(self.ell, coeffs, d, p, Window::Prefix)
    }

    /// f(g(T)) for g with zero constant term, truncated at the common degree.
    pub fn compose(&self, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::InvalidInput("inner series must have zero constant term".into()));
        }
        let (d, p) = self.combine_meta(inner);
        let mut acc = TruncatedSeries::zero(self.ell, d, p);
        for n in (0..=d).rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] += &self.coeffs[n];
            acc = TruncatedSeries::new(self.ell, acc.coeffs, d, p, Window::Prefix);
        }
        Ok(acc)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.balanced_coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}T")?,
                _ => write!(f, "{mag}T^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(T^{})", self.degree_cap() + 1)?;
        if let Precision::Mod(p) = self.precision {
            write!(f, " (mod {}^{p})", self.ell)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn three() -> OddPrime {
        OddPrime::new(3).unwrap()
    }

    #[test]
    fn laurent_normalization_and_arithmetic() {
        let p = LaurentPoly::from_coefficients(-2, big(&[0, 1, 0, 3, 0]));
        assert_eq!(p.low_exponent(), Some(-1));
        assert_eq!(p.high_exponent(), Some(1));
        assert_eq!(p.coeff(1), BigInt::from(3));
        let q = &p - &p;
        assert!(q.is_zero());
        let sq = &p * &p; // x^-2 + 6 + 9x^2
        assert_eq!(sq, LaurentPoly::from_coefficients(-2, big(&[1, 0, 6, 0, 9])));
        assert_eq!(sq.at_one(), BigInt::from(16));
        assert_eq!(p.to_string(), "x^-1 + 3x^1");
    }

    #[test]
    fn expansion_at_one_plus_t() {
        // x^3 = 1 + 3T + 3T^2 + T^3
        let p = LaurentPoly::monomial(1, 3);
        assert_eq!(p.expand_at_one_plus_t().unwrap(), big(&[1, 3, 3, 1]));
        assert!(LaurentPoly::monomial(1, -1).expand_at_one_plus_t().is_err());
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(generalized_binomial(&BigInt::from(-1), 5), BigInt::from(-1));
        assert_eq!(generalized_binomial(&BigInt::from(-2), 3), BigInt::from(-4));
        assert_eq!(generalized_binomial(&BigInt::from(5), 7), BigInt::zero());
        assert_eq!(generalized_binomial(&BigInt::from(10), 3), BigInt::from(120));
    }

    #[test]
    fn t_coefficient_of_bouquet_entry() {
        // 2 − x − x⁻¹ = −T² + T³ − T⁴ + …
        let f = &(&LaurentPoly::constant(2) - &LaurentPoly::monomial(1, 1)) - &LaurentPoly::monomial(1, -1);
        let got: Vec<BigInt> = (0..6).map(|n| f.t_coefficient(n)).collect();
        assert_eq!(got, big(&[0, 0, -1, 1, -1, 1]));
    }

    #[test]
    fn series_reduction_and_display() {
        let ell = OddPrime::new(5).unwrap();
        let s = TruncatedSeries::new(ell, big(&[7, -1, 30]), 3, Precision::Mod(1), Window::Prefix);
        assert_eq!(s.coefficients(), &big(&[2, 4, 0, 0])[..]);
        assert_eq!(s.balanced_coefficients(), big(&[2, -1, 0, 0]));
        assert_eq!(s.to_string(), "2 - 1T + O(T^4) (mod 5^1)");
    }

    #[test]
    fn composition_with_inverse_shift() {
        // T̃ = (1+T)^{-1} − 1 is an involution: T̃(T̃) = T.
        let d = 8;
        let inv: Vec<BigInt> = (0..=d).map(|n| if n == 0 { BigInt::zero() } else if n % 2 == 1 { -BigInt::one() } else { BigInt::one() }).collect();
        let shift = TruncatedSeries::new(three(), inv, d, Precision::Exact, Window::Prefix);
        let twice = shift.compose(&shift).unwrap();
        let mut t = vec![BigInt::zero(); d + 1];
        t[1] = BigInt::one();
        assert_eq!(twice.coefficients(), &t[..]);
    }

    proptest! {
        #[test]
        fn t_coefficients_match_cleared_expansion(low in -5i64..3, cs in proptest::collection::vec(-9i64..10, 1..7)) {
            let p = LaurentPoly::from_coefficients(low, big(&cs));
            prop_assume!(!p.is_zero());
            let b = (-p.low_exponent().unwrap()).max(0);
            let cleared = p.shift(b).expand_at_one_plus_t().unwrap();
            // (1+T)^{-b} times the cleared expansion, compared termwise.
            let d = cleared.len() + 3;
            let unit: Vec<BigInt> = (0..=d as u64).map(|n| generalized_binomial(&BigInt::from(-b), n)).collect();
            let ell = three();
            let a = TruncatedSeries::new(ell, cleared, d, Precision::Exact, Window::Prefix);
            let u = TruncatedSeries::new(ell, unit, d, Precision::Exact, Window::Prefix);
            let prod = a.mul(&u);
            for n in 0..=d {
                prop_assert_eq!(prod.coeff(n), p.t_coefficient(n as u64));
            }
        }

        #[test]
        fn laurent_multiplication_is_evaluation_compatible(a in proptest::collection::vec(-5i64..6, 1..5), b in proptest::collection::vec(-5i64..6, 1..5), la in -3i64..3, lb in -3i64..3) {
            let p = LaurentPoly::from_coefficients(la, big(&a));
            let q = LaurentPoly::from_coefficients(lb, big(&b));
            prop_assert_eq!((&p * &q).at_one(), p.at_one() * q.at_one());
            prop_assert_eq!((&p + &q).at_one(), p.at_one() + q.at_one());
        }
    }
}
