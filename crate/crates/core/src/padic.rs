//! ℓ-adic integers stored as (representative, precision) pairs, valuations,
//! and the quadratic character on F_ℓ.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime ℓ. Every construction in this crate is parametrized by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 3 && is_prime(p) && p < (1 << 31) {
            Ok(OddPrime(p))
        } else {
            Err(Error::NotOddPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn pow(self, e: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.0), e as usize)
    }

    /// ℓ^e as a u128, or `None` on overflow.
    pub fn checked_pow(self, e: u32) -> Option<u128> {
        (self.0 as u128).checked_pow(e)
    }

    /// Residue of `a` in [0, ℓ).
    pub fn residue(self, a: &BigInt) -> u64 {
        a.mod_floor(&self.to_bigint()).to_u64().unwrap()
    }
}

impl TryFrom<u64> for OddPrime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        OddPrime::new(p)
    }
}

impl From<OddPrime> for u64 {
    fn from(p: OddPrime) -> u64 {
        p.0
    }
}

impl fmt::Display for OddPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Largest e with ℓ^e | n; `None` stands for +∞ (n = 0).
pub fn val_ell(n: &BigInt, ell: OddPrime) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigUint::from(ell.get());
    let mut m = n.magnitude().clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(e);
        }
        m = q;
        e += 1;
    }
}

/// ℓ-adic valuation of n!.
pub fn val_factorial(n: u64, ell: OddPrime) -> u64 {
    let p = ell.get();
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// η(a) ∈ {−1, 0, 1}: the Legendre symbol of a mod ℓ, with η(0) = 0.
pub fn quadratic_character(a: &BigInt, ell: OddPrime) -> i8 {
    let p = ell.get();
    let r = ell.residue(a);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn quadratic_character_u64(a: u64, ell: OddPrime) -> i8 {
    quadratic_character(&BigInt::from(a), ell)
}

/// How many ℓ-adic digits of a value are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Precision {
    Exact,
    /// Known modulo ℓ^P with P ≥ 1.
    Mod(u32),
}

impl Precision {
    pub fn is_exact(self) -> bool {
        matches!(self, Precision::Exact)
    }

    pub fn digits(self) -> Option<u32> {
        match self {
            Precision::Exact => None,
            Precision::Mod(p) => Some(p),
        }
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Precision::Exact, Precision::Exact) => Ordering::Equal,
            (Precision::Exact, Precision::Mod(_)) => Ordering::Greater,
            (Precision::Mod(_), Precision::Exact) => Ordering::Less,
            (Precision::Mod(a), Precision::Mod(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Exact => write!(f, "exact"),
            Precision::Mod(p) => write!(f, "{p}"),
        }
    }
}

/// An element of ℤ_ℓ, either an exact integer or a residue mod ℓ^P.
///
/// Residues are kept reduced into [0, ℓ^P).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    representative: BigInt,
    precision: Precision,
}

impl PadicInt {
    pub fn exact(value: impl Into<BigInt>) -> Self {
        PadicInt { representative: value.into(), precision: Precision::Exact }
    }

    pub fn with_precision(value: impl Into<BigInt>, precision: Precision, ell: OddPrime) -> Result<Self> {
        match precision {
            Precision::Exact => Ok(PadicInt::exact(value)),
            Precision::Mod(0) => Err(Error::PrecisionExhausted("precision exponent must be at least 1".into())),
            Precision::Mod(p) => {
                let m = ell.pow(p);
                Ok(PadicInt { representative: value.into().mod_floor(&m), precision })
            }
        }
    }

    pub fn representative(&self) -> &BigInt {
        &self.representative
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_exact()
    }

    /// True when the value is ≡ 0 to all known digits.
    pub fn is_zero(&self, ell: OddPrime) -> bool {
        match self.precision {
            Precision::Exact => self.representative.is_zero(),
            Precision::Mod(p) => self.representative.mod_floor(&ell.pow(p)).is_zero(),
        }
    }

    pub fn is_unit(&self, ell: OddPrime) -> bool {
        ell.residue(&self.representative) != 0
    }

    /// Valuation when it is determined by the known digits.
    pub fn valuation(&self, ell: OddPrime) -> Option<u32> {
        let v = val_ell(&self.representative, ell);
        match (self.precision, v) {
            (Precision::Mod(p), Some(v)) if v < p => Some(v),
            (Precision::Mod(_), _) => None,
            (Precision::Exact, v) => v,
        }
    }

    /// The residue mod ℓ^n, in [0, ℓ^n).
    pub fn residue_mod_power(&self, ell: OddPrime, n: u32) -> Result<BigInt> {
        if let Precision::Mod(p) = self.precision {
            if n > p {
                return Err(Error::PrecisionExhausted(format!(
                    "value known mod {ell}^{p} but level {n} needs mod {ell}^{n}"
                )));
            }
        }
        Ok(self.representative.mod_floor(&ell.pow(n)))
    }

    /// Equality up to the common known precision.
    pub fn agrees_with(&self, other: &PadicInt, ell: OddPrime) -> bool {
        match self.precision.min(other.precision) {
            Precision::Exact => self.representative == other.representative,
            Precision::Mod(p) => {
                let m = ell.pow(p);
                self.representative.mod_floor(&m) == other.representative.mod_floor(&m)
            }
        }
    }

    pub fn add(&self, other: &PadicInt, ell: OddPrime) -> PadicInt {
        let precision = self.precision.min(other.precision);
        PadicInt::with_precision(&self.representative + &other.representative, precision, ell)
            .expect("precision of operands is valid")
    }

    pub fn neg(&self, ell: OddPrime) -> PadicInt {
        PadicInt::with_precision(-&self.representative, self.precision, ell).expect("precision is valid")
    }

    pub fn sub(&self, other: &PadicInt, ell: OddPrime) -> PadicInt {
        self.add(&other.neg(ell), ell)
    }

    pub fn abs_representative(&self) -> BigInt {
        self.representative.abs()
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            Precision::Exact => write!(f, "{}", self.representative),
            Precision::Mod(p) => write!(f, "{} (mod ell^{p})", self.representative),
        }
    }
}

/// n choose k for machine-size arguments, as a BigInt.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
