//! Bouquets X_t (one vertex, t loops): power-sum criteria for μ and λ, the
//! shifted Chebyshev criterion for μ > 0, and a family with prescribed μ, λ.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::char_series::{CharacteristicSeries, MAX_EXACT_EXPONENT};
use crate::error::{Error, Result};
use crate::invariants::{mu_lambda, MuLambda};
use crate::multigraph::Multigraph;
use crate::padic::{quadratic_character, OddPrime};
use crate::series::LaurentPoly;
use crate::voltage::VoltageAssignment;

/// An integer voltage on the bouquet with t ≥ 2 loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BouquetVoltage {
    ell: OddPrime,
    alpha: Vec<BigInt>,
}

impl BouquetVoltage {
    pub fn new(ell: OddPrime, alpha: Vec<BigInt>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::ZeroEulerCharacteristic);
        }
        Ok(BouquetVoltage { ell, alpha })
    }

    pub fn from_i64(ell: OddPrime, alpha: &[i64]) -> Result<Self> {
        BouquetVoltage::new(ell, alpha.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn ell(&self) -> OddPrime {
        self.ell
    }

    pub fn t(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[BigInt] {
        &self.alpha
    }

    /// Some coordinate is a unit mod ℓ.
    pub fn is_admissible(&self) -> bool {
        self.alpha.iter().any(|a| self.ell.residue(a) != 0)
    }

    pub fn graph(&self) -> Multigraph {
        Multigraph::bouquet(self.t())
    }

    pub fn voltage(&self) -> VoltageAssignment {
        VoltageAssignment::from_integers(&self.graph(), self.ell, &self.alpha).expect("one value per loop")
    }

    /// f(T) = Σ_k (2 − x^α_k − x^−α_k) at x = 1+T, built without the
    /// matrix machinery.
    pub fn series(&self) -> Result<CharacteristicSeries> {
        let mut det = LaurentPoly::zero();
        let mut widest = 0i64;
        for a in &self.alpha {
            let a = a
                .to_i64()
                .filter(|x| x.abs() <= MAX_EXACT_EXPONENT)
                .ok_or_else(|| Error::RangeError(format!("voltage {a} is too large for the exact path")))?;
            widest = widest.max(a.abs());
            det = &det + &loop_term(a);
        }
        let sum_abs: BigInt = self.alpha.iter().map(|a| a.abs()).sum();
        let cap = (2 * sum_abs.to_usize().unwrap_or(usize::MAX / 4) + 2).max(8);
        CharacteristicSeries::from_determinant(self.ell, det, widest as u64, cap)
    }

    pub fn mu_lambda(&self) -> Result<MuLambda> {
        if !self.is_admissible() {
            return Err(Error::Inadmissible { ell: self.ell.get() });
        }
        mu_lambda(&self.series()?.cleared_series())
    }
}

/// 2 − x^a − x^−a, the contribution of one loop.
pub fn loop_term(a: i64) -> LaurentPoly {
    let two = LaurentPoly::constant(2);
    &(&two - &LaurentPoly::monomial(1, a)) - &LaurentPoly::monomial(1, -a)
}

/// p_i = Σ_k α_k^{2i} for i = 1..=i_max.
pub fn power_sums(bv: &BouquetVoltage, i_max: u32) -> Vec<BigInt> {
    (1..=i_max).map(|i| bv.alpha.iter().map(|a| num_traits::pow(a.clone(), 2 * i as usize)).sum()).collect()
}

/// Power sums reduced mod ℓ, in [0, ℓ).
pub fn power_sum_residues(bv: &BouquetVoltage, i_max: u32) -> Vec<u64> {
    power_sums(bv, i_max).iter().map(|p| bv.ell.residue(p)).collect()
}

/// Number of unit coordinates and, for each nonzero square class x mod ℓ,
/// the number of coordinates with α² ≡ x.
pub fn residue_class_counts(bv: &BouquetVoltage) -> (usize, BTreeMap<u64, usize>) {
    let ell = bv.ell;
    let mut units = 0;
    let mut classes = BTreeMap::new();
    for a in &bv.alpha {
        let r = ell.residue(a);
        if r != 0 {
            units += 1;
            *classes.entry(r * r % ell.get()).or_insert(0) += 1;
        }
    }
    (units, classes)
}

/// Necessary conditions for μ > 0: the number of unit coordinates and each
/// count r_x of coordinates with α² ≡ x are divisible by ℓ. `false` means
/// μ = 0; `true` decides nothing.
pub fn mu_positive_necessary(bv: &BouquetVoltage) -> bool {
    let p = bv.ell.get() as usize;
    let (units, classes) = residue_class_counts(bv);
    units % p == 0 && classes.values().all(|&c| c % p == 0)
}

/// For each distinct nonzero |α| value, how many coordinates take it.
pub fn absolute_value_counts(bv: &BouquetVoltage) -> BTreeMap<BigInt, usize> {
    let mut out = BTreeMap::new();
    for a in &bv.alpha {
        if !a.is_zero() {
            *out.entry(a.abs()).or_insert(0) += 1;
        }
    }
    out
}

/// μ > 0 exactly when every multiplicity of a nonzero |α| value is divisible
/// by ℓ.
pub fn mu_positive_by_multiplicities(bv: &BouquetVoltage) -> bool {
    let p = bv.ell.get() as usize;
    absolute_value_counts(bv).values().all(|&c| c % p == 0)
}

/// Exact μ from the characteristic series.
pub fn mu_exact_integer(bv: &BouquetVoltage) -> Result<u32> {
    Ok(bv.mu_lambda()?.mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaClass {
    /// μ = 0 and λ = 2k − 1.
    Equal,
    /// μ = 0 and λ = 2i − 1 for the given i < k.
    Less(u32),
    /// p_1 ≡ … ≡ p_k ≡ 0 mod ℓ: either λ > 2k − 1 or μ > 0.
    Undetermined,
}

/// Decides λ = 2k − 1 from power sums mod ℓ. Only valid when 2k − 1 < ℓ − 1;
/// above that the power sums no longer determine β_2k mod ℓ.
pub fn lambda_classifier_small(bv: &BouquetVoltage, k: u32) -> Result<LambdaClass> {
    let ell = bv.ell.get();
    if k == 0 || 2 * k as u64 - 1 >= ell - 1 {
        return Err(Error::RangeError(format!("power sums classify λ = 2k−1 only when 2k−1 < ℓ−1 (k = {k}, ℓ = {ell})")));
    }
    let residues = power_sum_residues(bv, k);
    match residues.iter().position(|&r| r != 0) {
        Some(i) if i + 1 == k as usize => Ok(LambdaClass::Equal),
        Some(i) => Ok(LambdaClass::Less(i as u32 + 1)),
        None => Ok(LambdaClass::Undetermined),
    }
}

/// t = ℓ^(n1+1) + ℓ^n1 loops: ℓ^(n1+1) of voltage 1 and ℓ^n1 of voltage
/// ℓ^n2. Its invariants are μ = n1 and λ = 2ℓ^n2 − 1.
pub fn arb_large_voltage(ell: OddPrime, n1: u32, n2: u32) -> Result<BouquetVoltage> {
    if n2 == 0 {
        return Err(Error::RangeError("n2 must be at least 1".into()));
    }
    let ones = ell.pow(n1 + 1).to_usize().ok_or_else(|| Error::RangeError("n1 too large".into()))?;
    let heavy = ell.pow(n1).to_usize().unwrap();
    let mut alpha = vec![BigInt::one(); ones];
    alpha.extend(std::iter::repeat(ell.pow(n2)).take(heavy));
    BouquetVoltage::new(ell, alpha)
}

/// P_a(X) = 2 − 2·T_a(1 − X/2) = d_1 X + … + d_a X^a with T_a the
/// Chebyshev polynomial of the first kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebyshevData {
    pub a: u64,
    /// `coeffs[k]` is d_k(a); index 0 is the (zero) constant term.
    pub coeffs: Vec<BigInt>,
}

impl ChebyshevData {
    pub fn d(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }
}

pub fn chebyshev_shifted(a: u64) -> Result<ChebyshevData> {
    if a == 0 {
        return Err(Error::RangeError("a must be at least 1".into()));
    }
    // T_n(1 − X/2) as rational polynomials in X via T_{n+1} = 2yT_n − T_{n−1}.
    let y = vec![BigRational::one(), BigRational::new((-1).into(), 2.into())];
    let mut prev = vec![BigRational::one()];
    let mut cur = y.clone();
    for _ in 1..a {
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                next[i + j] += c * yj * BigRational::from_integer(2.into());
            }
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    let mut coeffs = Vec::with_capacity(cur.len());
    for (k, c) in cur.iter().enumerate() {
        let mut v = -c * BigRational::from_integer(2.into());
        if k == 0 {
            v += BigRational::from_integer(2.into());
        }
        if !v.is_integer() {
            return Err(Error::InvalidInput(format!("non-integral Chebyshev coefficient at degree {k}")));
        }
        coeffs.push(v.to_integer());
    }
    Ok(ChebyshevData { a, coeffs })
}

/// Σ_s P_{|α(s)|}(X): the bouquet series in the variable X = −T²/(1+T).
pub fn chebyshev_sum(bv: &BouquetVoltage) -> Result<Vec<BigInt>> {
    let mut total: Vec<BigInt> = Vec::new();
    for a in &bv.alpha {
        if a.is_zero() {
            continue;
        }
        let a = a.abs().to_u64().ok_or_else(|| Error::RangeError("voltage too large".into()))?;
        let p = chebyshev_shifted(a)?;
        if total.len() < p.coeffs.len() {
            total.resize(p.coeffs.len(), BigInt::zero());
        }
        for (k, c) in p.coeffs.iter().enumerate() {
            total[k] += c;
        }
    }
    Ok(total)
}

/// Quadratic-character profile of the unit coordinates: (#residues, #non-residues).
pub fn character_profile(bv: &BouquetVoltage) -> (usize, usize) {
    let mut plus = 0;
    let mut minus = 0;
    for a in &bv.alpha {
        match quadratic_character(a, bv.ell) {
            1 => plus += 1,
            -1 => minus += 1,
            _ => {}
        }
    }
    (plus, minus)
}

/// ℓ-adic valuation of the gcd of the Chebyshev sum's coefficients.
pub fn chebyshev_mu(bv: &BouquetVoltage) -> Result<Option<u32>> {
    let sum = chebyshev_sum(bv)?;
    let g = sum.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    Ok(crate::padic::val_ell(&g, bv.ell))
}
