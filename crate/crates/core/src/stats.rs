//! Distribution statistics over voltage spaces: exhaustive residue-class
//! enumeration, Monte Carlo sampling, closed-form probabilities and bounds,
//! and the vary-t density count.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bouquet::BouquetVoltage;
use crate::char_series::{char_poly_exact, char_series_truncated};
use crate::error::{Error, Result};
use crate::invariants::mu_lambda;
use crate::multigraph::Multigraph;
use crate::padic::{binomial, OddPrime, Precision};
use crate::two_vertex::{build_two_vertex, prob_two_vertex_mu0_lambda1, TwoVertexShape};
use crate::voltage::VoltageAssignment;

/// Exact rationals serialize as "num/den" strings.
pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Big integers as decimal strings.
pub mod bigint_string {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}

pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000_000;

/// Samples per deterministic RNG stream in Monte Carlo runs.
const CHUNK: u64 = 4096;

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn pow_big(base: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), e)
}

/// What a row of a report counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Exact { mu: u32, lambda: u32 },
    /// No unit coefficient below ℓ^K: μ > 0 or λ ≥ ℓ^K − 1. Its share is an
    /// upper estimate for Prob(μ > 0).
    Unresolved,
    /// μ = 0 and λ < 2k − 1, as an aggregate of exact rows.
    LambdaBelow { k: u32 },
}

impl Event {
    fn mu_field(&self) -> String {
        match self {
            Event::Exact { mu, .. } => mu.to_string(),
            Event::Unresolved => ">0?".into(),
            Event::LambdaBelow { .. } => "0".into(),
        }
    }

    fn lambda_field(&self) -> String {
        match self {
            Event::Exact { lambda, .. } => lambda.to_string(),
            Event::Unresolved => "*".into(),
            Event::LambdaBelow { k } => format!("<{}", 2 * k - 1),
        }
    }
}

/// How a row's classes were classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    /// Determined by the residues (a unit coefficient below ℓ^K).
    Certain,
    /// Read off the exact series of one integer lift per class; other lifts
    /// may differ.
    Representative,
    /// Left open at the final depth.
    Open,
    /// Sum over other rows.
    Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatRow {
    #[serde(serialize_with = "ser_event_mu")]
    pub event: Event,
    pub resolution: Resolution,
    #[serde(with = "bigint_string")]
    pub count: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub empirical: BigRational,
    #[serde(serialize_with = "ser_opt_rational")]
    pub theoretical: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub bound: Option<BigRational>,
    /// Wilson 95% interval, Monte Carlo only.
    pub wilson: Option<(f64, f64)>,
}

fn ser_event_mu<S: Serializer>(e: &Event, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("mu={} lambda={}", e.mu_field(), e.lambda_field()))
}

fn ser_opt_rational<S: Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser_rational(r, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub family: String,
    pub ell: u64,
    pub params: String,
    /// Residue depth K: classes are taken mod ℓ^K.
    pub depth: u32,
    #[serde(with = "bigint_string")]
    pub total: BigInt,
    pub seed: Option<u64>,
    pub rows: Vec<StatRow>,
}

impl StatReport {
    /// Empirical share of certain classes with (μ, λ).
    pub fn certain(&self, mu: u32, lambda: u32) -> BigRational {
        self.rows
            .iter()
            .filter(|r| r.event == Event::Exact { mu, lambda } && r.resolution == Resolution::Certain)
            .map(|r| r.empirical.clone())
            .sum()
    }

    pub fn row(&self, event: Event, resolution: Resolution) -> Option<&StatRow> {
        self.rows.iter().find(|r| r.event == event && r.resolution == resolution)
    }

    /// Sum of counts over the non-aggregate rows.
    pub fn tallied(&self) -> BigInt {
        self.rows.iter().filter(|r| r.resolution != Resolution::Aggregate).map(|r| r.count.clone()).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidInput(format!("csv output failed: {e}"));
        w.write_record([
            "family",
            "ell",
            "params",
            "mu",
            "lambda",
            "count",
            "total",
            "empirical_num",
            "empirical_den",
            "theoretical_num",
            "theoretical_den",
            "bound_num",
            "bound_den",
            "seed",
            "resolution",
            "wilson_lo",
            "wilson_hi",
        ])
        .map_err(io)?;
        let split = |r: &Option<BigRational>| match r {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        for row in &self.rows {
            let (tn, td) = split(&row.theoretical);
            let (bn, bd) = split(&row.bound);
            let (wl, wh) = match row.wilson {
                Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
                None => (String::new(), String::new()),
            };
            let resolution = match row.resolution {
                Resolution::Certain => "certain",
                Resolution::Representative => "representative",
                Resolution::Open => "open",
                Resolution::Aggregate => "aggregate",
            };
            w.write_record([
                self.family.clone(),
                self.ell.to_string(),
                self.params.clone(),
                row.event.mu_field(),
                row.event.lambda_field(),
                row.count.to_string(),
                self.total.to_string(),
                row.empirical.numer().to_string(),
                row.empirical.denom().to_string(),
                tn,
                td,
                bn,
                bd,
                self.seed.map(|s| s.to_string()).unwrap_or_default(),
                resolution.to_string(),
                wl,
                wh,
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// closed forms

/// g(ℓ, t): nonzero solutions of Σ x_i² = 0 over F_ℓ.
pub fn nonzero_isotropic_count(ell: OddPrime, t: u32) -> BigInt {
    let l = ell.get();
    if t % 2 == 1 {
        return pow_big(l, t as usize - 1) - 1;
    }
    let sign = if (t as u64 * (l - 1) / 4) % 2 == 0 { 1 } else { -1 };
    pow_big(l, t as usize - 1) + sign * BigInt::from(l - 1) * pow_big(l, t as usize / 2 - 1) - 1
}

/// Prob(μ = 0, λ = 1) on the bouquet with t loops.
pub fn closed_form_bouquet(ell: OddPrime, t: u32) -> Result<BigRational> {
    if t < 2 {
        return Err(Error::RangeError("bouquets need t ≥ 2".into()));
    }
    let total = pow_big(ell.get(), t as usize) - 1;
    Ok(BigRational::one() - BigRational::new(nonzero_isotropic_count(ell, t), total))
}

/// Exact distribution for t = 2: (μ, λ) ↦ probability, zero entries omitted.
pub fn theoretical_t2(ell: OddPrime) -> Vec<((u32, u32), BigRational)> {
    let l = ell.get();
    if l % 4 == 3 {
        vec![((0, 1), BigRational::one())]
    } else {
        vec![((0, 1), ratio(l - 1, l + 1)), ((0, 3), ratio(2u64, l + 1))]
    }
}

/// Exact distribution for t = 3 and ℓ ≥ 5.
pub fn theoretical_t3(ell: OddPrime) -> Option<Vec<((u32, u32), BigRational)>> {
    let l = ell.get();
    if l < 5 {
        return None;
    }
    let den = l * l + l + 1;
    let mut out = vec![((0, 1), ratio(l * l, den))];
    if l % 3 == 2 {
        out.push(((0, 3), ratio(l + 1, den)));
    } else {
        if l > 7 {
            out.push(((0, 3), ratio(l - 7, den)));
        }
        out.push(((0, 5), ratio(8u64, den)));
    }
    Some(out)
}

/// The theoretical value for one (μ, λ) cell of the bouquet, where known.
pub fn bouquet_theoretical(ell: OddPrime, t: u32, mu: u32, lambda: u32) -> Option<BigRational> {
    let table = match t {
        2 => Some(theoretical_t2(ell)),
        3 => theoretical_t3(ell),
        _ => None,
    };
    if let Some(table) = table {
        return Some(table.into_iter().find(|(k, _)| *k == (mu, lambda)).map(|(_, p)| p).unwrap_or_else(BigRational::zero));
    }
    if (mu, lambda) == (0, 1) {
        return closed_form_bouquet(ell, t).ok();
    }
    let small = ell.get() > t as u64;
    if lambda % 2 == 0 || (small && (mu > 0 || lambda >= 2 * t)) {
        return Some(BigRational::zero());
    }
    None
}

/// Upper bound on Prob(μ > 0) for the bouquet with t loops:
/// Σ_i 2^(iℓ) C(t, iℓ) S_m(i) / (ℓ^t − 1), where S_m(i) sums the multinomials
/// (iℓ)!/Π(a_j ℓ)! over a_1 + … + a_m = i, m = (ℓ−1)/2.
pub fn mu_positive_upper_bound(ell: OddPrime, t: u32) -> BigRational {
    let l = ell.get();
    let m = ((l - 1) / 2) as usize;
    let top = (t as u64 / l) as usize;
    // s[i] = S_k(i) for the current number of parts k
    let mut s = vec![BigInt::one(); top + 1];
    for _ in 1..m {
        let mut next = vec![BigInt::zero(); top + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            for a in 0..=i {
                *slot += binomial(i as u64 * l, a as u64 * l) * &s[i - a];
            }
        }
        s = next;
    }
    let mut num = BigInt::zero();
    for (i, si) in s.iter().enumerate().skip(1) {
        let il = i as u64 * l;
        num += pow_big(2, il as usize) * binomial(t as u64, il) * si;
    }
    BigRational::new(num, pow_big(l, t as usize) - 1)
}

/// Upper bound on Prob(μ = 0, λ < 2k − 1): (1 − ℓ^−t)^−1 (1 − ℓ^−k(k−1)).
pub fn lambda_small_bound(ell: OddPrime, t: u32, k: u32) -> Result<BigRational> {
    if k <= 1 || (2 * k - 1) as u64 >= ell.get() || k * (k - 1) >= t {
        return Err(Error::HypothesisViolated(format!("need k > 1, 2k−1 < ℓ and k(k−1) < t (ℓ={}, t={t}, k={k})", ell.get())));
    }
    let l = BigRational::from_integer(ell.to_bigint());
    let inv = |e: u32| BigRational::one() / num_traits::pow(l.clone(), e as usize);
    Ok((BigRational::one() - inv(k * (k - 1))) / (BigRational::one() - inv(t)))
}

/// Decimal rendering of a nonnegative rational with `sig` significant digits,
/// rounded half up, in scientific notation "d.ddd…e±x".
pub fn to_scientific(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let (num, den) = (r.numer().clone(), r.denom().clone());
    let mut exp: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    // find exp with 10^exp ≤ r < 10^(exp+1)
    let ten = BigInt::from(10);
    let scaled = |e: i64| -> (BigInt, BigInt) {
        if e >= 0 {
            (num.clone(), &den * num_traits::pow(ten.clone(), e as usize))
        } else {
            (&num * num_traits::pow(ten.clone(), (-e) as usize), den.clone())
        }
    };
    loop {
        let (n, d) = scaled(exp);
        if n < d {
            exp -= 1;
        } else if n >= &d * &ten {
            exp += 1;
        } else {
            break;
        }
    }
    let shift = sig as i64 - 1 - exp;
    let (n, d) = if shift >= 0 {
        (&num * num_traits::pow(ten.clone(), shift as usize), den.clone())
    } else {
        (num.clone(), &den * num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let mut digits: BigInt = (&n * 2 + &d) / (&d * 2);
    if digits.to_string().len() > sig {
        digits /= 10;
        exp += 1;
    }
    let s = digits.to_string();
    format!("{}.{}e{}", &s[..1], &s[1..], exp)
}

// ---------------------------------------------------------------------------
// mod-ℓ classification

/// C(x, i) mod ℓ for 0 ≤ x, i < ℓ^K through base-ℓ digits. For an ℓ-adic
/// integer x this depends only on x mod ℓ^K.
fn lucas_binomial(mut x: u64, mut i: u64, ell: u64, small: &[Vec<u64>]) -> u64 {
    let mut acc = 1u64;
    while i > 0 {
        let (xd, id) = ((x % ell) as usize, (i % ell) as usize);
        acc = acc * small[xd][id] % ell;
        if acc == 0 {
            return 0;
        }
        x /= ell;
        i /= ell;
    }
    acc
}

fn small_binomials(ell: u64) -> Vec<Vec<u64>> {
    let n = ell as usize;
    let mut c = vec![vec![0u64; n]; n];
    for x in 0..n {
        c[x][0] = 1;
        for i in 1..=x {
            c[x][i] = (c[x - 1][i - 1] + if i < x { c[x - 1][i] } else { 0 }) % ell;
        }
    }
    c
}

/// Per residue a mod ℓ^K, the coefficients of (1+T)^a + (1+T)^−a mod ℓ below
/// degree ℓ^K.
#[derive(Debug, Clone)]
pub struct LoopTable {
    ell: u64,
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl LoopTable {
    pub fn new(ell: OddPrime, depth: u32) -> Result<Self> {
        let l = ell.get();
        let modulus = ell
            .checked_pow(depth)
            .and_then(|m| u64::try_from(m).ok())
            .filter(|&m| m <= 1 << 16)
            .ok_or_else(|| Error::RangeError(format!("depth {depth} is too deep for ℓ = {l}")))?;
        let small = small_binomials(l);
        let rows = (0..modulus)
            .map(|a| {
                let neg = (modulus - a) % modulus;
                (0..modulus).map(|i| (lucas_binomial(a, i, l, &small) + lucas_binomial(neg, i, l, &small)) % l).collect()
            })
            .collect();
        Ok(LoopTable { ell: l, modulus, rows })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// First i in [1, ℓ^K) with a unit coefficient of f for the bouquet with
    /// these residues; λ = i − 1.
    pub fn first_unit(&self, residues: &[u64]) -> Option<u64> {
        (1..self.modulus as usize)
            .find(|&i| residues.iter().map(|&a| self.rows[(a % self.modulus) as usize][i]).sum::<u64>() % self.ell != 0)
            .map(|i| i as u64)
    }
}

/// A voltage space: a base graph with some section coordinates pinned to zero
/// (the spanning tree) and the rest free.
#[derive(Debug, Clone)]
pub struct VoltageSpace {
    pub graph: Multigraph,
    pub free: Vec<usize>,
    bouquet: bool,
}

impl VoltageSpace {
    pub fn bouquet(t: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::ZeroEulerCharacteristic);
        }
        Ok(VoltageSpace { graph: Multigraph::bouquet(t), free: (0..t).collect(), bouquet: true })
    }

    pub fn two_vertex(shape: &TwoVertexShape) -> Self {
        let (graph, tree) = build_two_vertex(shape);
        let free = (0..shape.edge_count()).filter(|&k| !tree.contains(k)).collect();
        VoltageSpace { graph, free, bouquet: false }
    }

    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    fn full_vector(&self, free_values: &[u64]) -> Vec<BigInt> {
        let mut full = vec![BigInt::zero(); self.graph.undirected_edge_count()];
        for (&k, &a) in self.free.iter().zip(free_values) {
            full[k] = BigInt::from(a);
        }
        full
    }

    /// λ from residues mod ℓ^K, or None when no coefficient below ℓ^K is a unit.
    fn classify(&self, table: Option<&LoopTable>, ell: OddPrime, depth_modulus: u64, residues: &[u64]) -> Result<Option<u32>> {
        if let (true, Some(table)) = (self.bouquet, table) {
            return Ok(table.first_unit(residues).map(|i| i as u32 - 1));
        }
        let v = VoltageAssignment::from_integers(&self.graph, ell, &self.full_vector(residues))?;
        let s = char_series_truncated(&self.graph, &v, depth_modulus as usize - 1, Precision::Mod(1))?;
        Ok(s.coefficients().iter().enumerate().skip(1).find(|(_, c)| !c.is_zero()).map(|(i, _)| i as u32 - 1))
    }

    /// Exact (μ, λ) of one integer lift.
    fn representative(&self, ell: OddPrime, residues: &[u64]) -> Result<(u32, u32)> {
        let ml = if self.bouquet {
            BouquetVoltage::new(ell, residues.iter().map(|&a| BigInt::from(a)).collect())?.mu_lambda()?
        } else {
            let v = VoltageAssignment::from_integers(&self.graph, ell, &self.full_vector(residues))?;
            mu_lambda(&char_poly_exact(&self.graph, &v)?.cleared_series())?
        };
        Ok((ml.mu, ml.lambda))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Certain(u32),
    Open,
}

type Tally = BTreeMap<Outcome, BigInt>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_insert_with(BigInt::zero) += v;
    }
    a
}

fn check_cap(ell: OddPrime, depth: u32, t: usize, cap: u128) -> Result<()> {
    let classes = ell.checked_pow(depth * t as u32).unwrap_or(u128::MAX);
    if classes > cap {
        return Err(Error::EnumerationCap { classes, cap });
    }
    Ok(())
}

/// Multisets of size t from 0..m in nondecreasing order, split by first entry.
fn multisets_from(first: u64, m: u64, t: usize, f: &mut impl FnMut(&[u64])) {
    fn rec(cur: &mut Vec<u64>, m: u64, t: usize, f: &mut impl FnMut(&[u64])) {
        if cur.len() == t {
            f(cur);
            return;
        }
        let lo = *cur.last().unwrap();
        for c in lo..m {
            cur.push(c);
            rec(cur, m, t, f);
            cur.pop();
        }
    }
    let mut cur = vec![first];
    rec(&mut cur, m, t, f);
}

/// Number of sign-and-order arrangements of a multiset of balanced residues.
fn multiset_weight(ms: &[u64], factorials: &[BigInt]) -> BigInt {
    let mut w = factorials[ms.len()].clone();
    let mut i = 0;
    while i < ms.len() {
        let mut j = i;
        while j < ms.len() && ms[j] == ms[i] {
            j += 1;
        }
        w /= &factorials[j - i];
        if ms[i] != 0 {
            w <<= j - i;
        }
        i = j;
    }
    w
}

/// Tallies of bouquet classes mod ℓ^K keyed by outcome, plus the open
/// multisets (balanced residues) with their weights.
fn bouquet_tally(ell: OddPrime, t: usize, depth: u32) -> Result<(Tally, Vec<(Vec<u64>, BigInt)>)> {
    let table = LoopTable::new(ell, depth)?;
    let l = ell.get();
    let half = table.modulus() / 2 + 1;
    let factorials: Vec<BigInt> = (0..=t).scan(BigInt::one(), |acc, k| {
        if k > 0 {
            *acc *= k;
        }
        Some(acc.clone())
    })
    .collect();
    let parts: Vec<(Tally, Vec<(Vec<u64>, BigInt)>)> = (0..half)
        .into_par_iter()
        .map(|first| {
            let mut tally = Tally::new();
            let mut open = Vec::new();
            multisets_from(first, half, t, &mut |ms| {
                if ms.iter().all(|&c| c % l == 0) {
                    return;
                }
                let w = multiset_weight(ms, &factorials);
                match table.first_unit(ms) {
                    Some(i) => *tally.entry(Outcome::Certain(i as u32 - 1)).or_insert_with(BigInt::zero) += w,
                    None => {
                        *tally.entry(Outcome::Open).or_insert_with(BigInt::zero) += &w;
                        open.push((ms.to_vec(), w));
                    }
                }
            });
            (tally, open)
        })
        .collect();
    let mut tally = Tally::new();
    let mut open = Vec::new();
    for (t_, o) in parts {
        tally = merge(tally, t_);
        open.extend(o);
    }
    Ok((tally, open))
}

fn admissible_total(ell: OddPrime, t: usize, depth: u32) -> BigInt {
    ell.pow(depth * t as u32) - ell.pow((depth - 1) * t as u32)
}

/// Exhaustive enumeration of bouquet voltages mod ℓ^K for K = 1, 2, … up to
/// `max_depth`, stopping once every class is classified or the next depth
/// exceeds `cap` classes. Open classes are then classified by the exact
/// series of their balanced lift and flagged as representative.
pub fn bouquet_enumerate(ell: OddPrime, t: usize, max_depth: u32, cap: u128) -> Result<StatReport> {
    if t < 2 {
        return Err(Error::ZeroEulerCharacteristic);
    }
    check_cap(ell, 1, t, cap)?;
    let mut depth = 1;
    let (mut tally, mut open) = bouquet_tally(ell, t, depth)?;
    while !open.is_empty() && depth < max_depth.max(1) && check_cap(ell, depth + 1, t, cap).is_ok() {
        depth += 1;
        (tally, open) = bouquet_tally(ell, t, depth)?;
    }
    let total = admissible_total(ell, t, depth);
    let mut reps: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    let space = VoltageSpace::bouquet(t)?;
    for (ms, w) in &open {
        let key = space.representative(ell, ms)?;
        *reps.entry(key).or_insert_with(BigInt::zero) += w;
    }
    let mut rows = Vec::new();
    for (outcome, count) in &tally {
        let (event, theoretical) = match *outcome {
            Outcome::Certain(lambda) => (Event::Exact { mu: 0, lambda }, bouquet_theoretical(ell, t as u32, 0, lambda)),
            Outcome::Open => (Event::Unresolved, None),
        };
        let bound = (event == Event::Unresolved).then(|| mu_positive_upper_bound(ell, t as u32));
        rows.push(StatRow {
            event,
            resolution: if event == Event::Unresolved { Resolution::Open } else { Resolution::Certain },
            empirical: BigRational::new(count.clone(), total.clone()),
            count: count.clone(),
            theoretical,
            bound,
            wilson: None,
        });
    }
    for ((mu, lambda), count) in reps {
        rows.push(StatRow {
            event: Event::Exact { mu, lambda },
            resolution: Resolution::Representative,
            empirical: BigRational::new(count.clone(), total.clone()),
            count,
            theoretical: None,
            bound: None,
            wilson: None,
        });
    }
    for k in 2..=ell.get() as u32 {
        let Ok(bound) = lambda_small_bound(ell, t as u32, k) else { continue };
        let count: BigInt = tally
            .iter()
            .filter_map(|(o, c)| match o {
                Outcome::Certain(lambda) if *lambda < 2 * k - 1 => Some(c.clone()),
                _ => None,
            })
            .sum();
        rows.push(StatRow {
            event: Event::LambdaBelow { k },
            resolution: Resolution::Aggregate,
            empirical: BigRational::new(count.clone(), total.clone()),
            count,
            theoretical: None,
            bound: Some(bound),
            wilson: None,
        });
    }
    Ok(StatReport { family: "bouquet".into(), ell: ell.get(), params: format!("t={t}"), depth, total, seed: None, rows })
}

/// Exhaustive enumeration of two-vertex voltages α₀ mod ℓ^K (b₁ = 0).
pub fn two_vertex_enumerate(shape: &TwoVertexShape, ell: OddPrime, depth: u32, cap: u128) -> Result<StatReport> {
    let t = shape.t();
    if t < 2 {
        return Err(Error::ZeroEulerCharacteristic);
    }
    let depth = depth.max(1);
    check_cap(ell, depth, t, cap)?;
    let space = VoltageSpace::two_vertex(shape);
    let modulus = ell.checked_pow(depth).unwrap() as u64;
    let l = ell.get();
    let classes = modulus.pow(t as u32);
    let decode = |mut k: u64| -> Vec<u64> {
        (0..t)
            .map(|_| {
                let d = k % modulus;
                k /= modulus;
                d
            })
            .collect()
    };
    let results: Vec<Result<(Tally, Vec<Vec<u64>>)>> = (0..classes)
        .into_par_iter()
        .fold(
            || Ok((Tally::new(), Vec::new())),
            |acc: Result<(Tally, Vec<Vec<u64>>)>, k| {
                let (mut tally, mut open) = acc?;
                let r = decode(k);
                if r.iter().all(|&a| a % l == 0) {
                    return Ok((tally, open));
                }
                let outcome = match space.classify(None, ell, modulus, &r)? {
                    Some(lambda) => Outcome::Certain(lambda),
                    None => {
                        open.push(r);
                        Outcome::Open
                    }
                };
                *tally.entry(outcome).or_insert_with(BigInt::zero) += 1;
                Ok((tally, open))
            },
        )
        .collect();
    let mut tally = Tally::new();
    let mut open = Vec::new();
    for r in results {
        let (t_, o) = r?;
        tally = merge(tally, t_);
        open.extend(o);
    }
    open.sort();
    let total = admissible_total(ell, t, depth);
    let prob01 = prob_two_vertex_mu0_lambda1(shape, ell)?.probability;
    let mut rows = Vec::new();
    for (outcome, count) in &tally {
        let event = match *outcome {
            Outcome::Certain(lambda) => Event::Exact { mu: 0, lambda },
            Outcome::Open => Event::Unresolved,
        };
        let theoretical = (event == (Event::Exact { mu: 0, lambda: 1 })).then(|| prob01.clone());
        rows.push(StatRow {
            event,
            resolution: if event == Event::Unresolved { Resolution::Open } else { Resolution::Certain },
            empirical: BigRational::new(count.clone(), total.clone()),
            count: count.clone(),
            theoretical,
            bound: None,
            wilson: None,
        });
    }
    let mut reps: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for r in &open {
        *reps.entry(space.representative(ell, r)?).or_insert_with(BigInt::zero) += 1;
    }
    for ((mu, lambda), count) in reps {
        rows.push(StatRow {
            event: Event::Exact { mu, lambda },
            resolution: Resolution::Representative,
            empirical: BigRational::new(count.clone(), total.clone()),
            count,
            theoretical: None,
            bound: None,
            wilson: None,
        });
    }
    Ok(StatReport { family: "two-vertex".into(), ell: l, params: format!("shape={shape}"), depth, total, seed: None, rows })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = (p + z * z / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Uniform sampling of admissible voltages mod ℓ^K. Samples are drawn in
/// fixed chunks, each from its own ChaCha8 stream, so the report does not
/// depend on the thread count.
pub fn monte_carlo(space: &VoltageSpace, ell: OddPrime, depth: u32, samples: u64, seed: u64) -> Result<StatReport> {
    let depth = depth.max(1);
    let table = if space.bouquet { Some(LoopTable::new(ell, depth)?) } else { None };
    let modulus = ell.checked_pow(depth).and_then(|m| u64::try_from(m).ok()).ok_or_else(|| Error::RangeError("depth too large".into()))?;
    let l = ell.get();
    let t = space.dimension();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Result<BTreeMap<Outcome, u64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut tally = BTreeMap::new();
            let mut r = vec![0u64; t];
            for _ in 0..n {
                loop {
                    r.iter_mut().for_each(|x| *x = rng.gen_range(0..modulus));
                    if r.iter().any(|&a| a % l != 0) {
                        break;
                    }
                }
                let outcome = match space.classify(table.as_ref(), ell, modulus, &r)? {
                    Some(lambda) => Outcome::Certain(lambda),
                    None => Outcome::Open,
                };
                *tally.entry(outcome).or_insert(0u64) += 1;
            }
            Ok(tally)
        })
        .collect();
    let mut tally: BTreeMap<Outcome, u64> = BTreeMap::new();
    for p in parts {
        for (k, v) in p? {
            *tally.entry(k).or_insert(0) += v;
        }
    }
    let (family, params, theory): (String, String, Box<dyn Fn(u32) -> Option<BigRational>>) = if space.bouquet {
        ("bouquet".into(), format!("t={t}"), Box::new(move |lambda| bouquet_theoretical(ell, t as u32, 0, lambda)))
    } else {
        let shape = two_vertex_shape_of(space)?;
        let p01 = prob_two_vertex_mu0_lambda1(&shape, ell)?.probability;
        ("two-vertex".into(), format!("shape={shape}"), Box::new(move |lambda| (lambda == 1).then(|| p01.clone())))
    };
    let rows = tally
        .iter()
        .map(|(outcome, &count)| {
            let event = match *outcome {
                Outcome::Certain(lambda) => Event::Exact { mu: 0, lambda },
                Outcome::Open => Event::Unresolved,
            };
            let theoretical = match event {
                Event::Exact { lambda, .. } => theory(lambda),
                _ => None,
            };
            StatRow {
                event,
                resolution: if event == Event::Unresolved { Resolution::Open } else { Resolution::Certain },
                count: count.into(),
                empirical: ratio(count, samples),
                theoretical,
                bound: None,
                wilson: Some(wilson_interval(count, samples)),
            }
        })
        .collect();
    Ok(StatReport { family, ell: l, params, depth, total: samples.into(), seed: Some(seed), rows })
}

fn two_vertex_shape_of(space: &VoltageSpace) -> Result<TwoVertexShape> {
    let g = &space.graph;
    let edges = g.undirected_edges();
    let count = |pair: (usize, usize)| edges.iter().filter(|&&e| e == pair).count();
    let (p, e, g_, q) = (count((0, 0)), count((0, 1)), count((1, 0)), count((1, 1)));
    TwoVertexShape::new(p, q, e + g_, e, g_)
}

// ---------------------------------------------------------------------------
// varying t

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VaryTReport {
    pub ell: u64,
    pub x: u64,
    pub t_max: u32,
    #[serde(with = "bigint_string")]
    pub favourable: BigInt,
    #[serde(with = "bigint_string")]
    pub admissible: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub target: BigRational,
}

/// ⌊x^δ⌋, corrected for floating-point error at exact powers.
pub fn t_max_for(x: u64, delta: f64) -> u32 {
    let mut t = (x as f64).powf(delta).floor() as u64;
    while ((t + 1) as f64).powf(1.0 / delta) <= x as f64 + 1e-9 {
        t += 1;
    }
    while t > 0 && (t as f64).powf(1.0 / delta) > x as f64 + 1e-9 {
        t -= 1;
    }
    t as u32
}

/// Over all t in [2, ⌊x^δ⌋] and integer α ∈ [−x, x]^t with some α_i a unit:
/// the number with (μ, λ) = (0, 1), i.e. Σα_i² ≢ 0 mod ℓ, against the number
/// of all such α. Counted exactly by a dynamic program over coordinates on
/// (Σα² mod ℓ, whether a unit has appeared).
pub fn vary_t_density(ell: OddPrime, x: u64, delta: f64) -> Result<VaryTReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::RangeError(format!("δ must lie in (0, 1), got {delta}")));
    }
    let t_max = t_max_for(x, delta);
    if t_max < 2 {
        return Err(Error::RangeError(format!("⌊x^δ⌋ = {t_max} leaves no t ≥ 2")));
    }
    let l = ell.get();
    let lu = l as usize;
    // N(r) = #{a ∈ [−x, x] : a ≡ r mod ℓ}
    let per_residue: Vec<BigInt> = (0..l)
        .map(|r| {
            let xi = x as i64;
            let li = l as i64;
            let hi = (xi - r as i64).div_euclid(li);
            let lo = (-xi - r as i64 + li - 1).div_euclid(li);
            BigInt::from((hi - lo + 1).max(0))
        })
        .collect();
    // state[s][u]: s = Σα² mod ℓ, u = 1 once a unit appeared
    let mut state = vec![[BigInt::zero(), BigInt::zero()]; lu];
    state[0][0] = BigInt::one();
    let mut favourable = BigInt::zero();
    let mut admissible = BigInt::zero();
    for t in 1..=t_max {
        let mut next = vec![[BigInt::zero(), BigInt::zero()]; lu];
        for s in 0..lu {
            for u in 0..2 {
                if state[s][u].is_zero() {
                    continue;
                }
                for r in 0..lu {
                    let ns = (s + r * r) % lu;
                    let nu = if r != 0 { 1 } else { u };
                    next[ns][nu] += &state[s][u] * &per_residue[r];
                }
            }
        }
        state = next;
        if t >= 2 {
            admissible += (0..lu).map(|s| state[s][1].clone()).sum::<BigInt>();
            favourable += (1..lu).map(|s| state[s][1].clone()).sum::<BigInt>();
        }
    }
    Ok(VaryTReport {
        ell: l,
        x,
        t_max,
        ratio: BigRational::new(favourable.clone(), admissible.clone()),
        target: BigRational::new(BigInt::from(l - 1), BigInt::from(l)),
        favourable,
        admissible,
    })
}

/// Distance |ratio − target| as f64, for trend reporting.
pub fn distance_to_target(r: &VaryTReport) -> f64 {
    let d = &r.ratio - &r.target;
    let d = if d < BigRational::zero() { -d } else { d };
    d.to_f64().unwrap_or(f64::INFINITY)
}
