//! The voltage matrix M(x) of a voltage graph and its characteristic series
//! f(T) = det M(1+T), either exactly from integer voltages or as a truncated
//! series from ℓ-adic ones.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::minor_expansion_determinant;
use crate::multigraph::Multigraph;
use crate::padic::{val_factorial, OddPrime, PadicInt, Precision};
use crate::series::{generalized_binomial, LaurentPoly, TruncatedSeries, Window};
use crate::voltage::VoltageAssignment;

/// Largest |α| accepted on the exact path; exponents are stored densely.
pub const MAX_EXACT_EXPONENT: i64 = 1 << 20;

fn exponent(value: &BigInt, edge: usize) -> Result<i64> {
    match value.to_i64() {
        Some(a) if a.abs() <= MAX_EXACT_EXPONENT => Ok(a),
        _ => Err(Error::RangeError(format!(
            "voltage {value} on edge {edge} is too large for the exact path (limit {MAX_EXACT_EXPONENT})"
        ))),
    }
}

/// M(x) = D − (twisted adjacency): each section edge s from i to j subtracts
/// x^α(s) at (i, j) and x^−α(s) at (j, i).
pub fn voltage_matrix(g: &Multigraph, v: &VoltageAssignment) -> Result<Vec<Vec<LaurentPoly>>> {
    let values = v.integer_values().map_err(|edge| Error::NonIntegerVoltage { edge })?;
    let u = g.vertex_count();
    let mut m = vec![vec![LaurentPoly::zero(); u]; u];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = LaurentPoly::constant(g.valency(i));
    }
    for (k, &e) in v.section().iter().enumerate() {
        let a = exponent(&values[k], k)?;
        let d = g.edge(e);
        m[d.origin][d.terminus] = &m[d.origin][d.terminus] - &LaurentPoly::monomial(1, a);
        m[d.terminus][d.origin] = &m[d.terminus][d.origin] - &LaurentPoly::monomial(1, -a);
    }
    Ok(m)
}

pub fn laurent_determinant(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    minor_expansion_determinant(
        m,
        LaurentPoly::constant(1),
        |a, b| a + b,
        |a, b| a * b,
        |a| -a,
        LaurentPoly::is_zero,
    )
    .unwrap_or_else(LaurentPoly::zero)
}

/// Σ over rows of the largest negative exponent appearing in that row.
pub fn clearance(m: &[Vec<LaurentPoly>]) -> u64 {
    m.iter()
        .map(|row| {
            let low = row.iter().filter_map(LaurentPoly::low_exponent).min().unwrap_or(0);
            (-low).max(0) as u64
        })
        .sum()
}

/// max(2·Σ|α| + 2, 8).
pub fn default_degree_cap(v: &VoltageAssignment) -> usize {
    let s = v.sum_abs().to_usize().unwrap_or(usize::MAX / 4);
    (2 * s + 2).max(8)
}

/// Exact characteristic data for integer voltages.
///
/// `cleared` holds x^B·det M(x) at x = 1+T, a polynomial in T; it differs
/// from f(T) by the unit (1+T)^B, so it has the same μ and λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicSeries {
    ell: OddPrime,
    determinant: LaurentPoly,
    clearance: u64,
    cleared: Vec<BigInt>,
    default_degree_cap: usize,
}

impl CharacteristicSeries {
    pub fn from_determinant(ell: OddPrime, determinant: LaurentPoly, clearance: u64, default_degree_cap: usize) -> Result<Self> {
        if determinant.is_zero() {
            return Err(Error::ZeroSeries);
        }
        let shifted = determinant.shift(clearance as i64);
        if shifted.low_exponent().unwrap() < 0 {
            return Err(Error::InvalidInput("clearance does not clear the determinant".into()));
        }
        let cleared = shifted.expand_at_one_plus_t()?;
        Ok(CharacteristicSeries { ell, determinant, clearance, cleared, default_degree_cap })
    }

    pub fn ell(&self) -> OddPrime {
        self.ell
    }

    /// det M(x).
    pub fn determinant(&self) -> &LaurentPoly {
        &self.determinant
    }

    /// B, the exponent of the unit (1+T)^B removed from f(T).
    pub fn clearance(&self) -> u64 {
        self.clearance
    }

    pub fn cleared_polynomial(&self) -> &[BigInt] {
        &self.cleared
    }

    pub fn default_degree_cap(&self) -> usize {
        self.default_degree_cap
    }

    /// The cleared polynomial as a complete series window.
    pub fn cleared_series(&self) -> TruncatedSeries {
        let d = self.cleared.len().saturating_sub(1);
        TruncatedSeries::new(self.ell, self.cleared.clone(), d, Precision::Exact, Window::Complete)
    }

    /// β_n, the coefficient of T^n in f(T).
    pub fn beta(&self, n: u64) -> BigInt {
        self.determinant.t_coefficient(n)
    }

    /// f(T) up to the default degree cap.
    pub fn series(&self) -> TruncatedSeries {
        self.series_to(self.default_degree_cap)
    }

    /// f(T) up to T^d; the window is complete when it covers the cleared
    /// polynomial.
    pub fn series_to(&self, d: usize) -> TruncatedSeries {
        let unit: Vec<BigInt> =
            (0..=d as u64).map(|n| generalized_binomial(&-BigInt::from(self.clearance), n)).collect();
        let unit = TruncatedSeries::new(self.ell, unit, d, Precision::Exact, Window::Prefix);
        let cleared = TruncatedSeries::new(self.ell, self.cleared.clone(), d, Precision::Exact, Window::Prefix);
        let window = if d + 1 >= self.cleared.len() { Window::Complete } else { Window::Prefix };
        cleared.mul(&unit).with_window(window)
    }
}

/// f(T) = det M(1+T) for integer voltages.
pub fn char_poly_exact(g: &Multigraph, v: &VoltageAssignment) -> Result<CharacteristicSeries> {
    if g.euler_characteristic() == 0 {
        return Err(Error::ZeroEulerCharacteristic);
    }
    let m = voltage_matrix(g, v)?;
    let b = clearance(&m);
    let det = laurent_determinant(&m);
    CharacteristicSeries::from_determinant(v.ell(), det, b, default_degree_cap(v))
}

/// (1+T)^a up to T^d. For a known mod ℓ^P′ the coefficients are known mod
/// ℓ^(P′ − v(d!)).
pub fn binomial_series(a: &PadicInt, d: usize, ell: OddPrime) -> Result<TruncatedSeries> {
    let precision = match a.precision() {
        Precision::Exact => Precision::Exact,
        Precision::Mod(p) => {
            let loss = val_factorial(d as u64, ell);
            if (p as u64) <= loss {
                return Err(Error::PrecisionExhausted(format!(
                    "binomial coefficients up to degree {d} lose {loss} digits from a value known to {p}"
                )));
            }
            Precision::Mod(p - loss as u32)
        }
    };
    let rep = a.representative();
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut c = BigInt::one();
    for n in 0..=d {
        if n > 0 {
            c = c * (rep - BigInt::from(n - 1)) / BigInt::from(n);
        }
        coeffs.push(c.clone());
    }
    Ok(TruncatedSeries::new(ell, coeffs, d, precision, Window::Prefix))
}

/// f(T) mod (ℓ^P, T^(d+1)), for voltages given to finite precision.
pub fn char_series_truncated(g: &Multigraph, v: &VoltageAssignment, d: usize, precision: Precision) -> Result<TruncatedSeries> {
    if g.euler_characteristic() == 0 {
        return Err(Error::ZeroEulerCharacteristic);
    }
    let ell = v.ell();
    let u = g.vertex_count();
    let mut twists = Vec::with_capacity(v.len());
    let mut working = precision;
    for (k, &e) in v.section().iter().enumerate() {
        let a = &v.values()[k];
        let plus = binomial_series(a, d, ell)?;
        let minus = binomial_series(&a.neg(ell), d, ell)?;
        working = working.min(plus.precision()).min(minus.precision());
        twists.push((g.edge(e), plus, minus));
    }
    let mut m: Vec<Vec<TruncatedSeries>> = (0..u)
        .map(|i| {
            (0..u)
                .map(|j| {
                    let c = if i == j { g.valency(i) as i64 } else { 0 };
                    TruncatedSeries::constant(ell, c, d, working)
                })
                .collect()
        })
        .collect();
    for (edge, plus, minus) in twists {
        let (o, t) = (edge.origin, edge.terminus);
        m[o][t] = m[o][t].sub(&plus).reduced(working, d);
        m[t][o] = m[t][o].sub(&minus).reduced(working, d);
    }
    let det = minor_expansion_determinant(
        &m,
        TruncatedSeries::one(ell, d, working),
        |a, b| a.add(b),
        |a, b| a.mul(b),
        |a| a.neg(),
        |a| a.is_zero(),
    )
    .unwrap_or_else(|| TruncatedSeries::zero(ell, d, working));
    Ok(det.reduced(working, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn ell(p: u64) -> OddPrime {
        OddPrime::new(p).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bouquet_single_loop_matrix() {
        let g = Multigraph::bouquet(1);
        let v = VoltageAssignment::from_integers(&g, ell(3), &[4]).unwrap();
        let m = voltage_matrix(&g, &v).unwrap();
        let expect = &(&LaurentPoly::constant(2) - &LaurentPoly::monomial(1, 4)) - &LaurentPoly::monomial(1, -4);
        assert_eq!(m[0][0], expect);
        assert_eq!(char_poly_exact(&g, &v), Err(Error::ZeroEulerCharacteristic));
    }

    #[test]
    fn matrix_at_one_is_the_laplacian() {
        let g = Multigraph::from_undirected(3, &[(0, 1), (1, 2), (2, 0), (1, 1), (0, 2)]).unwrap();
        let v = VoltageAssignment::from_integers(&g, ell(5), &[3, -2, 0, 7, 1]).unwrap();
        let m = voltage_matrix(&g, &v).unwrap();
        let q = g.laplacian();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j].at_one(), BigInt::from(q[i][j]));
            }
        }
    }

    #[test]
    fn rejects_inexact_voltage_on_exact_path() {
        let g = Multigraph::bouquet(2);
        let p = ell(3);
        let vals = vec![PadicInt::exact(1), PadicInt::with_precision(2, Precision::Mod(3), p).unwrap()];
        let v = VoltageAssignment::new(&g, p, vals).unwrap();
        assert_eq!(char_poly_exact(&g, &v), Err(Error::NonIntegerVoltage { edge: 1 }));
    }

    #[test]
    fn zero_voltage_gives_zero_series() {
        let g = Multigraph::bouquet(2);
        let v = VoltageAssignment::from_integers(&g, ell(3), &[0, 0]).unwrap();
        assert_eq!(char_poly_exact(&g, &v), Err(Error::ZeroSeries));
    }

    #[test]
    fn binomial_series_examples() {
        let p = ell(3);
        let s = binomial_series(&PadicInt::exact(1), 4, p).unwrap();
        assert_eq!(s.coefficients(), &big(&[1, 1, 0, 0, 0])[..]);
        let s = binomial_series(&PadicInt::exact(-1), 3, p).unwrap();
        assert_eq!(s.coefficients(), &big(&[1, -1, 1, -1])[..]);
        // f₁(T) = 2 − (1+T) − (1+T)⁻¹ = −(1+T)⁻¹T²
        let d = 7;
        let two = TruncatedSeries::constant(p, 2, d, Precision::Exact);
        let f1 = two
            .sub(&binomial_series(&PadicInt::exact(1), d, p).unwrap())
            .sub(&binomial_series(&PadicInt::exact(-1), d, p).unwrap());
        let mut t2 = vec![BigInt::zero(); d + 1];
        t2[2] = -BigInt::one();
        let t2 = TruncatedSeries::new(p, t2, d, Precision::Exact, Window::Prefix);
        let rhs = t2.mul(&binomial_series(&PadicInt::exact(-1), d, p).unwrap());
        assert_eq!(f1, rhs);
    }

    #[test]
    fn binomial_series_precision_loss() {
        let p = ell(3);
        let a = PadicInt::with_precision(5, Precision::Mod(4), p).unwrap();
        let s = binomial_series(&a, 6, p).unwrap();
        assert_eq!(s.precision(), Precision::Mod(2));
        assert!(matches!(binomial_series(&a, 9, p), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn bouquet_example_series_prefix() {
        let g = Multigraph::bouquet(3);
        let v = VoltageAssignment::from_integers(&g, ell(3), &[1, 8, 10]).unwrap();
        let cs = char_poly_exact(&g, &v).unwrap();
        let s = cs.series();
        assert_eq!(&s.coefficients()[..5], &big(&[0, 0, -165, 165, -1326])[..]);
        assert_eq!(s.window(), Window::Complete);
        assert_eq!(cs.beta(2), BigInt::from(-165));
        assert_eq!(cs.clearance(), 10);
        let trunc = char_series_truncated(&g, &v, 4, Precision::Exact).unwrap();
        assert_eq!(trunc.coeff(2), BigInt::from(-165));
    }

    fn random_voltage_graph() -> impl Strategy<Value = (Multigraph, Vec<i64>)> {
        (1usize..=3).prop_flat_map(|u| {
            proptest::collection::vec((0..u, 0..u, -4i64..=4), (u + 1)..=(u + 3)).prop_map(move |edges| {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|&(i, j, _)| (i, j)).collect();
                let vals = edges.iter().map(|&(_, _, a)| a).collect();
                (Multigraph::from_undirected(u, &pairs).unwrap(), vals)
            })
        })
    }

    proptest! {
        #[test]
        fn exact_and_truncated_paths_agree((g, vals) in random_voltage_graph(), d in 2usize..10) {
            let v = VoltageAssignment::from_integers(&g, ell(5), &vals).unwrap();
            let exact = match char_poly_exact(&g, &v) {
                Ok(cs) => cs.series_to(d),
                Err(Error::ZeroSeries) => TruncatedSeries::zero(ell(5), d, Precision::Exact),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let trunc = char_series_truncated(&g, &v, d, Precision::Exact).unwrap();
            prop_assert_eq!(exact.coefficients(), trunc.coefficients());
            let modular = char_series_truncated(&g, &v, d, Precision::Mod(2)).unwrap();
            prop_assert_eq!(modular, exact.reduced(Precision::Mod(2), d));
        }

        #[test]
        fn constant_term_vanishes_and_determinant_at_one_is_zero((g, vals) in random_voltage_graph()) {
            let v = VoltageAssignment::from_integers(&g, ell(3), &vals).unwrap();
            let m = voltage_matrix(&g, &v).unwrap();
            let det = laurent_determinant(&m);
            prop_assert!(det.at_one().is_zero());
            prop_assert!(det.t_coefficient(1).is_zero());
        }
    }
}
