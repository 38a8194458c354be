//! μ and λ from the coefficients of a characteristic series, and ν from the
//! ℓ-valuations of spanning-tree counts along a tower.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{val_ell, OddPrime, Precision};
use crate::series::{TruncatedSeries, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    /// Read off a complete exact window.
    Exact,
    /// Read off the first `degree_cap + 1` coefficients known mod ℓ^precision.
    Prefix { precision: Precision, degree_cap: usize },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Exact => write!(f, "EXACT"),
            Certificate::Prefix { precision, degree_cap } => write!(f, "PREFIX({precision},{degree_cap})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuLambda {
    pub mu: u32,
    pub lambda: u32,
    pub certificate: Certificate,
    /// Set when μ comes from a prefix with no unit coefficient; such a μ is
    /// only an upper bound until checked against tree counts.
    pub provisional: bool,
}

/// μ = least coefficient valuation, λ + 1 = first index attaining it.
pub fn mu_lambda(series: &TruncatedSeries) -> Result<MuLambda> {
    let ell = series.ell();
    let cap = series.precision().digits();
    let mut best: Option<(u32, usize)> = None;
    for (n, c) in series.coefficients().iter().enumerate() {
        let Some(v) = val_ell(c, ell) else { continue };
        if cap.is_some_and(|p| v >= p) {
            continue;
        }
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, n));
        }
    }
    let Some((mu, first)) = best else {
        return Err(Error::ZeroSeries);
    };
    if first == 0 {
        return Err(Error::InvalidInput("series has a nonzero constant term; it is not a characteristic series".into()));
    }
    let lambda = first as u32 - 1;
    let exact = series.window() == Window::Complete && series.precision().is_exact();
    if exact {
        return Ok(MuLambda { mu, lambda, certificate: Certificate::Exact, provisional: false });
    }
    let certificate = Certificate::Prefix { precision: series.precision(), degree_cap: series.degree_cap() };
    Ok(MuLambda { mu, lambda, certificate, provisional: mu > 0 })
}

/// The fitted constant of the growth law and the level it holds from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NuFit {
    pub nu: i64,
    pub n0: u32,
}

/// Minimum number of consecutive levels that must agree on ν.
pub const STABLE_LEVELS: usize = 3;

/// Fits ord_ℓ(κ_n) = μℓⁿ + λn + ν on the tail of `ords` (indexed by n).
/// n0 is the least level ≥ 1 from which ν_n is constant, with at least
/// three levels in the tail.
pub fn nu_fit(mu: u32, lambda: u32, ell: OddPrime, ords: &[u64]) -> Result<NuFit> {
    let nus: Vec<BigInt> = ords
        .iter()
        .enumerate()
        .map(|(n, &o)| BigInt::from(o) - BigInt::from(mu) * ell.pow(n as u32) - BigInt::from(lambda as u64 * n as u64))
        .collect();
    if nus.len() < STABLE_LEVELS + 1 {
        return Err(Error::NotStabilized);
    }
    for n0 in 1..=nus.len() - STABLE_LEVELS {
        if nus[n0..].iter().all(|x| x == &nus[n0]) {
            let nu = nus[n0].to_i64().ok_or(Error::NotStabilized)?;
            return Ok(NuFit { nu, n0: n0 as u32 });
        }
    }
    Err(Error::NotStabilized)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IwasawaInvariants {
    pub mu: u32,
    pub lambda: u32,
    pub nu: Option<i64>,
    pub n0: Option<u32>,
    pub certificate: Certificate,
}

impl IwasawaInvariants {
    /// Combines series data with tree-count valuations when available. A
    /// provisional μ must be confirmed by a successful ν fit.
    pub fn assemble(ml: MuLambda, ell: OddPrime, ords: Option<&[u64]>) -> Result<Self> {
        let fit = match ords {
            Some(o) => match nu_fit(ml.mu, ml.lambda, ell, o) {
                Ok(f) => Some(f),
                Err(Error::NotStabilized) if !ml.provisional => None,
                Err(e) => return Err(e),
            },
            None if ml.provisional => return Err(Error::UncertifiedMu),
            None => None,
        };
        Ok(IwasawaInvariants {
            mu: ml.mu,
            lambda: ml.lambda,
            nu: fit.map(|f| f.nu),
            n0: fit.map(|f| f.n0),
            certificate: ml.certificate,
        })
    }
}

/// True when every coefficient of `series` below `n` is ≡ 0 mod ℓ.
pub fn vanishes_mod_ell_below(series: &TruncatedSeries, n: usize) -> bool {
    let ell = series.ell().to_bigint();
    series.coefficients().iter().take(n).all(|c| (c % &ell).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_series::char_poly_exact;
    use crate::multigraph::Multigraph;
    use crate::voltage::VoltageAssignment;
    use proptest::prelude::*;

    fn ell(p: u64) -> OddPrime {
        OddPrime::new(p).unwrap()
    }

    fn series(p: u64, c: &[i64], precision: Precision, window: Window) -> TruncatedSeries {
        let coeffs: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
        TruncatedSeries::new(ell(p), coeffs, c.len() - 1, precision, window)
    }

    #[test]
    fn exact_window_reads_off_invariants() {
        let s = series(3, &[0, 0, 9, 3, 6, 27], Precision::Exact, Window::Complete);
        let ml = mu_lambda(&s).unwrap();
        assert_eq!((ml.mu, ml.lambda, ml.certificate, ml.provisional), (1, 2, Certificate::Exact, false));
    }

    #[test]
    fn prefix_with_unit_is_certified() {
        let s = series(3, &[0, 0, 3, 1], Precision::Mod(2), Window::Prefix);
        let ml = mu_lambda(&s).unwrap();
        assert_eq!((ml.mu, ml.lambda, ml.provisional), (0, 2, false));
    }

    #[test]
    fn prefix_without_unit_is_provisional() {
        // ℓT² + T³ has μ = 0, but a window that stops at T² only sees ℓT².
        let s = series(3, &[0, 0, 3], Precision::Mod(3), Window::Prefix);
        let ml = mu_lambda(&s).unwrap();
        assert!(ml.provisional);
        assert_eq!(IwasawaInvariants::assemble(ml, ell(3), None), Err(Error::UncertifiedMu));
    }

    #[test]
    fn zero_window_is_an_error() {
        let s = series(3, &[0, 0, 9, 0], Precision::Mod(2), Window::Prefix);
        assert_eq!(mu_lambda(&s), Err(Error::ZeroSeries));
    }

    #[test]
    fn nu_fit_examples() {
        assert_eq!(nu_fit(0, 17, ell(3), &[0, 3, 10, 27, 44]).unwrap(), NuFit { nu: -24, n0: 2 });
        assert_eq!(nu_fit(0, 5, ell(3), &[0, 3, 8, 13]).unwrap(), NuFit { nu: -2, n0: 1 });
        assert_eq!(nu_fit(0, 3, ell(5), &[0, 3, 6, 9]).unwrap(), NuFit { nu: 0, n0: 1 });
        assert_eq!(nu_fit(0, 3, ell(5), &[0, 3, 6]), Err(Error::NotStabilized));
        assert_eq!(nu_fit(0, 1, ell(3), &[0, 1, 5, 9, 10]), Err(Error::NotStabilized));
        assert_eq!(nu_fit(1, 1, ell(3), &[0, 4, 11, 30]).unwrap(), NuFit { nu: 0, n0: 1 });
    }

    proptest! {
        #[test]
        fn unit_multiples_keep_invariants(alpha in proptest::collection::vec(-6i64..=6, 2..5), c in -4i64..=4) {
            let g = Multigraph::bouquet(alpha.len());
            let v = VoltageAssignment::from_integers(&g, ell(3), &alpha).unwrap();
            let cs = match char_poly_exact(&g, &v) {
                Ok(cs) => cs,
                Err(Error::ZeroSeries) => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let base = mu_lambda(&cs.cleared_series()).unwrap();
            let full = mu_lambda(&cs.series()).unwrap();
            prop_assert_eq!((base.mu, base.lambda), (full.mu, full.lambda));
            let d = cs.default_degree_cap();
            let unit = crate::char_series::binomial_series(&crate::padic::PadicInt::exact(c), d, ell(3)).unwrap();
            let twisted = cs.series().mul(&unit).with_window(Window::Complete);
            let t = mu_lambda(&twisted).unwrap();
            prop_assert_eq!((t.mu, t.lambda), (base.mu, base.lambda));
        }
    }
}
