//! End-to-end runs through the public API.

use num_bigint::BigInt;
use proptest::prelude::*;

use iwagraph::char_series::char_poly_exact;
use iwagraph::invariants::mu_lambda;
use iwagraph::stats::{bouquet_enumerate, DEFAULT_ENUMERATION_CAP};
use iwagraph::tower::{gauge_to_tree, is_admissible, kappa_sequence};
use iwagraph::{IwasawaInvariants, Multigraph, OddPrime, VoltageAssignment};

fn ell(p: u64) -> OddPrime {
    OddPrime::new(p).unwrap()
}

#[test]
fn series_to_growth_law() {
    let g = Multigraph::from_undirected(2, &[(0, 0), (0, 1), (0, 1), (1, 1)]).unwrap();
    let v = VoltageAssignment::from_integers(&g, ell(3), &[2, 0, 1, 1]).unwrap();
    let tree = g.bfs_tree().unwrap();
    assert!(is_admissible(&g, &v, &tree).unwrap());
    let ml = mu_lambda(&char_poly_exact(&g, &v).unwrap().cleared_series()).unwrap();
    let ords: Vec<u64> = kappa_sequence(&g, &v, 4, 1200).unwrap().iter().map(|k| k.ord).collect();
    let inv = IwasawaInvariants::assemble(ml, ell(3), Some(&ords)).unwrap();
    let n0 = inv.n0.expect("growth law stabilizes by level 1");
    for (n, &o) in ords.iter().enumerate().skip(n0 as usize) {
        let predicted = inv.mu as i64 * 3i64.pow(n as u32) + inv.lambda as i64 * n as i64 + inv.nu.unwrap();
        assert_eq!(o as i64, predicted);
    }
    let json = serde_json::to_value(inv).unwrap();
    assert_eq!(json["certificate"]["kind"], "exact");
}

#[test]
fn report_serializes_exact_rationals() {
    let r = bouquet_enumerate(ell(5), 2, 1, DEFAULT_ENUMERATION_CAP).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["total"], "24");
    let rows = json["rows"].as_array().unwrap();
    assert!(rows.iter().any(|row| row["empirical"] == "2/3" && row["theoretical"] == "2/3"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    /// Re-gauging a voltage onto a spanning tree leaves the series and the
    /// tree counts unchanged.
    #[test]
    fn gauge_invariance(values in proptest::collection::vec(-6i64..7, 5), p in prop::sample::select(vec![3u64, 5])) {
        let g = Multigraph::from_undirected(3, &[(0, 1), (1, 2), (0, 2), (2, 2), (0, 1)]).unwrap();
        let v = VoltageAssignment::from_integers(&g, ell(p), &values).unwrap();
        let tree = g.bfs_tree().unwrap();
        let gauged = gauge_to_tree(&g, &v, &tree).unwrap();
        prop_assume!(is_admissible(&g, &gauged, &tree).unwrap());
        let before = char_poly_exact(&g, &v).unwrap();
        let after = char_poly_exact(&g, &gauged).unwrap();
        let coeffs = |s: &iwagraph::char_series::CharacteristicSeries| -> Vec<BigInt> { (0..12).map(|n| s.beta(n)).collect() };
        prop_assert_eq!(coeffs(&before), coeffs(&after));
        let k1: Vec<BigInt> = kappa_sequence(&g, &v, 1, 100).unwrap().into_iter().map(|k| k.kappa).collect();
        let k2: Vec<BigInt> = kappa_sequence(&g, &gauged, 1, 100).unwrap().into_iter().map(|k| k.kappa).collect();
        prop_assert_eq!(k1, k2);
    }
}
