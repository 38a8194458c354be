//! Quadratic forms over F_ℓ, ℓ odd: congruence diagonalization and the
//! closed-form point counts.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::{quadratic_character_u64, OddPrime};

/// Q(x) = Σ a_ij x_i x_j with A symmetric, entries reduced into [0, ℓ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFormFl {
    ell: OddPrime,
    matrix: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalization {
    /// Diagonal entries of an equivalent diagonal form, nonzero ones first.
    pub diagonal: Vec<u64>,
    pub rank: usize,
    /// η of the product of the nonzero diagonal entries (1 for rank 0).
    pub discriminant_class: i8,
}

impl QuadraticFormFl {
    pub fn new(ell: OddPrime, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        let p = ell.get() as i64;
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        let reduced: Vec<Vec<u64>> = matrix.iter().map(|r| r.iter().map(|&a| a.rem_euclid(p) as u64).collect()).collect();
        for i in 0..n {
            for j in 0..i {
                if reduced[i][j] != reduced[j][i] {
                    return Err(Error::InvalidInput(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(QuadraticFormFl { ell, matrix: reduced })
    }

    /// a_1 x_1² + … + a_n x_n².
    pub fn diagonal(ell: OddPrime, entries: &[i64]) -> Self {
        let n = entries.len();
        let m = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect()).collect();
        QuadraticFormFl::new(ell, m).expect("diagonal matrices are symmetric")
    }

    pub fn ell(&self) -> OddPrime {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn evaluate(&self, x: &[u64]) -> u64 {
        let p = self.ell.get() as u128;
        let mut acc = 0u128;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                acc = (acc + a as u128 * x[i] as u128 % p * x[j] as u128) % p;
            }
        }
        acc as u64
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|&a| a == 0))
    }

    /// Symmetric Gaussian elimination by congruence. When no diagonal pivot is
    /// left but some a_ij ≠ 0, substitute x_i ↦ x_i + x_j, making a_ii = 2a_ij.
    pub fn diagonalize(&self) -> Diagonalization {
        let p = self.ell.get();
        let n = self.n();
        let mut a = self.matrix.clone();
        let mut diagonal = Vec::with_capacity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| a[i][i] != 0);
            let pivot = match pivot {
                Some(i) => i,
                None => {
                    let Some((i, j)) = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != 0) else {
                        break;
                    };
                    for c in 0..n {
                        a[i][c] = (a[i][c] + a[j][c]) % p;
                    }
                    for r in 0..n {
                        a[r][i] = (a[r][i] + a[r][j]) % p;
                    }
                    i
                }
            };
            a.swap(k, pivot);
            for row in a.iter_mut() {
                row.swap(k, pivot);
            }
            let inv = inverse_mod(a[k][k], p);
            for i in k + 1..n {
                if a[i][k] == 0 {
                    continue;
                }
                let f = a[i][k] * inv % p;
                for c in 0..n {
                    a[i][c] = (a[i][c] + (p - f) * a[k][c]) % p;
                }
                for r in 0..n {
                    a[r][i] = (a[r][i] + (p - f) * a[r][k]) % p;
                }
            }
            diagonal.push(a[k][k]);
        }
        let rank = diagonal.len();
        diagonal.resize(n, 0);
        let disc = diagonal[..rank].iter().fold(1u64, |acc, &d| acc * d % p);
        Diagonalization { diagonal, rank, discriminant_class: quadratic_character_u64(disc, self.ell) }
    }

    /// Number of x ∈ F_ℓⁿ with Q(x) = 0.
    pub fn count_zeros(&self) -> Result<BigInt> {
        let d = self.diagonalize();
        if d.rank == 0 {
            return Err(Error::ZeroForm);
        }
        let q = BigInt::from(self.ell.get());
        let n = self.n() as u32;
        let base = num_traits::pow(q.clone(), (n - 1) as usize);
        if d.rank % 2 == 1 {
            return Ok(base);
        }
        let half = (d.rank / 2) as u32;
        let eta = signed_class(self.ell, half, d.discriminant_class);
        Ok(base + (&q - 1) * num_traits::pow(q, (n - half - 1) as usize) * eta)
    }

    /// Number of x with Q(x) = b, for nondegenerate Q in an even number of
    /// variables.
    pub fn count_level_set(&self, b: i64) -> Result<BigInt> {
        let n = self.n();
        if n % 2 == 1 {
            return Err(Error::OddDimension);
        }
        let d = self.diagonalize();
        if d.rank != n {
            return Err(Error::DegenerateForm);
        }
        let p = self.ell.get();
        let q = BigInt::from(p);
        let v = if b.rem_euclid(p as i64) == 0 { &q - 1 } else { BigInt::from(-1) };
        let eta = signed_class(self.ell, (n / 2) as u32, d.discriminant_class);
        Ok(num_traits::pow(q.clone(), n - 1) + v * num_traits::pow(q, (n - 2) / 2) * eta)
    }
}

/// η((−1)^k Δ) given η(Δ).
fn signed_class(ell: OddPrime, k: u32, eta_disc: i8) -> i64 {
    let eta_minus_one: i64 = if ell.get() % 4 == 1 { 1 } else { -1 };
    let sign = if k % 2 == 0 { 1 } else { eta_minus_one };
    sign * eta_disc as i64
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    crate::padic::pow_mod(a, p - 2, p)
}

/// Lower bound ℓ^(n−d), d = Σ degrees, on the number of common zeros of a
/// system without constant terms (which is also divisible by ℓ).
pub fn warning_lower_bound(degrees: &[u32], n: u32, ell: OddPrime) -> Result<BigInt> {
    let d: usize = degrees.iter().map(|&x| x as usize).sum();
    if d >= n as usize {
        return Err(Error::DegreeTooLarge { degree: d, n: n as usize });
    }
    Ok(ell.pow(n - d as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn ell(p: u64) -> OddPrime {
        OddPrime::new(p).unwrap()
    }

    fn points(p: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
        (0..p.pow(n as u32)).map(move |mut k| {
            (0..n)
                .map(|_| {
                    let d = k % p;
                    k /= p;
                    d
                })
                .collect()
        })
    }

    fn brute_count(q: &QuadraticFormFl, b: u64) -> BigInt {
        BigInt::from(points(q.ell().get(), q.n()).filter(|x| q.evaluate(x) == b).count())
    }

    fn random_form(rng: &mut impl Rng, p: u64, n: usize) -> QuadraticFormFl {
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                // sparse entries so that degenerate forms show up
                let a = if rng.gen_bool(0.5) { rng.gen_range(0..p as i64) } else { 0 };
                m[i][j] = a;
                m[j][i] = a;
            }
        }
        QuadraticFormFl::new(ell(p), m).unwrap()
    }

    #[test]
    fn diagonalize_examples() {
        let d = QuadraticFormFl::diagonal(ell(5), &[1, 1]).diagonalize();
        assert_eq!((d.rank, d.discriminant_class), (2, 1));
        // (y − z)²
        let q = QuadraticFormFl::new(ell(7), vec![vec![1, -1], vec![-1, 1]]).unwrap();
        assert_eq!(q.diagonalize().rank, 1);
        // xy has no diagonal pivot
        let q = QuadraticFormFl::new(ell(3), vec![vec![0, 2], vec![2, 0]]).unwrap();
        assert_eq!(q.diagonalize().rank, 2);
        assert_eq!(q.count_zeros().unwrap(), brute_count(&q, 0));
    }

    #[test]
    fn count_examples() {
        assert_eq!(QuadraticFormFl::diagonal(ell(5), &[1, 1]).count_zeros().unwrap(), BigInt::from(9));
        assert_eq!(QuadraticFormFl::diagonal(ell(3), &[1, 1, 1]).count_zeros().unwrap(), BigInt::from(9));
        assert_eq!(QuadraticFormFl::diagonal(ell(7), &[0, 0, 0]).count_zeros(), Err(Error::ZeroForm));
        assert_eq!(QuadraticFormFl::diagonal(ell(7), &[3, 0, 0, 0]).count_zeros().unwrap(), BigInt::from(343));
        let q = QuadraticFormFl::diagonal(ell(5), &[1, 1]);
        assert_eq!(q.count_level_set(1).unwrap(), BigInt::from(4));
        assert_eq!(q.count_level_set(0).unwrap(), BigInt::from(9));
        assert_eq!(QuadraticFormFl::diagonal(ell(3), &[1, -1]).count_level_set(1).unwrap(), BigInt::from(2));
        assert_eq!(QuadraticFormFl::diagonal(ell(3), &[1, 1, 1]).count_level_set(1), Err(Error::OddDimension));
        assert_eq!(QuadraticFormFl::diagonal(ell(3), &[1, 0]).count_level_set(1), Err(Error::DegenerateForm));
    }

    #[test]
    fn zero_counts_match_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [3u64, 5, 7] {
            for n in 1..=6usize {
                if p.pow(n as u32) > 200_000 {
                    continue;
                }
                for _ in 0..200 {
                    let q = random_form(&mut rng, p, n);
                    if q.is_zero() {
                        continue;
                    }
                    assert_eq!(q.count_zeros().unwrap(), brute_count(&q, 0), "{q:?}");
                }
            }
        }
    }

    #[test]
    fn level_sets_match_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for p in [3u64, 5, 7] {
            for n in [2usize, 4] {
                for _ in 0..40 {
                    let q = random_form(&mut rng, p, n);
                    if q.diagonalize().rank != n {
                        continue;
                    }
                    for b in 0..p {
                        assert_eq!(q.count_level_set(b as i64).unwrap(), brute_count(&q, b));
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_form_is_congruent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for p in [3u64, 5, 7] {
            for _ in 0..100 {
                let q = random_form(&mut rng, p, 4);
                let d = q.diagonalize();
                let diag: Vec<i64> = d.diagonal.iter().map(|&x| x as i64).collect();
                let dq = QuadraticFormFl::diagonal(ell(p), &diag);
                for b in 0..p {
                    assert_eq!(brute_count(&q, b), brute_count(&dq, b));
                }
            }
        }
    }

    #[test]
    fn sum_of_squares_matches_closed_form() {
        for p in [3u64, 5, 7, 11, 13] {
            for t in 1..=8u32 {
                let q = QuadraticFormFl::diagonal(ell(p), &vec![1; t as usize]);
                let nonzero = q.count_zeros().unwrap() - 1;
                let pb = BigInt::from(p);
                let expected = if t % 2 == 0 {
                    let sign = if (t as u64 * (p - 1) / 4) % 2 == 0 { 1 } else { -1 };
                    num_traits::pow(pb.clone(), t as usize - 1)
                        + sign * (&pb - 1) * num_traits::pow(pb, t as usize / 2 - 1)
                        - 1
                } else {
                    num_traits::pow(pb, t as usize - 1) - 1
                };
                assert_eq!(nonzero, expected, "ℓ={p} t={t}");
            }
        }
    }

    #[test]
    fn warning_examples() {
        assert_eq!(warning_lower_bound(&[2, 4], 10, ell(11)).unwrap(), BigInt::from(11u64.pow(4)));
        assert_eq!(warning_lower_bound(&[2], 3, ell(3)).unwrap(), BigInt::from(3));
        assert_eq!(warning_lower_bound(&[2, 2], 4, ell(3)), Err(Error::DegreeTooLarge { degree: 4, n: 4 }));
    }

    /// A polynomial as (coefficient, exponent vector) terms.
    type Poly = Vec<(u64, Vec<u32>)>;

    fn eval(poly: &Poly, x: &[u64], p: u64) -> u64 {
        poly.iter().fold(0, |acc, (c, e)| {
            let m = e.iter().zip(x).fold(*c, |m, (&k, &xi)| m * crate::padic::pow_mod(xi, k as u64, p) % p);
            (acc + m) % p
        })
    }

    #[test]
    fn warning_bound_and_divisibility_by_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        let mut systems = 0;
        while systems < 50 {
            let p = if rng.gen_bool(0.5) { 3u64 } else { 5 };
            let n = rng.gen_range(2..=if p == 3 { 6 } else { 5 });
            let k = rng.gen_range(1..=2usize);
            let degrees: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
            if degrees.iter().sum::<u32>() >= n as u32 {
                continue;
            }
            let system: Vec<Poly> = degrees
                .iter()
                .map(|&deg| {
                    (0..4)
                        .map(|_| {
                            let mut e = vec![0u32; n];
                            let total = rng.gen_range(1..=deg);
                            for _ in 0..total {
                                e[rng.gen_range(0..n)] += 1;
                            }
                            (rng.gen_range(1..p), e)
                        })
                        .collect()
                })
                .collect();
            let count = points(p, n).filter(|x| system.iter().all(|f| eval(f, x, p) == 0)).count() as u64;
            assert_eq!(count % p, 0);
            assert!(BigInt::from(count) >= warning_lower_bound(&degrees, n as u32, ell(p)).unwrap());
            systems += 1;
        }
    }

    proptest! {
        #[test]
        fn round_trip_through_congruence(diag in proptest::collection::vec(0i64..7, 1..5), seed in any::<u64>()) {
            let p = 7u64;
            let n = diag.len();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // random invertible P (unit upper triangular times permutation)
            let mut pm = vec![vec![0i64; n]; n];
            for i in 0..n {
                pm[i][i] = rng.gen_range(1..p as i64);
                for j in i + 1..n {
                    pm[i][j] = rng.gen_range(0..p as i64);
                }
            }
            // A = Pᵀ D P
            let mut a = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = (0..n).map(|k| pm[k][i] * diag[k] * pm[k][j]).sum::<i64>() % p as i64;
                }
            }
            let q = QuadraticFormFl::new(ell(p), a).unwrap();
            let d = q.diagonalize();
            let rank = diag.iter().filter(|&&x| x != 0).count();
            prop_assert_eq!(d.rank, rank);
            let disc = diag.iter().filter(|&&x| x != 0).fold(1u64, |acc, &x| acc * x as u64 % p);
            prop_assert_eq!(d.discriminant_class, quadratic_character_u64(disc, ell(p)));
        }
    }
}
