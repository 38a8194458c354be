//! Exact determinants: fraction-free elimination over ℤ and a division-free
//! minor expansion for arbitrary commutative rings.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in rest.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..n {
                let mut v = pivot * &row[j];
                if !factor.is_zero() && !pivot_row[j].is_zero() {
                    v -= &factor * &pivot_row[j];
                }
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

pub fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant by expanding along rows while tracking the set of used
/// columns, so each minor is computed once. Uses only ring addition,
/// multiplication and negation; cost is O(n·2ⁿ) products.
pub fn minor_expansion_determinant<T, Add, Mul, Neg, IsZero>(
    m: &[Vec<T>],
    one: T,
    add: Add,
    mul: Mul,
    neg: Neg,
    is_zero: IsZero,
) -> Option<T>
where
    T: Clone,
    Add: Fn(&T, &T) -> T,
    Mul: Fn(&T, &T) -> T,
    Neg: Fn(&T) -> T,
    IsZero: Fn(&T) -> bool,
{
    let n = m.len();
    assert!(n <= 24, "minor expansion is limited to 24 rows");
    let full = (1usize << n) - 1;
    let mut table: Vec<Option<T>> = vec![None; 1 << n];
    table[0] = Some(one);
    for mask in 0..full {
        let Some(acc) = table[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        for c in 0..n {
            if mask & (1 << c) != 0 || is_zero(&m[row][c]) {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let mut term = mul(&acc, &m[row][c]);
            if above % 2 == 1 {
                term = neg(&term);
            }
            let slot = &mut table[mask | (1 << c)];
            *slot = Some(match slot.take() {
                Some(prev) => add(&prev, &term),
                None => term,
            });
        }
    }
    table[full].take()
}
