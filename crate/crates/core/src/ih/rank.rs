//! Exact rank of sparse integer matrices by fraction-free column reduction.
//!
//! Columns are reduced against earlier pivots keyed by their lowest nonzero
//! row; each update is `a·c − b·p` followed by division by the content, so
//! no fractions appear. Entries are `i128` with checked arithmetic, and the
//! whole reduction is redone over `BigInt` if any step would overflow.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

pub type SparseCol = Vec<(usize, i64)>;

trait Exact: Clone + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `a·x − b·y`, or `None` on overflow.
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(a: &Self, b: &Self) -> Self;
    fn div(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Exact for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl Exact for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(a: &Self, b: &Self) -> Self {
        num_integer::Integer::gcd(a, b)
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == BigInt::from(1)
    }
}

fn reduce<T: Exact>(cols: &[SparseCol]) -> Option<usize> {
    let mut pivots: HashMap<usize, Vec<(usize, T)>> = HashMap::new();
    let mut rank = 0;
    for col in cols {
        let mut c: Vec<(usize, T)> = col.iter().filter(|e| e.1 != 0).map(|&(r, v)| (r, T::from_i64(v))).collect();
        c.sort_by_key(|e| e.0);
        loop {
            let Some((low, lv)) = c.last().cloned() else {
                break;
            };
            let Some(p) = pivots.get(&low) else {
                pivots.insert(low, c);
                rank += 1;
                break;
            };
            let pv = &p.last().unwrap().1;
            let g = T::gcd(&lv, pv);
            let (a, b) = (pv.div(&g), lv.div(&g));
            c = combine(&a, &c, &b, p)?;
        }
    }
    Some(rank)
}

/// `a·x − b·y` on sorted sparse vectors, divided by the content.
fn combine<T: Exact>(a: &T, x: &[(usize, T)], b: &T, y: &[(usize, T)]) -> Option<Vec<(usize, T)>> {
    let zero = T::from_i64(0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (r, v) = match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) if p.0 == q.0 => {
                i += 1;
                j += 1;
                (p.0, T::cross(a, &p.1, b, &q.1)?)
            }
            (Some(p), Some(q)) if p.0 < q.0 => {
                i += 1;
                (p.0, T::cross(a, &p.1, b, &zero)?)
            }
            (Some(p), None) => {
                i += 1;
                (p.0, T::cross(a, &p.1, b, &zero)?)
            }
            (_, Some(q)) => {
                j += 1;
                (q.0, T::cross(a, &zero, b, &q.1)?)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((r, v));
        }
    }
    let mut g = zero;
    for (_, v) in &out {
        g = T::gcd(&g, v);
        if g.is_unit() {
            return Some(out);
        }
    }
    if !g.is_zero() {
        for e in out.iter_mut() {
            e.1 = e.1.div(&g);
        }
    }
    Some(out)
}

/// Rank over Q of the matrix with the given sparse columns.
pub fn rank(cols: &[SparseCol]) -> usize {
    reduce::<i128>(cols).unwrap_or_else(|| reduce::<BigInt>(cols).expect("BigInt arithmetic cannot overflow"))
}

/// Rank of the submatrix keeping the given columns and the rows for which
/// `keep_row` holds.
pub fn sub_rank(cols: &[SparseCol], keep_col: impl Fn(usize) -> bool, keep_row: impl Fn(usize) -> bool) -> usize {
    let sub: Vec<SparseCol> = cols
        .iter()
        .enumerate()
        .filter(|(j, _)| keep_col(*j))
        .map(|(_, c)| c.iter().filter(|(r, _)| keep_row(*r)).copied().collect())
        .collect();
    rank(&sub)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> Vec<SparseCol> {
        let ncols = rows[0].len();
        (0..ncols)
            .map(|j| rows.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(i, r)| (i, r[j])).collect())
            .collect()
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&dense(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&dense(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]])), 2);
        assert_eq!(rank(&dense(&[&[2, 3], &[4, 5]])), 2);
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn big_entries_fall_back() {
        let big = 1i64 << 62;
        let m = dense(&[&[big, big - 1, 1], &[big - 3, big, 1], &[1, 1, 0]]);
        let via_big = reduce::<BigInt>(&m).unwrap();
        assert_eq!(rank(&m), via_big);
    }
}
