//! Integer kernels shared by the series and Nahm layers.
//!
//! Each routine is generic over [`Int`] so it can run first in checked `i128`
//! and be replayed in `BigInt` when an intermediate overflows.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Int: Clone + Send + Sync + std::fmt::Debug {
    fn nil() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn is_nil(&self) -> bool;
    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) -> Option<()>;
    fn add_to(&mut self, a: &Self) -> Option<()>;
    fn negated(&self) -> Option<Self>;
}

impl Int for i128 {
    fn nil() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn add_mul(&mut self, a: &Self, b: &Self) -> Option<()> {
        *self = self.checked_add(a.checked_mul(*b)?)?;
        Some(())
    }
    fn add_to(&mut self, a: &Self) -> Option<()> {
        *self = self.checked_add(*a)?;
        Some(())
    }
    fn negated(&self) -> Option<Self> {
        self.checked_neg()
    }
}

impl Int for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) -> Option<()> {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self += a * b;
        }
        Some(())
    }
    fn add_to(&mut self, a: &Self) -> Option<()> {
        *self += a;
        Some(())
    }
    fn negated(&self) -> Option<Self> {
        Some(-self)
    }
}

pub(crate) fn bits(b: &BigInt) -> u64 {
    b.abs().bits()
}

/// Dense product of two sparse integer series, keeping exponents in `[lo, end)`.
pub(crate) fn convolve<T: Int>(f: &[(i64, T)], g: &[(i64, T)], lo: i64, end: i64) -> Option<Vec<T>> {
    let len = (end - lo).max(0) as usize;
    let mut acc = vec![T::nil(); len];
    let Some(g0) = g.first().map(|t| t.0) else {
        return Some(acc);
    };
    for (i, a) in f {
        if i + g0 >= end {
            break;
        }
        for (j, b) in g {
            let k = i + j;
            if k >= end {
                break;
            }
            acc[(k - lo) as usize].add_mul(a, b)?;
        }
    }
    Some(acc)
}

/// Power series inverse of a dense array whose first entry is `±1`, to `len` terms.
pub(crate) fn inverse_unit<T: Int>(f: &[(usize, T)], lead: &T, len: usize) -> Option<Vec<T>> {
    let mut g = vec![T::nil(); len];
    if len == 0 {
        return Some(g);
    }
    g[0] = lead.clone();
    let tail: Vec<&(usize, T)> = f.iter().filter(|(k, _)| *k > 0).collect();
    for n in 1..len {
        let mut s = T::nil();
        for (k, c) in &tail {
            if *k > n {
                break;
            }
            s.add_mul(c, &g[n - k])?;
        }
        // lead is its own inverse
        let mut t = T::nil();
        t.add_mul(&s, lead)?;
        g[n] = t.negated()?;
    }
    Some(g)
}

/// In place multiplication by `1/(1 - x^stride)`.
pub(crate) fn divide_one_minus<T: Int>(a: &mut [T], stride: usize) -> Option<()> {
    for i in stride..a.len() {
        let (lo, hi) = a.split_at_mut(i);
        if !lo[i - stride].is_nil() {
            hi[0].add_to(&lo[i - stride])?;
        }
    }
    Some(())
}

/// Euler transform: coefficients of `∏_{n≥1} (1 - x^n)^(-e_n)` to `len` terms.
///
/// Uses `n a_n = Σ_{k=1}^{n} c_k a_{n-k}` with `c_k = Σ_{d|k} d e_d`.
pub(crate) fn euler_transform(e: &[i64], len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    for (d, ed) in e.iter().enumerate().skip(1) {
        if *ed == 0 || d >= len {
            continue;
        }
        let w = BigInt::from(d as i64 * ed);
        let mut k = d;
        while k < len {
            c[k] += &w;
            k += d;
        }
    }
    let nz: Vec<(usize, BigInt)> = c
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !Zero::is_zero(v))
        .collect();
    let mut a = vec![BigInt::zero(); len];
    if len == 0 {
        return a;
    }
    a[0] = BigInt::from(1);
    for n in 1..len {
        let mut s = BigInt::zero();
        for (k, ck) in &nz {
            if *k > n {
                break;
            }
            if !Zero::is_zero(&a[n - k]) {
                s += ck * &a[n - k];
            }
        }
        a[n] = s / BigInt::from(n as i64);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_transform_partitions() {
        let mut e = vec![0i64; 12];
        for v in e.iter_mut().skip(1) {
            *v = 1;
        }
        let p: Vec<i64> = euler_transform(&e, 12).iter().map(|b| b.to_i64().unwrap()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56]);
    }

    #[test]
    fn divide_by_one_minus_square() {
        let mut a: Vec<i128> = vec![1, 2, 3, 4, 5, 6, 7];
        divide_one_minus(&mut a, 2).unwrap();
        assert_eq!(a, vec![1, 2, 4, 6, 9, 12, 16]);
    }

    #[test]
    fn i128_overflow_is_reported() {
        let mut x: i128 = i128::MAX - 1;
        assert!(x.add_mul(&2, &1).is_none());
    }
}
