//! Floating-point scalar abstraction used throughout the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Raises `x` to a small non-negative integer power by repeated squaring.
#[inline]
pub(crate) fn powu<T: Scalar>(x: T, n: u32) -> T {
    let mut acc = T::one();
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

const LEAF: usize = 64;

/// Fixed-shape pairwise reduction over `0..n`.
///
/// `leaf` accumulates a contiguous block of at most 64 indices; `combine` merges two
/// partial results. The tree shape depends only on `n`, so results are reproducible.
pub(crate) fn tree_reduce<A>(
    n: usize,
    leaf: &impl Fn(std::ops::Range<usize>) -> A,
    combine: &impl Fn(A, A) -> A,
) -> A {
    fn go<A>(
        lo: usize,
        hi: usize,
        leaf: &impl Fn(std::ops::Range<usize>) -> A,
        combine: &impl Fn(A, A) -> A,
    ) -> A {
        if hi - lo <= LEAF {
            leaf(lo..hi)
        } else {
            let mid = lo + (hi - lo) / 2;
            let a = go(lo, mid, leaf, combine);
            let b = go(mid, hi, leaf, combine);
            combine(a, b)
        }
    }
    go(0, n, leaf, combine)
}

/// Pairwise sum of `f(i)` for `i in 0..n`.
pub(crate) fn pairwise_sum<T: Scalar>(n: usize, f: impl Fn(usize) -> T) -> T {
    tree_reduce(
        n,
        &|r: std::ops::Range<usize>| {
            let mut s = T::zero();
            for i in r {
                s += f(i);
            }
            s
        },
        &|a, b| a + b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powu_matches_powi() {
        for n in 0..8u32 {
            assert_eq!(powu(1.5f64, n), 1.5f64.powi(n as i32));
        }
        assert_eq!(powu(0.0f64, 0), 1.0);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let s: f64 = pairwise_sum(10_000, |i| i as f64);
        assert_eq!(s, 49_995_000.0);
        let s32: f32 = pairwise_sum(0, |_| 1.0);
        assert_eq!(s32, 0.0);
    }
}
