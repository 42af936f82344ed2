//! Exact big-integer counting used by keyword sampling and the
//! key-space calculator.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient `C(n, g)` as an exact integer.
pub fn binomial(n: u64, g: u64) -> BigUint {
    if g > n {
        return BigUint::zero();
    }
    let g = g.min(n - g);
    let mut acc = BigUint::one();
    for i in 0..g {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Base-2 logarithm of a positive integer, to double precision.
pub fn log2_biguint(value: &BigUint) -> f64 {
    assert!(!value.is_zero(), "log2 of zero");
    let bits = value.bits();
    if bits <= 64 {
        let v = value.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    // Take the top 64 bits as a mantissa.
    let shift = bits - 64;
    let top: BigUint = value >> shift;
    let mantissa = top.iter_u64_digits().next().unwrap_or(0);
    (mantissa as f64).log2() + shift as f64
}
