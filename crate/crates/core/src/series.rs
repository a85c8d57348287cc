//! Truncated power series arithmetic on coefficient slices.
//!
//! All routines take ascending coefficients and return exactly `len` terms.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

pub fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a / b`; `b[0]` must be nonzero.
pub fn div(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let b0 = b[0];
    let mut out = vec![Complex64::zero(); len];
    for n in 0..len {
        let mut acc = a.get(n).copied().unwrap_or_else(Complex64::zero);
        for k in 1..=n.min(b.len().saturating_sub(1)) {
            acc -= b[k] * out[n - k];
        }
        out[n] = acc / b0;
    }
    out
}

pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
    a.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

pub fn eval(a: &[Complex64], x: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::zero(), |acc, &c| acc * x + c)
}

/// Pads or truncates to `len` terms.
pub fn resized(a: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = a.iter().copied().take(len).collect();
    v.resize(len, Complex64::zero());
    v
}
