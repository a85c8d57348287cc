//! Dense complex polynomials in ascending coefficient order.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

/// `coeffs[k]` multiplies `z^k`. The last stored coefficient is nonzero;
/// the zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::one())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `z - r`
    pub fn linear_factor(r: Complex64) -> Self {
        Self::new(vec![-r, Complex64::one()])
    }

    /// `lead * Π (z - r)^m`
    pub fn from_roots(roots: &[(Complex64, usize)], lead: Complex64) -> Self {
        let mut p = Self::constant(lead);
        for &(r, m) in roots {
            for _ in 0..m {
                p = &p * &Self::linear_factor(r);
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_else(Complex64::zero)
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` by Horner.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |a_k| |z|^k`, the natural scale of `p(z)` for rounding purposes.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Euclidean 2-norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(self.leading().inv())
    }

    /// Coefficient scales `Σ_j C(j,k) |a_j| r^(j-k)` of a Taylor shift by a
    /// point of modulus `r`: bounds on the rounding-free size of each term.
    pub fn shift_scales(&self, r: f64) -> Vec<f64> {
        let abs = Polynomial::new(self.coeffs.iter().map(|c| Complex64::new(c.norm(), 0.0)).collect());
        abs.taylor_shift(Complex64::new(r, 0.0)).coeffs.iter().map(|c| c.re).collect()
    }

    /// Drops leading coefficients whose modulus is at most `tol` times the norm.
    pub fn trim_relative(&self, tol: f64) -> Polynomial {
        let bound = tol * self.norm();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= bound) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// `w^n p(1/w)`; requires `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Polynomial {
        debug_assert!(self.is_zero() || n >= self.deg());
        let mut coeffs = vec![Complex64::zero(); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[n - k] = c;
        }
        Self::new(coeffs)
    }

    /// Coefficients of `p(z0 + x)` as a polynomial in `x`.
    pub fn taylor_shift(&self, z0: Complex64) -> Polynomial {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1] * z0;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// Quotient and remainder; panics if `divisor` is zero.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg();
        if self.is_zero() || self.deg() < dd {
            return (Self::zero(), self.clone());
        }
        let lead_inv = divisor.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Complex64::zero(); self.deg() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] * lead_inv;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = Complex64::zero();
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Multiplies by `z^k`.
    pub fn shift_up(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    pub fn pow(&self, k: usize) -> Polynomial {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

/// Approximate monic GCD by a normalized Euclidean remainder sequence.
///
/// A remainder counts as zero once its norm falls below `tol` times the
/// scale of the division step that produced it.
pub fn approximate_gcd(a: &Polynomial, b: &Polynomial, tol: f64) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let unit = |p: &Polynomial| p.scale(Complex64::new(1.0 / p.norm(), 0.0));
    let (mut f, mut g) = if a.deg() >= b.deg() { (unit(a), unit(b)) } else { (unit(b), unit(a)) };
    loop {
        if g.deg() == 0 {
            return Polynomial::one();
        }
        let (q, r) = f.div_rem(&g);
        let step_scale = 1.0f64.max(q.norm());
        let rn = r.norm();
        if rn <= tol * step_scale {
            return g.monic();
        }
        f = g;
        g = r.scale(Complex64::new(1.0 / rn, 0.0));
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
