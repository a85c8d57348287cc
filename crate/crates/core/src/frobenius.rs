//! Frobenius solutions of `x^2 u'' + q(x) u = 0` at a regular singular point.
//!
//! With `q = Σ b_k x^k` and `u = x^s Σ c_k x^k`, `c_0 = 1`, the coefficients
//! satisfy `f(s+n) c_n + R_n = 0` where `f(s) = s(s-1) + b_0` is the indicial
//! polynomial and `R_n = Σ_{i<n} c_i b_{n-i}`. When the two exponents differ
//! by an integer `m` the recurrence from the smaller exponent breaks at
//! `n = m` unless `R_m` vanishes; if it does not, the second solution picks
//! up a logarithm.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::schwarzian::{weight_to_angle, SchwarzianTail};
use crate::series;
use crate::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 32;

/// `|f(s+n)|` below this is a resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// Angles this close to an integer are treated as that integer.
pub const INTEGER_ANGLE_TOLERANCE: f64 = 1e-9;

/// Relative size of `R_m` under which a singularity counts as apparent.
pub const APPARENT_TOLERANCE: f64 = 1e-8;

/// Coefficients `b_k` of `q(x) = Σ b_k x^k`, taken as exact up to the
/// stored order and zero beyond it.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Pads to at least two coefficients, so the truncation order is at least one.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("power series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidArgument("power series coefficients must be finite".into()));
        }
        if coeffs.len() < 2 {
            coeffs.push(Complex64::zero());
        }
        Ok(PowerSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The Euler equation `x^2 u'' + b0 u = 0`.
    pub fn constant(b0: Complex64) -> Self {
        PowerSeries { coeffs: alloc::vec![b0, Complex64::zero()] }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(Complex64::zero)
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `f(s) = s(s-1) + b_0`.
    pub fn indicial(&self, s: Complex64) -> Complex64 {
        s * (s - 1.0) + self.coeffs[0]
    }

    /// `max_k |b_k|^{1/k}` over `k >= 1`: a growth scale for the recurrence.
    fn growth(&self) -> f64 {
        self.coeffs.iter().enumerate().skip(1).map(|(k, b)| b.norm().powf(1.0 / k as f64)).fold(0.0, f64::max)
    }
}

/// The `ln x` part of a logarithmic solution: `ln x · x^exponent Σ coeffs_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCompanion {
    pub exponent: Complex64,
    pub coeffs: Vec<Complex64>,
}

/// `u = x^s Σ c_k x^k (+ ln x · companion)` truncated at order `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusSolution {
    pub exponent: Complex64,
    pub coeffs: Vec<Complex64>,
    pub logarithmic: bool,
    pub companion: Option<LogCompanion>,
}

impl FrobeniusSolution {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(u, du/dx)` at `x = exp(lx)`; the branch of `x^s` and `ln x` is the
    /// one given by `lx`, so adding `2πi` to `lx` continues once around 0.
    pub fn eval_at_log(&self, lx: Complex64) -> (Complex64, Complex64) {
        let x = lx.exp();
        let (u, du) = power_part(self.exponent, &self.coeffs, lx, x);
        match &self.companion {
            None => (u, du),
            Some(comp) => {
                let (v, dv) = power_part(comp.exponent, &comp.coeffs, lx, x);
                (u + lx * v, du + lx * dv + v / x)
            }
        }
    }

    /// `(u, du/dx)` on the principal branch.
    pub fn eval(&self, x: Complex64) -> (Complex64, Complex64) {
        self.eval_at_log(x.ln())
    }
}

fn power_part(s: Complex64, c: &[Complex64], lx: Complex64, x: Complex64) -> (Complex64, Complex64) {
    let xs = (s * lx).exp();
    let p = series::eval(c, x);
    let dp = series::eval(&series::derivative(c), x);
    // d/dx x^s p = x^s (s p / x + p')
    (xs * p, xs * (s * p / x + dp))
}

/// Exponents `((1-α)/2, (1+α)/2)` for `q(0) = (1-α^2)/4`.
pub fn indicial_roots(alpha: f64) -> (f64, f64) {
    (0.5 * (1.0 - alpha), 0.5 * (1.0 + alpha))
}

fn r_n(q: &PowerSeries, c: &[Complex64], n: usize) -> Complex64 {
    (0..n).map(|i| c[i] * q.coeff(n - i)).sum()
}

/// Runs the recurrence from `s` up to order `n`. Fails at the first index
/// where the indicial factor vanishes.
pub fn frobenius_series(q: &PowerSeries, s: Complex64, n: usize) -> Result<FrobeniusSolution> {
    if n < 1 {
        return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
    }
    let mut c = Vec::with_capacity(n + 1);
    c.push(Complex64::one());
    for k in 1..=n {
        let fk = q.indicial(s + k as f64);
        if fk.norm() < RESONANCE_TOLERANCE {
            return Err(Error::Resonance { index: k });
        }
        let r = r_n(q, &c, k);
        c.push(-r / fk);
    }
    Ok(FrobeniusSolution { exponent: s, coeffs: c, logarithmic: false, companion: None })
}

fn check_weight(q: &PowerSeries, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    let expected = 0.25 * (1.0 - alpha * alpha);
    let b0 = q.coeff(0);
    if (b0 - expected).norm() > 1e-9 * (1.0 + expected.abs()) {
        return Err(Error::InvalidArgument(format!(
            "q(0) = {b0} does not match (1 - alpha^2)/4 = {expected} for alpha = {alpha}"
        )));
    }
    Ok(())
}

/// Runs the recurrence from the smaller exponent up to `m - 1` and returns
/// `(c_0..c_{m-1}, R_m)`.
fn below_resonance(q: &PowerSeries, m: usize) -> (Vec<Complex64>, Complex64) {
    let s0 = Complex64::new(0.5 * (1.0 - m as f64), 0.0);
    let mut c = alloc::vec![Complex64::one()];
    for k in 1..m {
        let fk = q.indicial(s0 + k as f64);
        let r = r_n(q, &c, k);
        c.push(-r / fk);
    }
    let rm = r_n(q, &c, m);
    (c, rm)
}

/// `R_m` at the smaller exponent for integer angle `m`: zero exactly when
/// the singularity is apparent.
pub fn resonance_obstruction(q: &PowerSeries, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::InvalidArgument("integer angle must be at least 1".into()));
    }
    check_weight(q, m as f64)?;
    Ok(below_resonance(q, m).1)
}

/// Whether `R_m` is negligible against the natural size `max(1, ρ)^m` of
/// the recurrence, `ρ = max |b_k|^{1/k}`.
pub fn is_apparent(q: &PowerSeries, rm: Complex64, m: usize) -> bool {
    rm.norm() <= APPARENT_TOLERANCE * q.growth().max(1.0).powi(m as i32)
}

/// A basis `(u_0, u_1)` with exponents `s_0 <= s_1`.
///
/// For integer `α = m` the coefficient `c_m` of `u_0` is free when the
/// singularity is apparent and is set to zero. Otherwise `u_0` is
/// `x^{s_0} Σ a_k x^k + κ ln x · u_1` with `κ = -R_m/f'(s_1)` and `a_m = 0`.
pub fn local_solutions(q: &PowerSeries, alpha: f64, n: usize) -> Result<(FrobeniusSolution, FrobeniusSolution)> {
    check_weight(q, alpha)?;
    if n < 1 {
        return Err(Error::InvalidArgument("truncation order must be at least 1".into()));
    }
    let rounded = alpha.round();
    if (alpha - rounded).abs() >= INTEGER_ANGLE_TOLERANCE || rounded < 1.0 {
        let (s0, s1) = indicial_roots(alpha);
        let u0 = frobenius_series(q, Complex64::new(s0, 0.0), n)?;
        let u1 = frobenius_series(q, Complex64::new(s1, 0.0), n)?;
        return Ok((u0, u1));
    }
    let m = rounded as usize;
    let (s0, s1) = indicial_roots(m as f64);
    let (s0, s1) = (Complex64::new(s0, 0.0), Complex64::new(s1, 0.0));
    // Exponents differ by an integer, so f(s1 + k) = k (k + m) never vanishes.
    let u1 = frobenius_series(q, s1, n)?;
    let (mut a, rm) = below_resonance(q, m);
    let apparent = is_apparent(q, rm, m);
    let kappa = if apparent { Complex64::zero() } else { -rm / (s1 * 2.0 - 1.0) };
    let companion: Vec<Complex64> = u1.coeffs.iter().map(|c| c * kappa).collect();
    for k in m..=n {
        if k == m {
            a.push(Complex64::zero());
            continue;
        }
        let fk = q.indicial(s0 + k as f64);
        let mut rhs = r_n(q, &a, k);
        if !apparent {
            rhs += (s0 * 2.0 + (2 * k) as f64 - 1.0) * companion[k - m];
        }
        a.push(-rhs / fk);
    }
    a.truncate(n + 1);
    let u0 = if apparent {
        FrobeniusSolution { exponent: s0, coeffs: a, logarithmic: false, companion: None }
    } else {
        FrobeniusSolution {
            exponent: s0,
            coeffs: a,
            logarithmic: true,
            companion: Some(LogCompanion { exponent: s1, coeffs: companion }),
        }
    };
    Ok((u0, u1))
}

/// Largest coefficient of `x^2 u'' + q u` through order `N`, computed by
/// series multiplication rather than from the recurrence.
pub fn residual(q: &PowerSeries, sol: &FrobeniusSolution) -> f64 {
    let n = sol.order();
    let apply = |s: Complex64, c: &[Complex64], k: usize| -> Complex64 {
        let e = s + k as f64;
        let second = if k < c.len() { e * (e - 1.0) * c[k] } else { Complex64::zero() };
        let mixed: Complex64 = (0..=k.min(c.len() - 1)).map(|i| q.coeff(k - i) * c[i]).sum();
        second + mixed
    };
    let mut worst: f64 = 0.0;
    match &sol.companion {
        None => {
            for k in 0..=n {
                worst = worst.max(apply(sol.exponent, &sol.coeffs, k).norm());
            }
        }
        Some(comp) => {
            // Exponent offset between the power part and the ln x part.
            let shift = comp.exponent - sol.exponent;
            let m = shift.re.round() as usize;
            for k in 0..=n {
                let mut v = apply(sol.exponent, &sol.coeffs, k);
                if k >= m && k - m < comp.coeffs.len() {
                    let e = comp.exponent + (k - m) as f64;
                    v += (e * 2.0 - 1.0) * comp.coeffs[k - m];
                }
                worst = worst.max(v.norm());
            }
            for k in 0..comp.coeffs.len() {
                worst = worst.max(apply(comp.exponent, &comp.coeffs, k).norm());
            }
        }
    }
    worst
}

/// `q(x) = (c + d x + x^2 ψ(x))/2` from a Schwarzian tail. Taylor
/// coefficients of `ψ` come from the stored series when it is long enough
/// and otherwise from interpolating the stored samples.
pub fn ode_from_schwarzian(tail: &SchwarzianTail, n: usize) -> Result<PowerSeries> {
    weight_to_angle(tail.c)?;
    let needed = n.saturating_sub(1);
    let psi: Vec<Complex64> = if tail.regular_series.len() >= needed {
        tail.regular_series[..needed].to_vec()
    } else if tail.regular_samples.len() >= needed {
        let mut p = newton_interpolation(&tail.regular_samples);
        p.resize(tail.regular_samples.len().max(needed), Complex64::zero());
        p.truncate(needed);
        p
    } else {
        return Err(Error::InsufficientSamples {
            needed,
            available: tail.regular_series.len().max(tail.regular_samples.len()),
        });
    };
    let mut b = Vec::with_capacity(n + 1);
    b.push(Complex64::new(0.5 * tail.c, 0.0));
    b.push(0.5 * tail.d);
    b.extend(psi.iter().map(|p| 0.5 * p));
    b.truncate(n.max(1) + 1);
    PowerSeries::new(b)
}

/// Monomial coefficients of the interpolating polynomial through `(x_i, y_i)`.
fn newton_interpolation(points: &[(Complex64, Complex64)]) -> Vec<Complex64> {
    let n = points.len();
    let xs: Vec<Complex64> = points.iter().map(|p| p.0).collect();
    let mut dd: Vec<Complex64> = points.iter().map(|p| p.1).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
        }
    }
    // Horner on the Newton form, expanding into monomials.
    let mut poly = alloc::vec![Complex64::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + dd[i]
        let mut next = alloc::vec![Complex64::zero(); n];
        for k in 0..n {
            if k + 1 < n {
                next[k + 1] += poly[k];
            }
            next[k] -= poly[k] * xs[i];
        }
        next[0] += dd[i];
        poly = next;
    }
    poly
}

/// Shape of the ratio of two local solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalFormKind {
    /// `μ x^α · (1 + O(x))`.
    MuZs,
    /// `λ x^{-α} · (1 + O(x))`.
    LambdaZNegs,
}

/// `u_1/u_0 = μ x^{±α} · unit(x)` with `unit(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalNormalForm {
    pub alpha: f64,
    pub form: NormalFormKind,
    pub mu_or_lambda: Complex64,
    /// Taylor coefficients of the unit factor divided by `μ`.
    pub unit: Vec<Complex64>,
}

/// Writes `sol1/sol0` as a power of `x` times a unit. Logarithmic solutions
/// have no such form.
pub fn ratio_normal_form(sol0: &FrobeniusSolution, sol1: &FrobeniusSolution) -> Result<LocalNormalForm> {
    if sol0.logarithmic || sol1.logarithmic {
        return Err(Error::NoNormalForm);
    }
    let diff = sol1.exponent - sol0.exponent;
    if diff.im.abs() > 1e-12 || diff.re.abs() < 1e-12 {
        return Err(Error::NoNormalForm);
    }
    let len = sol0.coeffs.len().min(sol1.coeffs.len());
    let ratio = series::div(&sol1.coeffs, &sol0.coeffs, len);
    let mu = ratio[0];
    if mu.norm() == 0.0 {
        return Err(Error::NoNormalForm);
    }
    let unit: Vec<Complex64> = ratio.iter().map(|r| r / mu).collect();
    let form = if diff.re > 0.0 { NormalFormKind::MuZs } else { NormalFormKind::LambdaZNegs };
    Ok(LocalNormalForm { alpha: diff.re.abs(), form, mu_or_lambda: mu, unit })
}

/// `u_0 u_1' - u_0' u_1`, constant for equations without a first-order term.
pub fn wronskian(sol0: &FrobeniusSolution, sol1: &FrobeniusSolution, x: Complex64) -> Complex64 {
    let (u0, du0) = sol0.eval(x);
    let (u1, du1) = sol1.eval(x);
    u0 * du1 - du0 * u1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn log_q() -> PowerSeries {
        PowerSeries::from_real(&[-0.75, 0.5]).unwrap()
    }

    #[test]
    fn roots() {
        assert_eq!(indicial_roots(2.0), (-0.5, 1.5));
        assert_eq!(indicial_roots(1.0), (0.0, 1.0));
        assert_eq!(indicial_roots(0.5), (0.25, 0.75));
    }

    #[test]
    fn hand_recurrence() {
        let q = log_q();
        let u = frobenius_series(&q, c64(1.5, 0.0), 8).unwrap();
        assert!((u.coeffs[1] - c64(-1.0 / 6.0, 0.0)).norm() < 1e-15);
        let err = frobenius_series(&q, c64(-0.5, 0.0), 8).unwrap_err();
        assert_eq!(err, Error::Resonance { index: 2 });
        let (c, rm) = below_resonance(&q, 2);
        assert!((c[1] - c64(0.5, 0.0)).norm() < 1e-15);
        assert!((rm - c64(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn euler_equation_terminates() {
        let q = PowerSeries::constant(c64(-0.75, 0.0));
        let u = frobenius_series(&q, c64(1.5, 0.0), 32).unwrap();
        assert!(u.coeffs[1..].iter().all(|c| c.is_zero()));
        assert_eq!(resonance_obstruction(&q, 2).unwrap(), Complex64::zero());
        let (u0, u1) = local_solutions(&q, 2.0, 32).unwrap();
        assert!(!u0.logarithmic && !u1.logarithmic);
        let nf = ratio_normal_form(&u0, &u1).unwrap();
        assert_eq!(nf.alpha, 2.0);
        assert_eq!(nf.form, NormalFormKind::MuZs);
        assert!(nf.unit[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn logarithmic_case() {
        let q = log_q();
        let (u0, u1) = local_solutions(&q, 2.0, 32).unwrap();
        assert!(u0.logarithmic && !u1.logarithmic);
        assert!(residual(&q, &u0) < 1e-12);
        assert!(residual(&q, &u1) < 1e-12);
        assert_eq!(ratio_normal_form(&u0, &u1), Err(Error::NoNormalForm));
        // Constant Wronskian, equal to f'(s1) = alpha for this normalisation.
        let w1 = wronskian(&u0, &u1, c64(0.05, 0.0));
        let w2 = wronskian(&u0, &u1, c64(0.1, 0.02));
        assert!((w1 - w2).norm() < 1e-10);
        assert!((w1 - c64(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        assert!(local_solutions(&log_q(), 1.5, 8).is_err());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = [c64(1.0, 0.0), c64(0.0, 2.0), c64(-3.0, 0.5)];
        let pts: Vec<_> = (0..5)
            .map(|k| {
                let x = Complex64::from_polar(0.1, k as f64);
                (x, series::eval(&p, x))
            })
            .collect();
        let c = newton_interpolation(&pts);
        for (k, pk) in p.iter().enumerate() {
            assert!((c[k] - pk).norm() < 1e-9);
        }
        assert!(c[3].norm() < 1e-7 && c[4].norm() < 1e-6);
    }
}
