//! Exact Schwarzian derivatives of rational maps and their Laurent tails.
//!
//! The Schwarzian `{f, z} = f'''/f' - (3/2)(f''/f')^2` of a rational map is
//! holomorphic wherever `f` is locally univalent (including simple poles,
//! since it is unchanged by `f ↦ 1/f`) and decays like `z^-4` at a
//! non-critical infinity. It is therefore the sum of its principal parts
//! `c_j/(z-p_j)^2 + d_j/(z-p_j)` over the finite critical points, which is how
//! it is assembled here; the principal parts come from Laurent arithmetic on
//! the local Taylor series of `f`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::poly::Polynomial;
use crate::rational::{RationalMap, LOCAL_ORDER_TOLERANCE};
use crate::roots::roots_with_multiplicity;
use crate::series;
use crate::sphere::SpherePoint;
use crate::{Error, Result};

/// Number of Taylor coefficients of the regular part kept in a tail.
pub const TAIL_SERIES_LEN: usize = 33;

/// Number of regular-part samples stored with a tail.
pub const TAIL_SAMPLES: usize = 8;

/// Principal part `c/x^2 + d/x` of a Schwarzian at `center`, with the regular
/// part `ψ` kept as Taylor coefficients and as point samples.
///
/// `x` is the affine coordinate centred at `center` (`w = 1/z` at infinity),
/// so `d` and `ψ` depend on that choice of coordinate; `c` does not.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwarzianTail {
    pub center: SpherePoint,
    pub c: f64,
    pub d: Complex64,
    /// `(x, ψ(x))` with `x` the local coordinate offset from the centre.
    pub regular_samples: Vec<(Complex64, Complex64)>,
    /// Taylor coefficients of `ψ` at the centre.
    pub regular_series: Vec<Complex64>,
}

impl SchwarzianTail {
    /// A tail given by its principal part and the Taylor coefficients of `ψ`.
    pub fn from_parts(center: SpherePoint, c: f64, d: Complex64, regular_series: Vec<Complex64>) -> Self {
        let regular_samples = circle(0.1).map(|x| (x, series::eval(&regular_series, x))).collect();
        SchwarzianTail { center, c, d, regular_samples, regular_series }
    }

    /// The cone angle parameter `α = sqrt(1 - 2c)`.
    pub fn alpha(&self) -> Result<f64> {
        weight_to_angle(self.c)
    }
}

fn circle(radius: f64) -> impl Iterator<Item = Complex64> {
    (0..TAIL_SAMPLES).map(move |k| Complex64::from_polar(radius, TAU * k as f64 / TAIL_SAMPLES as f64))
}

/// `{f, z}` evaluated directly from a Taylor expansion of `f` (or `1/f`) at `z`.
/// `None` at critical points.
pub fn schwarzian_at(f: &RationalMap, z: Complex64) -> Option<Complex64> {
    schwarzian_with_scale(f, z).map(|(v, _)| v)
}

/// The value together with the magnitude of the two terms it is the difference of.
fn schwarzian_with_scale(f: &RationalMap, z: Complex64) -> Option<(Complex64, f64)> {
    let s = f.local_series(z, 4).coeffs;
    let (a1, a2, a3) = (s[1], s[2], s[3]);
    if a1.norm() <= 1e-300 {
        return None;
    }
    let r = a2 / a1;
    let t = a3 / a1;
    Some((t * 6.0 - r * r * 6.0, 6.0 * (t.norm() + r.norm_sqr())))
}

/// Laurent coefficients `(c, d)` of `{f, z}` at a finite point where `f` has
/// local degree `m`, from series arithmetic on the local expansion.
fn principal_part(f: &RationalMap, p: Complex64, m: usize) -> Result<(Complex64, Complex64)> {
    let len = 2 * m + 6;
    let local = f.local_series(p, len).coeffs;
    let d1 = series::derivative(&local);
    let d2 = series::derivative(&d1);
    let d3 = series::derivative(&d2);
    let n = d3.len();
    let t = {
        let a = series::mul(&d3, &d1, n);
        let b = series::mul(&d2, &d2, n);
        a.iter().zip(&b).map(|(x, y)| x - y * 1.5).collect::<Vec<_>>()
    };
    // f' = x^{m-1} G, T = f''' f' - 3/2 f''^2 = x^{2m-4} T_s, so {f,z} = x^-2 T_s / G^2.
    let g: Vec<Complex64> = d1[m - 1..].to_vec();
    let t_s: Vec<Complex64> = t[2 * m - 4..].to_vec();
    let scale = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if t[..2 * m - 4].iter().any(|c| c.norm() > 1e-6 * scale) || g[0].norm() <= 1e-300 {
        return Err(Error::Internal(format!("inconsistent local degree {m} at {p}")));
    }
    let g2 = series::mul(&g, &g, 2);
    let q = series::div(&t_s, &g2, 2);
    Ok((q[0], q[1]))
}

/// The Schwarzian of a nonconstant rational map as a reduced rational map.
pub fn schwarzian(f: &RationalMap) -> Result<RationalMap> {
    if f.is_constant() {
        return Err(Error::ConstantMap);
    }
    let w = f.critical_numerator();
    let crit = if w.deg() > 0 { roots_with_multiplicity(&w, 1e-8)? } else { Vec::new() };
    let mut parts = Vec::with_capacity(crit.len());
    for &(p, mult) in &crit {
        let (c, d) = principal_part(f, p, mult + 1)?;
        parts.push((p, c, d));
    }

    let squares: Vec<Polynomial> = parts.iter().map(|&(p, _, _)| Polynomial::linear_factor(p).pow(2)).collect();
    let mut den = Polynomial::one();
    for s in &squares {
        den = &den * s;
    }
    let mut num = Polynomial::zero();
    for (j, &(p, c, d)) in parts.iter().enumerate() {
        let mut others = Polynomial::one();
        for (i, s) in squares.iter().enumerate() {
            if i != j {
                others = &others * s;
            }
        }
        let local = Polynomial::new(alloc::vec![c - d * p, d]);
        num = &num + &(&others * &local);
    }
    // S = O(z^-2) at infinity for every rational f, and O(z^-4) when
    // infinity is not critical; higher numerator coefficients are rounding noise.
    let decay = if f.local_degree(&SpherePoint::Infinity) == 1 { 4 } else { 2 };
    let keep = (den.deg() + 1).saturating_sub(decay);
    let (kept, dropped) = num.coeffs().split_at(keep.min(num.coeffs().len()));
    let scale = num.norm();
    if dropped.iter().any(|c| c.norm() > 1e-8 * scale) {
        return Err(Error::Internal("assembled Schwarzian does not decay at infinity".into()));
    }
    let num = Polynomial::new(kept.to_vec());
    let s = RationalMap::from_coprime(num, den);
    verify_against_direct(f, &s, &parts)?;
    Ok(s)
}

fn verify_against_direct(f: &RationalMap, s: &RationalMap, parts: &[(Complex64, Complex64, Complex64)]) -> Result<()> {
    let poles = f.den().degree().filter(|&d| d > 0).map(|_| roots_with_multiplicity(f.den(), 1e-6));
    let mut avoid: Vec<Complex64> = parts.iter().map(|x| x.0).collect();
    if let Some(Ok(ps)) = poles {
        avoid.extend(ps.iter().map(|x| x.0));
    }
    let candidates = [
        Complex64::new(0.371, 0.613),
        Complex64::new(-1.29, 0.417),
        Complex64::new(0.853, -1.131),
        Complex64::new(-0.217, -0.779),
        Complex64::new(2.31, 1.77),
    ];
    let mut checked = 0;
    for z in candidates {
        let clearance = avoid.iter().map(|q| (z - q).norm()).fold(f64::INFINITY, f64::min);
        if clearance < 0.05 {
            continue;
        }
        let Some((direct, direct_scale)) = schwarzian_with_scale(f, z) else { continue };
        let value = s.eval_complex(z);
        let scale: f64 =
            parts.iter().map(|&(p, c, d)| c.norm() / (z - p).norm_sqr() + d.norm() / (z - p).norm()).sum::<f64>()
                + direct_scale;
        if (value - direct).norm() > 1e-6 * scale.max(1e-300) {
            return Err(Error::Internal(format!("Schwarzian mismatch at {z}: assembled {value}, direct {direct}")));
        }
        checked += 1;
        if checked == 2 {
            break;
        }
    }
    Ok(())
}

/// `S(1/w) / w^4`, the quadratic differential `S dz^2` in the chart at infinity.
fn at_infinity(s: &RationalMap) -> RationalMap {
    if s.is_zero() {
        return s.clone();
    }
    let n = s.num().deg();
    let m = s.den().deg();
    let num = s.num().reversed(n);
    let den = s.den().reversed(m);
    let e = m as isize - n as isize - 4;
    if e >= 0 {
        RationalMap::from_coprime(num.shift_up(e as usize), den)
    } else {
        RationalMap::from_coprime(num, den.shift_up((-e) as usize))
    }
}

/// Principal part and regular part of a Schwarzian at `p`. A regular point
/// gives `c = d = 0`; a pole of order three or more is an error.
pub fn laurent_tail(s: &RationalMap, p: &SpherePoint) -> Result<SchwarzianTail> {
    match *p {
        SpherePoint::Infinity => {
            let mut tail = laurent_tail(&at_infinity(s), &SpherePoint::ZERO)?;
            tail.center = SpherePoint::Infinity;
            Ok(tail)
        }
        SpherePoint::Finite(z) => finite_tail(s, z),
    }
}

fn finite_tail(s: &RationalMap, z: Complex64) -> Result<SchwarzianTail> {
    let center = SpherePoint::Finite(z);
    if s.is_zero() {
        return Ok(SchwarzianTail::from_parts(
            center,
            0.0,
            Complex64::zero(),
            alloc::vec![Complex64::zero(); TAIL_SERIES_LEN],
        ));
    }
    let dn = s.den().taylor_shift(z);
    let abs_den = Polynomial::new(s.den().coeffs().iter().map(|c| Complex64::new(c.norm(), 0.0)).collect())
        .taylor_shift(Complex64::new(z.norm(), 0.0));
    let mut order = 0;
    while order < dn.coeffs().len() && dn.coeff(order).norm() <= LOCAL_ORDER_TOLERANCE * abs_den.coeff(order).re {
        order += 1;
    }
    if order > 2 {
        return Err(Error::IrregularSingularity { order });
    }
    let shifted = &dn.coeffs()[order..];
    let laurent = series::div(s.num().taylor_shift(z).coeffs(), shifted, TAIL_SERIES_LEN + order);
    let (c, d) = match order {
        2 => (laurent[0], laurent[1]),
        1 => (Complex64::zero(), laurent[0]),
        _ => (Complex64::zero(), Complex64::zero()),
    };
    if c.im.abs() > 1e-8 * (1.0 + c.norm()) {
        return Err(Error::InvalidArgument(format!("weight {c} is not real")));
    }
    let regular_series = laurent[order..].to_vec();

    // Samples of ψ straight from the rational function, inside the disc
    // free of other poles.
    let mut radius: f64 = 0.1;
    if s.den().deg() > 0 {
        if let Ok(rs) = roots_with_multiplicity(s.den(), 1e-6) {
            for (q, _) in rs {
                let dist = (q - z).norm();
                if dist > 1e-7 * (1.0 + z.norm()) {
                    radius = radius.min(0.25 * dist);
                }
            }
        }
    }
    let regular_samples = circle(radius)
        .map(|x| {
            let full = s.eval_complex(z + x);
            (x, full - c / (x * x) - d / x)
        })
        .collect();
    Ok(SchwarzianTail { center, c: c.re, d, regular_samples, regular_series })
}

/// `α = sqrt(1 - 2c)`, inverting `c = (1 - α^2)/2`.
pub fn weight_to_angle(c: f64) -> Result<f64> {
    if !(c < 0.5) {
        return Err(Error::NoPositiveAngle { weight: c });
    }
    Ok((1.0 - 2.0 * c).sqrt())
}

/// `c = (1 - α^2)/2`.
pub fn angle_to_weight(alpha: f64) -> f64 {
    0.5 * (1.0 - alpha * alpha)
}
