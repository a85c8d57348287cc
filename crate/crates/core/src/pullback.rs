//! The metric `f* g_st` for a rational developing map `f`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::Float;

use crate::quadrature::integrate_2d;
use crate::rational::RationalMap;
use crate::roots::roots_with_multiplicity;
use crate::sphere::{chordal_distance, SpherePoint};
use crate::{Error, Result};

/// Entries closer than this in chordal distance are the same point.
pub const POINT_TOLERANCE: f64 = 1e-9;

/// Cone angles within this distance of 1 are smooth points.
pub const SMOOTH_ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PullbackMetric {
    f: RationalMap,
}

impl PullbackMetric {
    pub fn new(f: RationalMap) -> Result<Self> {
        if f.is_constant() {
            return Err(Error::ConstantMap);
        }
        Ok(PullbackMetric { f })
    }

    pub fn map(&self) -> &RationalMap {
        &self.f
    }
}

/// `Σ (α_j - 1) P_j`: cone points with their angle parameters `α_j`
/// (angle `2π α_j`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConicalDivisor {
    entries: Vec<(SpherePoint, f64)>,
}

impl ConicalDivisor {
    /// Rejects non-positive angles, `α = 1` (a smooth point) and repeated points.
    pub fn new(entries: Vec<(SpherePoint, f64)>) -> Result<Self> {
        for (i, (p, alpha)) in entries.iter().enumerate() {
            if !(*alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidArgument(format!("cone angle parameter {alpha} must be positive")));
            }
            if (alpha - 1.0).abs() <= SMOOTH_ANGLE_TOLERANCE {
                return Err(Error::InvalidArgument("alpha = 1 is a smooth point, not a cone point".into()));
            }
            if entries[..i].iter().any(|(q, _)| chordal_distance(p, q) <= POINT_TOLERANCE) {
                return Err(Error::DuplicatePoint);
            }
        }
        Ok(ConicalDivisor { entries })
    }

    pub fn empty() -> Self {
        ConicalDivisor { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(SpherePoint, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `deg D = Σ (α_j - 1)`.
    pub fn degree(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a - 1.0).sum()
    }

    /// Angle parameter at `p`, if `p` is a cone point.
    pub fn alpha_at(&self, p: &SpherePoint) -> Option<f64> {
        self.entries.iter().find(|(q, _)| chordal_distance(p, q) <= 1e-7).map(|&(_, a)| a)
    }

    /// Same points and angles, in any order.
    pub fn approx_eq(&self, other: &ConicalDivisor, point_tol: f64, angle_tol: f64) -> bool {
        self.len() == other.len()
            && self.entries.iter().all(|(p, a)| {
                other.entries.iter().any(|(q, b)| chordal_distance(p, q) <= point_tol && (a - b).abs() <= angle_tol)
            })
    }

    /// Area forced by Gauss–Bonnet on the sphere, `2π (2 + deg D)`.
    pub fn gauss_bonnet_area(&self) -> f64 {
        TAU * (2.0 + self.degree())
    }
}

fn density_finite(f: &RationalMap, z: Complex64) -> f64 {
    // g_st is invariant under w -> 1/w, so f and 1/f give the same density.
    let s = f.local_series(z, 2);
    let v = s.coeffs[0].norm_sqr();
    4.0 * s.coeffs[1].norm_sqr() / ((1.0 + v) * (1.0 + v))
}

/// `4 |f'(z)|^2 / (1 + |f(z)|^2)^2` in the ambient chart; at infinity the
/// density is taken in the `w = 1/z` chart.
pub fn metric_density(m: &PullbackMetric, z: &SpherePoint) -> f64 {
    match *z {
        SpherePoint::Finite(z) => density_finite(&m.f, z),
        SpherePoint::Infinity => density_finite(&m.f.in_infinity_chart(), Complex64::new(0.0, 0.0)),
    }
}

/// Cone points of `f* g_st`: critical points of `f` (finite ones from the
/// roots of `N'D - ND'`, infinity in the `1/z` chart), each with `α` equal to
/// the local degree. Points of local degree one are smooth and left out.
pub fn singular_divisor(m: &PullbackMetric) -> Result<ConicalDivisor> {
    let f = &m.f;
    let w = f.critical_numerator();
    let mut entries = Vec::new();
    let mut residuals = Vec::new();
    if w.deg() > 0 {
        for (p, mult) in roots_with_multiplicity(&w, 1e-8)? {
            let point = SpherePoint::Finite(p);
            let alpha = f.local_degree(&point);
            residuals.push(w.eval(p).norm());
            if alpha != mult + 1 {
                return Err(Error::RootClustering {
                    message: format!("critical point {p} has derivative multiplicity {mult} but local degree {alpha}"),
                    residuals,
                });
            }
            entries.push((point, alpha as f64));
        }
    }
    let alpha_inf = f.local_degree(&SpherePoint::Infinity);
    if alpha_inf >= 2 {
        entries.push((SpherePoint::Infinity, alpha_inf as f64));
    }
    let branching: f64 = entries.iter().map(|(_, a)| a - 1.0).sum();
    let expected = 2.0 * f.degree() as f64 - 2.0;
    if branching != expected {
        return Err(Error::RootClustering {
            message: format!("Riemann-Hurwitz mismatch: branching {branching}, expected {expected}"),
            residuals,
        });
    }
    ConicalDivisor::new(entries)
}

/// Area of the metric by adaptive cubature over `|z| <= 1` and, in the
/// `w = 1/z` chart, over `|w| <= 1`.
pub fn area_numeric(m: &PullbackMetric, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let charts = [m.f.clone(), m.f.in_infinity_chart()];
    let mut total = 0.0;
    for g in charts.iter() {
        let est = integrate_2d(
            |r, t| r * density_finite(g, Complex64::from_polar(r, t)),
            (0.0, 1.0),
            (0.0, TAU),
            tol * 1e-3,
            0.25 * tol,
            200_000,
        )?;
        total += est.value;
    }
    Ok(total)
}

/// The expected area `4π deg f`.
pub fn area_expected(m: &PullbackMetric) -> f64 {
    4.0 * PI * m.f.degree() as f64
}

/// Five-point-Laplacian estimate of `K = -e^{-2u} Δu` with `g = e^{2u}|dz|^2`.
///
/// With `f = N/D` and `W = N'D - ND'`, `u = ln 2|W| - ln(|N|^2 + |D|^2)`.
/// The first term is harmonic off the critical points, so only the second
/// is differenced; one Richardson step (`h`, `h/2`) removes the `O(h^2)` term.
pub fn curvature_numeric(m: &PullbackMetric, z: Complex64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("stencil step must be positive".into()));
    }
    let centre = SpherePoint::Finite(z);
    for (p, _) in singular_divisor(m)?.entries() {
        let d = chordal_distance(&centre, p);
        if d < 10.0 * h {
            return Err(Error::Stencil(format!(
                "point {z} is within {d:e} of a critical point (need >= {:e})",
                10.0 * h
            )));
        }
    }
    let (num, den) = (m.f.num(), m.f.den());
    let v = |w: Complex64| (num.eval(w).norm_sqr() + den.eval(w).norm_sqr()).ln();
    let five_point = |h: f64| {
        let c = v(z);
        let sum = v(z + Complex64::new(h, 0.0))
            + v(z - Complex64::new(h, 0.0))
            + v(z + Complex64::new(0.0, h))
            + v(z - Complex64::new(0.0, h));
        (sum - 4.0 * c) / (h * h)
    };
    let laplacian_v = (4.0 * five_point(0.5 * h) - five_point(h)) / 3.0;
    let centre_density = density_finite(&m.f, z);
    if !laplacian_v.is_finite() || !(centre_density > 0.0) {
        return Err(Error::Stencil("stencil touches a zero of the density".into()));
    }
    // Δu = -Δv
    Ok(laplacian_v / centre_density)
}
