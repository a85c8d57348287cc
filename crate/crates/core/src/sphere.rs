//! Points of the Riemann sphere and fractional linear maps acting on them.

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::{Error, Result};

/// A point of `C ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    /// Wraps a complex number, mapping non-finite values to `Infinity`.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// The image under `z ↦ 1/z`, the chart change at infinity.
    pub fn reciprocal(&self) -> SpherePoint {
        match *self {
            SpherePoint::Infinity => SpherePoint::ZERO,
            SpherePoint::Finite(z) if z.is_zero() => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// Chordal distance to `other`; see [`chordal_distance`].
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        chordal_distance(self, other)
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        chordal_distance(self, other) <= tol
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// Chordal distance on the sphere of diameter 2,
/// `2|z - w| / sqrt((1 + |z|^2)(1 + |w|^2))`, with `d(z, ∞) = 2 / sqrt(1 + |z|^2)`.
pub fn chordal_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// A general fractional linear map `w ↦ (a w + b) / (c w + d)`, `ad - bc ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm() + b.norm() + c.norm() + d.norm();
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::InvalidArgument("degenerate Moebius map (ad - bc = 0)".into()));
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        Moebius { a: one, b: zero, c: zero, d: one }
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        match *p {
            SpherePoint::Infinity => {
                if self.c.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_complex(self.a / self.c)
                }
            }
            SpherePoint::Finite(w) => {
                let num = self.a * w + self.b;
                let den = self.c * w + self.d;
                if den.norm() <= 1e-300 || den.norm() <= 1e-15 * num.norm() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_complex(num / den)
                }
            }
        }
    }

    /// Derivative of the map at a finite point where it is finite.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        let den = self.c * w + self.d;
        (self.a * self.d - self.b * self.c) / (den * den)
    }
}

/// An orientation-preserving isometry of the round sphere,
/// `w ↦ (a w + b) / (-conj(b) w + conj(a))` with `|a|^2 + |b|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Moebius {
    a: Complex64,
    b: Complex64,
}

impl SU2Moebius {
    /// Validates `|a|^2 + |b|^2 = 1` to within `1e-12`.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(alloc::format!("SU(2) element needs |a|^2 + |b|^2 = 1, got {n}")));
        }
        Ok(SU2Moebius { a, b })
    }

    /// Rescales an arbitrary nonzero pair onto the unit sphere in `C^2`.
    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("SU(2) element from zero vector".into()));
        }
        Ok(SU2Moebius { a: a / n, b: b / n })
    }

    pub fn identity() -> Self {
        SU2Moebius { a: Complex64::new(1.0, 0.0), b: Complex64::zero() }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn as_moebius(&self) -> Moebius {
        Moebius { a: self.a, b: self.b, c: -self.b.conj(), d: self.a.conj() }
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        self.as_moebius().apply(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_distance_handles_infinity() {
        let z = SpherePoint::ZERO;
        assert!((chordal_distance(&z, &SpherePoint::Infinity) - 2.0).abs() < 1e-15);
        let one = SpherePoint::new(1.0, 0.0);
        assert!((chordal_distance(&one, &SpherePoint::Infinity) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal_distance(&SpherePoint::Infinity, &SpherePoint::Infinity), 0.0);
    }

    #[test]
    fn su2_rejects_off_sphere() {
        assert!(SU2Moebius::new(Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        let l = SU2Moebius::new(Complex64::zero(), Complex64::new(1.0, 0.0)).unwrap();
        // w ↦ 1 / (-w)
        assert!(l.apply(&SpherePoint::ZERO).is_infinite());
        assert_eq!(l.apply(&SpherePoint::Infinity), SpherePoint::ZERO);
        let p = l.apply(&SpherePoint::new(2.0, 0.0)).finite().unwrap();
        assert!((p - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn su2_is_an_isometry() {
        let l = SU2Moebius::normalized(Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.7)).unwrap();
        let p = SpherePoint::new(0.5, -1.2);
        let q = SpherePoint::new(-3.0, 0.1);
        let d0 = chordal_distance(&p, &q);
        let d1 = chordal_distance(&l.apply(&p), &l.apply(&q));
        assert!((d0 - d1).abs() < 1e-14);
    }
}
