//! Spherical cone metrics on the Riemann sphere.
//!
//! A conformal metric of curvature one with conical singularities is the
//! pullback of the round metric `4|dw|^2 / (1 + |w|^2)^2` under a developing
//! map. This crate works with developing maps that are rational functions
//! and with their logarithmic differentials (abelian differentials of the
//! third kind), and provides the local analysis at singular points: exact
//! Schwarzians, Frobenius solutions of the associated Fuchsian equation,
//! and divisor/residue feasibility for prescribed cone angles.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]
// `num_traits::Float` supplies f64 math without std on toolchains whose
// `core` lacks the inherent float methods; on newer ones the import is unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod character;
pub mod cusp;
mod error;
pub mod feasibility;
pub mod frobenius;
pub mod poly;
pub mod pullback;
pub mod quadrature;
pub mod rational;
pub mod roots;
pub mod schwarzian;
pub mod series;
pub mod sphere;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use character::{AbelianMetricDescriptor, FormDivisor, PathPolyline, PointKind, ThirdKindDifferential};
pub use cusp::{ConformalFactor, Preset};
pub use feasibility::FeasibilityAssignment;
pub use frobenius::{FrobeniusSolution, LocalNormalForm, PowerSeries};
pub use poly::Polynomial;
pub use pullback::{ConicalDivisor, PullbackMetric};
pub use rational::RationalMap;
pub use schwarzian::SchwarzianTail;
pub use sphere::{chordal_distance, Moebius, SU2Moebius, SpherePoint};

/// Shorthand for building a complex number.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
