//! Conformal factors on a punctured disc and the weak-cusp indicator.
//!
//! A metric `e^{2φ}|dz|^2` on `0 < |z| < 1` becomes `e^{2ψ}(dt^2 + dθ^2)` on
//! the half-cylinder `t = ln r < 0` with `ψ = φ + t`. The angular mean of
//! `∂ψ/∂t` detects cusps: it stays near `2πα` at a cone point of angle
//! `2πα` and tends to zero at a genuine weak cusp. Everything here is
//! evaluated in `t`, so radii far below the smallest `f64` are reachable.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_traits::Float;

use crate::quadrature::composite_nodes;
use crate::{Error, Result};

/// Step for central differences in `t` when no analytic derivative exists.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// A conformal factor `φ`, read on the cylinder.
pub trait ConformalFactor {
    /// `φ(e^t e^{iθ})`.
    fn phi_log(&self, t: f64, theta: f64) -> f64;

    /// `r ∂φ/∂r` at `r = e^t`, when known in closed form.
    fn radial_derivative_log(&self, _t: f64, _theta: f64) -> Option<f64> {
        None
    }

    /// `φ(r e^{iθ})`.
    fn phi(&self, r: f64, theta: f64) -> f64 {
        self.phi_log(r.ln(), theta)
    }

    /// `ψ(t, θ) = φ(e^t, θ) + t`.
    fn psi(&self, t: f64, theta: f64) -> f64 {
        self.phi_log(t, theta) + t
    }

    /// `∂ψ/∂t = r ∂φ/∂r + 1`, by central differences unless overridden.
    fn psi_t(&self, t: f64, theta: f64) -> f64 {
        match self.radial_derivative_log(t, theta) {
            Some(d) => d + 1.0,
            None => {
                let h = DERIVATIVE_STEP;
                (self.psi(t + h, theta) - self.psi(t - h, theta)) / (2.0 * h)
            }
        }
    }
}

/// The three model factors, each with its curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    /// `φ = (α-1) ln r + ln(2α/(1 + r^{2α}))`, curvature 1.
    SphericalCone { alpha: f64 },
    /// `φ = (α-1) ln r`, curvature 0.
    FlatCone { alpha: f64 },
    /// `φ = -ln r - ln ln(1/r)`, curvature -1.
    HyperbolicCusp,
}

impl Preset {
    pub fn spherical_cone(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Preset::SphericalCone { alpha })
    }

    pub fn flat_cone(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Preset::FlatCone { alpha })
    }

    /// Constant Gaussian curvature of the model.
    pub fn curvature(&self) -> f64 {
        match self {
            Preset::SphericalCone { .. } => 1.0,
            Preset::FlatCone { .. } => 0.0,
            Preset::HyperbolicCusp => -1.0,
        }
    }

    /// Cone angle parameter, or `None` for the cusp.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Preset::SphericalCone { alpha } | Preset::FlatCone { alpha } => Some(alpha),
            Preset::HyperbolicCusp => None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("cone angle parameter {alpha} must be positive")));
    }
    Ok(())
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `e^x / (1 + e^x)` without overflow.
fn logistic(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl ConformalFactor for Preset {
    fn phi_log(&self, t: f64, _theta: f64) -> f64 {
        match *self {
            Preset::SphericalCone { alpha } => (alpha - 1.0) * t + (2.0 * alpha).ln() - softplus(2.0 * alpha * t),
            Preset::FlatCone { alpha } => (alpha - 1.0) * t,
            Preset::HyperbolicCusp => -t - (-t).ln(),
        }
    }

    fn radial_derivative_log(&self, t: f64, _theta: f64) -> Option<f64> {
        Some(match *self {
            Preset::SphericalCone { alpha } => (alpha - 1.0) - 2.0 * alpha * logistic(2.0 * alpha * t),
            Preset::FlatCone { alpha } => alpha - 1.0,
            Preset::HyperbolicCusp => -1.0 - 1.0 / t,
        })
    }
}

/// A user factor given as a function of `(t, θ)`, differentiated numerically.
#[derive(Clone, Copy)]
pub struct LogRadiusFactor<F>(pub F);

impl<F> core::fmt::Debug for LogRadiusFactor<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("LogRadiusFactor(..)")
    }
}

impl<F: Fn(f64, f64) -> f64> ConformalFactor for LogRadiusFactor<F> {
    fn phi_log(&self, t: f64, theta: f64) -> f64 {
        (self.0)(t, theta)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t < 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("log-radius {t} must be negative and finite")));
    }
    Ok(())
}

/// `Ψ'(t) = ∫_0^{2π} ∂ψ/∂t dθ` by the periodic trapezoidal rule.
pub fn psi_mean_derivative<C: ConformalFactor + ?Sized>(f: &C, t: f64, n_theta: usize) -> Result<f64> {
    check_t(t)?;
    if n_theta < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 angular samples, got {n_theta}")));
    }
    let h = TAU / n_theta as f64;
    let mut sum = 0.0;
    for k in 0..n_theta {
        let v = f.psi_t(t, h * k as f64);
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("factor is not finite at t = {t}")));
        }
        sum += v;
    }
    Ok(sum * h)
}

/// Angular samples used by the indicator.
pub const INDICATOR_SAMPLES: usize = 64;

/// `(t, Ψ'(t))` along decreasing log-radii.
pub fn indicator_curve_log<C: ConformalFactor + ?Sized>(f: &C, t_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if t_values.is_empty() {
        return Err(Error::InvalidArgument("no sample radii".into()));
    }
    if t_values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("sample radii must be strictly decreasing".into()));
    }
    t_values.iter().map(|&t| Ok((t, psi_mean_derivative(f, t, INDICATOR_SAMPLES)?))).collect()
}

/// Minimum of `Ψ'(t)` over the samples: a finite-sample stand-in for
/// `liminf_{r→0} ∫ r ∂(φ + ln r)/∂r dθ`, which vanishes at a genuine weak cusp.
pub fn weak_cusp_indicator_log<C: ConformalFactor + ?Sized>(f: &C, t_values: &[f64]) -> Result<f64> {
    Ok(indicator_curve_log(f, t_values)?.iter().map(|p| p.1).fold(f64::INFINITY, f64::min))
}

/// [`weak_cusp_indicator_log`] for radii in `(0, 1)`, decreasing.
pub fn weak_cusp_indicator<C: ConformalFactor + ?Sized>(f: &C, r_values: &[f64]) -> Result<f64> {
    weak_cusp_indicator_log(f, &log_radii(r_values)?)
}

fn log_radii(r_values: &[f64]) -> Result<Vec<f64>> {
    r_values
        .iter()
        .map(|&r| {
            if r > 0.0 && r < 1.0 {
                Ok(r.ln())
            } else {
                Err(Error::InvalidArgument(format!("radius {r} is not in (0, 1)")))
            }
        })
        .collect()
}

/// Whether `φ + ln r` keeps falling as `r → 0`: along the samples it must be
/// strictly decreasing on four rays and drop by at least 1 overall.
pub fn cusp_limit_check_log<C: ConformalFactor + ?Sized>(f: &C, t_values: &[f64]) -> Result<bool> {
    if t_values.len() < 2 {
        return Err(Error::InvalidArgument("need at least two sample radii".into()));
    }
    if t_values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("sample radii must be strictly decreasing".into()));
    }
    for &t in t_values {
        check_t(t)?;
    }
    for k in 0..4 {
        let theta = FRAC_PI_2 * k as f64;
        let values: Vec<f64> = t_values.iter().map(|&t| f.psi(t, theta)).collect();
        if values.windows(2).any(|w| !(w[1] < w[0])) || !(values[values.len() - 1] <= values[0] - 1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`cusp_limit_check_log`] for radii in `(0, 1)`.
pub fn cusp_limit_check<C: ConformalFactor + ?Sized>(f: &C, r_values: &[f64]) -> Result<bool> {
    cusp_limit_check_log(f, &log_radii(r_values)?)
}

/// Quadrature grid on an annulus: `radial` Gauss–Kronrod panels in `t` and
/// `angular` trapezoidal nodes in `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnnulusGrid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for AnnulusGrid {
    fn default() -> Self {
        AnnulusGrid { radial: 64, angular: 32 }
    }
}

fn annulus_nodes(r_in: f64, r_out: f64, grid: AnnulusGrid) -> Result<(Vec<(f64, f64)>, f64)> {
    if !(r_in > 0.0 && r_in < r_out && r_out < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r_in < r_out < 1, got {r_in}, {r_out}")));
    }
    annulus_nodes_log(r_in.ln(), r_out.ln(), grid)
}

fn annulus_nodes_log(t_in: f64, t_out: f64, grid: AnnulusGrid) -> Result<(Vec<(f64, f64)>, f64)> {
    if !(t_in < t_out && t_out < 0.0) {
        return Err(Error::InvalidArgument(format!("need t_in < t_out < 0, got {t_in}, {t_out}")));
    }
    if grid.radial < 4 || grid.angular < 8 {
        return Err(Error::Stencil(format!(
            "grid {}x{} is too coarse (need at least 4 radial panels and 8 angles)",
            grid.radial, grid.angular
        )));
    }
    Ok((composite_nodes(t_in, t_out, grid.radial), TAU / grid.angular as f64))
}

/// `Δψ` in `(t, θ)` by the five-point stencil with step `h`.
fn laplacian<C: ConformalFactor + ?Sized>(f: &C, t: f64, theta: f64, h: f64) -> f64 {
    let c = f.psi(t, theta);
    (f.psi(t + h, theta) + f.psi(t - h, theta) + f.psi(t, theta + h) + f.psi(t, theta - h) - 4.0 * c) / (h * h)
}

/// Stencil step: small against the grid, not so small that rounding dominates.
fn stencil_step(t_in: f64, t_out: f64, grid: AnnulusGrid) -> f64 {
    let spacing = ((t_out - t_in) / grid.radial as f64).min(TAU / grid.angular as f64);
    (2e-3 * (1.0 + t_in.abs()).sqrt()).min(spacing / 4.0)
}

/// Gaussian curvature `K = -e^{-2ψ} Δψ` by finite differences.
pub fn curvature_log<C: ConformalFactor + ?Sized>(f: &C, t: f64, theta: f64, h: f64) -> f64 {
    -(-2.0 * f.psi(t, theta)).exp() * laplacian(f, t, theta, h)
}

/// `∫∫ K^2 dA` over `r_in < |z| < r_out`, with `K` from finite differences.
pub fn calabi_energy<C: ConformalFactor + ?Sized>(f: &C, r_in: f64, r_out: f64, grid: AnnulusGrid) -> Result<f64> {
    let (t_in, t_out) = (r_in.ln(), r_out.ln());
    annulus_nodes(r_in, r_out, grid)?;
    calabi_energy_log(f, t_in, t_out, grid)
}

/// [`calabi_energy`] between log-radii `t_in < t_out < 0`.
pub fn calabi_energy_log<C: ConformalFactor + ?Sized>(f: &C, t_in: f64, t_out: f64, grid: AnnulusGrid) -> Result<f64> {
    let (nodes, dtheta) = annulus_nodes_log(t_in, t_out, grid)?;
    let h = stencil_step(t_in, t_out, grid);
    let mut total = 0.0;
    for &(t, w) in &nodes {
        let mut ring = 0.0;
        for k in 0..grid.angular {
            let theta = dtheta * k as f64;
            // K^2 dA = (Δψ)^2 e^{-2ψ} dt dθ
            let lap = laplacian(f, t, theta, h);
            ring += lap * lap * (-2.0 * f.psi(t, theta)).exp();
        }
        total += w * ring * dtheta;
    }
    if !total.is_finite() {
        return Err(Error::Stencil("curvature is not finite on the grid".into()));
    }
    Ok(total)
}

/// `∫∫ dA` over `r_in < |z| < r_out`.
pub fn annulus_area<C: ConformalFactor + ?Sized>(f: &C, r_in: f64, r_out: f64, grid: AnnulusGrid) -> Result<f64> {
    annulus_nodes(r_in, r_out, grid)?;
    annulus_area_log(f, r_in.ln(), r_out.ln(), grid)
}

/// [`annulus_area`] between log-radii.
pub fn annulus_area_log<C: ConformalFactor + ?Sized>(f: &C, t_in: f64, t_out: f64, grid: AnnulusGrid) -> Result<f64> {
    let (nodes, dtheta) = annulus_nodes_log(t_in, t_out, grid)?;
    let mut total = 0.0;
    for &(t, w) in &nodes {
        let ring: f64 = (0..grid.angular).map(|k| (2.0 * f.psi(t, dtheta * k as f64)).exp()).sum();
        total += w * ring * dtheta;
    }
    Ok(total)
}

/// Area of `r_in < |z| < r_out` under the hyperbolic cusp metric,
/// `2π (1/ln(1/r_out) - 1/ln(1/r_in))`, in log-radii.
pub fn hyperbolic_annulus_area_log(t_in: f64, t_out: f64) -> f64 {
    TAU * (1.0 / -t_out - 1.0 / -t_in)
}

/// The indicator the hyperbolic cusp must produce at `r = e^{-T}`: `2π/T`.
pub fn hyperbolic_indicator(big_t: f64) -> f64 {
    2.0 * PI / big_t
}
