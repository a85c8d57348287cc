//! Globally adaptive Gauss–Kronrod quadrature in one and two dimensions.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

/// Kronrod abscissae on [0, 1] (positive half of the symmetric 15-point rule).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the embedded 7-point rule (at odd Kronrod indices).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The fifteen Kronrod nodes on [-1, 1] with Kronrod and Gauss weights
/// (Gauss weight zero at Kronrod-only nodes).
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for i in 0..7 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[i] = (-XGK[i], WGK[i], wg);
        out[14 - i] = (XGK[i], WGK[i], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15_complex<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut k = Complex64::zero();
    let mut g = Complex64::zero();
    for (x, wk, wg) in rule() {
        let v = f(mid + half * x);
        k += v * wk;
        g += v * wg;
    }
    (k * half, ((k - g) * half).norm())
}

/// Integrates a complex-valued function over `[a, b]` to
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate<Complex64>> {
    let (v, e) = gk15_complex(&mut f, a, b);
    let mut intervals: Vec<(f64, f64, Complex64, f64)> = alloc::vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total: Complex64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(Estimate { value: total, error: err, evaluations });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::NotConverged { what: "adaptive quadrature", estimate: total.norm(), error_bound: err });
        }
        let (idx, _) =
            intervals.iter().enumerate().fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15_complex(&mut f, lo, mid);
        let (v2, e2) = gk15_complex(&mut f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Real-valued wrapper around [`integrate_complex`].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate<f64>> {
    let est = integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_intervals)?;
    Ok(Estimate { value: est.value.re, error: est.error, evaluations: est.evaluations })
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: f64,
    error: f64,
}

fn tensor_gk<F: FnMut(f64, f64) -> f64>(f: &mut F, x0: f64, x1: f64, y0: f64, y1: f64) -> (f64, f64) {
    let r = rule();
    let (hx, mx) = (0.5 * (x1 - x0), 0.5 * (x0 + x1));
    let (hy, my) = (0.5 * (y1 - y0), 0.5 * (y0 + y1));
    let mut k = 0.0;
    let mut g = 0.0;
    for &(xi, wki, wgi) in r.iter() {
        let x = mx + hx * xi;
        for &(yj, wkj, wgj) in r.iter() {
            let v = f(x, my + hy * yj);
            k += wki * wkj * v;
            g += wgi * wgj * v;
        }
    }
    (k * hx * hy, ((k - g) * hx * hy).abs())
}

/// Adaptive tensor-product Gauss–Kronrod cubature over a rectangle,
/// bisecting the worst cell along its longer side.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    abs_tol: f64,
    rel_tol: f64,
    max_cells: usize,
) -> Result<Estimate<f64>> {
    let (value, error) = tensor_gk(&mut f, x0, x1, y0, y1);
    let mut cells = alloc::vec![Cell { x0, x1, y0, y1, value, error }];
    let mut evaluations = 225;
    loop {
        // Ordered summation keeps the result deterministic.
        let total: f64 = cells.iter().map(|c| c.value).sum();
        let err: f64 = cells.iter().map(|c| c.error).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate { value: total, error: err, evaluations });
        }
        if cells.len() >= max_cells {
            return Err(Error::NotConverged { what: "adaptive cubature", estimate: total, error_bound: err });
        }
        let (idx, _) =
            cells.iter().enumerate().fold((0, -1.0), |best, (i, c)| if c.error > best.1 { (i, c.error) } else { best });
        let c = cells.remove(idx);
        let halves = if (c.x1 - c.x0) / (x1 - x0) >= (c.y1 - c.y0) / (y1 - y0) {
            let m = 0.5 * (c.x0 + c.x1);
            [(c.x0, m, c.y0, c.y1), (m, c.x1, c.y0, c.y1)]
        } else {
            let m = 0.5 * (c.y0 + c.y1);
            [(c.x0, c.x1, c.y0, m), (c.x0, c.x1, m, c.y1)]
        };
        for (a0, a1, b0, b1) in halves {
            let (value, error) = tensor_gk(&mut f, a0, a1, b0, b1);
            cells.insert(idx, Cell { x0: a0, x1: a1, y0: b0, y1: b1, value, error });
        }
        evaluations += 450;
    }
}

/// Fixed composite 15-point Kronrod rule with `panels` equal panels; used
/// where a smooth integrand is sampled on a predetermined grid.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let r = rule();
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 15);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w, _) in r.iter() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}
