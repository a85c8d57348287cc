//! Polynomial root finding.
//!
//! Simple roots come from Aberth–Ehrlich simultaneous iteration, with the
//! eigenvalues of the companion matrix (shifted Hessenberg QR) as fallback.
//! Multiplicities come from a square-free decomposition by approximate GCD,
//! after which roots closer than `1e-7 (1 + |r|)` are merged. Rounding
//! spreads an m-fold root into a ring of radius about `(ε κ)^{1/m}`, which
//! the GCD can miss for large `m`; such rings are merged when the first `m`
//! Taylor coefficients at their centroid vanish to relative `1e-8`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::poly::{approximate_gcd, Polynomial};
use crate::sphere::SpherePoint;
use crate::{Error, Result};

/// Relative threshold used when testing polynomial remainders for zero.
pub const GCD_TOLERANCE: f64 = 1e-10;

/// Roots closer than `CLUSTER_RADIUS * (1 + |r|)` are one root.
pub const CLUSTER_RADIUS: f64 = 1e-7;

/// Relative size under which a Taylor coefficient at a cluster centroid
/// counts as zero when confirming a multiple root.
pub const MULTIPLE_ROOT_TOLERANCE: f64 = 1e-8;

/// Largest ring, relative to `1 + |r|`, considered as one split root.
const RING_RADIUS: f64 = 0.1;

/// Relative floor on the residual scale, in units of the coefficient norm.
const RESIDUAL_FLOOR: f64 = 1e-6;

const ABERTH_MAX_ITER: usize = 500;

/// Roots of `p` with multiplicities.
///
/// Every returned root satisfies `|p(r)| <= tol * max(Σ|a_k||r|^k, 1e-6 ‖p‖)`
/// and the multiplicities add up to `deg p`. The floor matters only near the
/// origin, where rounding noise in the low coefficients dominates both sides.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<(SpherePoint, usize)>> {
    Ok(roots_with_multiplicity(p, tol)?.into_iter().map(|(r, m)| (SpherePoint::Finite(r), m)).collect())
}

/// Like [`poly_roots`] but returning plain complex roots.
pub fn roots_with_multiplicity(p: &Polynomial, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut roots = square_free_roots(p)?;
    merge_clusters(&mut roots);
    merge_rings(p, &mut roots);

    let total: usize = roots.iter().map(|&(_, m)| m).sum();
    let residuals: Vec<f64> = roots
        .iter()
        .map(|&(r, _)| p.eval(r).norm() / p.eval_scale(r).max(RESIDUAL_FLOOR * p.norm()).max(f64::MIN_POSITIVE))
        .collect();
    if total != deg || residuals.iter().any(|&e| !(e <= tol)) {
        return Err(Error::RootClustering {
            message: format!("multiplicities sum to {total}, degree is {deg}"),
            residuals,
        });
    }
    roots.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    Ok(roots)
}

/// Yun-style decomposition: `p = g * q` with `g = gcd(p, p')`, roots of `q` are
/// simple and each picks up one extra multiplicity per nearby root of `g`.
fn square_free_roots(p: &Polynomial) -> Result<Vec<(Complex64, usize)>> {
    let deg = p.deg();
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == 1 {
        return Ok(vec![(-p.coeff(0) / p.coeff(1), 1)]);
    }
    let g = approximate_gcd(p, &p.derivative(), GCD_TOLERANCE);
    if g.deg() == 0 {
        return Ok(simple_roots(p)?.into_iter().map(|r| (r, 1)).collect());
    }
    let (q, _) = p.div_rem(&g);
    let mut out: Vec<(Complex64, usize)> = simple_roots(&q)?.into_iter().map(|r| (r, 1)).collect();
    for (r, m) in square_free_roots(&g)? {
        let nearest = out
            .iter_mut()
            .min_by(|a, b| (a.0 - r).norm().partial_cmp(&(b.0 - r).norm()).unwrap_or(core::cmp::Ordering::Equal))
            .ok_or_else(|| Error::Internal("square-free part has no roots".into()))?;
        nearest.1 += m;
    }
    Ok(out)
}

fn merge_clusters(roots: &mut Vec<(Complex64, usize)>) {
    let mut i = 0;
    while i < roots.len() {
        let mut j = i + 1;
        while j < roots.len() {
            let (a, ma) = roots[i];
            let (b, mb) = roots[j];
            if (a - b).norm() <= CLUSTER_RADIUS * (1.0 + a.norm().max(b.norm())) {
                let w = (ma + mb) as f64;
                roots[i] = ((a * ma as f64 + b * mb as f64) / w, ma + mb);
                roots.remove(j);
            } else {
                j += 1;
            }
        }
        i += 1;
    }
}

/// Groups roots by single linkage at shrinking radii and merges each group
/// that passes the Taylor test at its weighted centroid.
fn merge_rings(p: &Polynomial, roots: &mut Vec<(Complex64, usize)>) {
    let mut radius = RING_RADIUS;
    while radius > CLUSTER_RADIUS && roots.len() > 1 {
        let n = roots.len();
        let mut group: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (roots[i].0, roots[j].0);
                if (a - b).norm() <= radius * (1.0 + a.norm().max(b.norm())) {
                    let (gi, gj) = (group[i], group[j]);
                    if gi != gj {
                        for g in group.iter_mut() {
                            if *g == gj {
                                *g = gi;
                            }
                        }
                    }
                }
            }
        }
        let mut merged: Vec<(Complex64, usize)> = Vec::with_capacity(n);
        let mut taken = vec![false; n];
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let members: Vec<usize> = (i..n).filter(|&j| group[j] == group[i]).collect();
            let m: usize = members.iter().map(|&j| roots[j].1).sum();
            let c = members.iter().map(|&j| roots[j].0 * roots[j].1 as f64).sum::<Complex64>() / m as f64;
            let c = if members.len() > 1 { polish_multiple(p, c, m) } else { c };
            if members.len() > 1 && vanishes_to_order(p, c, m) {
                merged.push((c, m));
                for &j in &members {
                    taken[j] = true;
                }
            } else {
                merged.push(roots[i]);
                taken[i] = true;
            }
        }
        *roots = merged;
        radius /= 3.0;
    }
}

/// The centroid of a split m-fold root is only good to `O(ε^{2/m})`;
/// Newton on `p^{(m-1)}`, where the root is simple, sharpens it.
fn polish_multiple(p: &Polynomial, c: Complex64, m: usize) -> Complex64 {
    let mut q = p.clone();
    for _ in 0..m - 1 {
        q = q.derivative();
    }
    let dq = q.derivative();
    let mut z = c;
    let mut last = q.eval(z).norm();
    for _ in 0..20 {
        let d = dq.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - q.eval(z) / d;
        let value = q.eval(next).norm();
        if !(value < last) || (next - c).norm() > RING_RADIUS * (1.0 + c.norm()) {
            break;
        }
        z = next;
        last = value;
    }
    z
}

fn vanishes_to_order(p: &Polynomial, c: Complex64, m: usize) -> bool {
    let shifted = p.taylor_shift(c);
    let scales = p.shift_scales(c.norm());
    (0..m).all(|k| shifted.coeff(k).norm() <= MULTIPLE_ROOT_TOLERANCE * scales[k])
}

/// All roots of a polynomial assumed to have simple roots.
pub fn simple_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    match deg {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-p.coeff(0) / p.coeff(1)]),
        _ => {}
    }
    let mut roots = match aberth(p, ABERTH_MAX_ITER, 1e-15) {
        Some(r) => r,
        None => companion_eigenvalues(p).ok_or(Error::NotConverged {
            what: "polynomial root finding",
            estimate: f64::NAN,
            error_bound: f64::NAN,
        })?,
    };
    let dp = p.derivative();
    for r in roots.iter_mut() {
        polish(p, &dp, r);
    }
    Ok(roots)
}

fn polish(p: &Polynomial, dp: &Polynomial, r: &mut Complex64) {
    for _ in 0..3 {
        let v = p.eval(*r);
        let d = dp.eval(*r);
        if d.is_zero() || v.is_zero() {
            return;
        }
        let step = v / d;
        let next = *r - step;
        if p.eval(next).norm() < v.norm() {
            *r = next;
        } else {
            return;
        }
    }
}

/// Aberth–Ehrlich iteration. Returns `None` if it fails to converge.
pub fn aberth(p: &Polynomial, max_iter: usize, eps: f64) -> Option<Vec<Complex64>> {
    let n = p.degree()?;
    if n == 0 {
        return Some(Vec::new());
    }
    let dp = p.derivative();
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = (p.eval(z[i]), dp.eval(z[i]));
            if v.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return None;
            }
            z[i] -= w;
            if w.norm() <= eps * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Some(z);
        }
    }
    // Multiple roots converge only linearly; accept if the residuals are small.
    let ok = z.iter().all(|&r| p.eval(r).norm() <= 1e-8 * p.eval_scale(r));
    ok.then_some(z)
}

fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.deg();
    let lead = p.leading().norm();
    // Radius from the geometric mean of the roots, bounded by Cauchy's bound.
    let cauchy = 1.0 + p.coeffs()[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let a0 = p.coeff(0).norm();
    let mut radius = if a0 > 0.0 { (a0 / lead).powf(1.0 / n as f64) } else { 1.0 };
    if !(radius > 0.0) || !radius.is_finite() {
        radius = 1.0;
    }
    radius = radius.min(cauchy);
    let center = -p.coeff(n - 1) / (p.leading() * n as f64);
    let offset = 0.4;
    (0..n)
        .map(|k| {
            let theta = core::f64::consts::TAU * k as f64 / n as f64 + offset;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Eigenvalues of the companion matrix by shifted QR on its Hessenberg form.
pub fn companion_eigenvalues(p: &Polynomial) -> Option<Vec<Complex64>> {
    let n = p.degree()?;
    if n == 0 {
        return Some(Vec::new());
    }
    let lead = p.leading();
    let mut h = vec![vec![Complex64::zero(); n]; n];
    for j in 0..n {
        h[0][j] = -p.coeff(n - 1 - j) / lead;
    }
    for i in 1..n {
        h[i][i - 1] = Complex64::new(1.0, 0.0);
    }
    hessenberg_eigenvalues(h)
}

/// Eigenvalues of a complex upper Hessenberg matrix.
fn hessenberg_eigenvalues(mut h: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    let mut eig = Vec::with_capacity(h.len());
    let mut hi = h.len();
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            eig.push(h[0][0]);
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[lo][lo].norm() + h[lo - 1][lo - 1].norm();
            if h[lo][lo - 1].norm() <= f64::EPSILON * s.max(f64::MIN_POSITIVE) {
                h[lo][lo - 1] = Complex64::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eig.push(h[hi - 1][hi - 1]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * h.len() + 100 {
            return None;
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift
            h[hi - 1][hi - 1] + Complex64::new(h[hi - 1][hi - 2].norm(), 0.0)
        } else {
            wilkinson_shift(h[hi - 2][hi - 2], h[hi - 2][hi - 1], h[hi - 1][hi - 2], h[hi - 1][hi - 1])
        };
        for k in lo..hi {
            h[k][k] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi - 1 {
            let a = h[k][k];
            let b = h[k + 1][k];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (Complex64::new(1.0, 0.0), Complex64::zero()) } else { (a / r, b / r) };
            for j in k..hi {
                let x = h[k][j];
                let y = h[k + 1][j];
                h[k][j] = c.conj() * x + s.conj() * y;
                h[k + 1][j] = -s * x + c * y;
            }
            rotations.push((c, s));
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi - 1) {
                let x = h[i][k];
                let y = h[i][k + 1];
                h[i][k] = x * c + y * s;
                h[i][k + 1] = -x * s.conj() + y * c.conj();
            }
        }
        for k in lo..hi {
            h[k][k] += mu;
        }
    }
    Some(eig)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}
