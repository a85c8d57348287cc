//! Abelian differentials of the third kind and the metrics they induce.
//!
//! A differential `ω = Σ r_k dz/(z - q_k)` with real residues is the
//! logarithmic derivative `df/f` of a multivalued developing map `f` whose
//! monodromy is multiplication by unit complex numbers. The metric
//! `f* g_st` has a cone point of angle `2π(k+1)` at each zero of order `k`
//! of `ω` and of angle `2π|r|` at each pole.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::{Float, One, Zero};

use crate::poly::Polynomial;
use crate::pullback::{ConicalDivisor, POINT_TOLERANCE, SMOOTH_ANGLE_TOLERANCE};
use crate::quadrature::integrate_complex;
use crate::rational::RationalMap;
use crate::roots::roots_with_multiplicity;
use crate::sphere::{chordal_distance, SpherePoint};
use crate::{Error, Result};

/// Relative slack allowed in the residue theorem at construction.
pub const RESIDUE_SUM_TOLERANCE: f64 = 1e-12;

/// A residue within this distance of an integer counts as an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

/// Minimum chordal distance between a path and the poles.
pub const PATH_CLEARANCE: f64 = 1e-3;

/// Error budget for a path integral.
pub const PATH_INTEGRAL_TOLERANCE: f64 = 1e-10;

/// Chordal distance under which a point is identified with a zero or pole.
const MATCH_TOLERANCE: f64 = 1e-7;

/// A meromorphic 1-form on the sphere with only simple poles and real residues.
#[derive(Clone, Debug, PartialEq)]
pub struct ThirdKindDifferential {
    poles: Vec<(SpherePoint, f64)>,
}

impl ThirdKindDifferential {
    /// Validates the pole data. Infinity may be listed explicitly; if it is
    /// not, the finite residues alone must sum to zero.
    pub fn new(poles: Vec<(SpherePoint, f64)>) -> Result<Self> {
        if poles.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a differential of the third kind needs at least 2 poles, got {}",
                poles.len()
            )));
        }
        for (i, (p, r)) in poles.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::InvalidArgument(format!("residue {r} is not finite")));
            }
            if *r == 0.0 {
                return Err(Error::ZeroResidue);
            }
            if let SpherePoint::Finite(z) = p {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::InvalidArgument(format!("pole {z} is not finite")));
                }
            }
            if poles[..i].iter().any(|(q, _)| chordal_distance(p, q) <= POINT_TOLERANCE) {
                return Err(Error::DuplicatePoint);
            }
        }
        let sum: f64 = poles.iter().map(|(_, r)| r).sum();
        let scale: f64 = poles.iter().map(|(_, r)| r.abs()).sum();
        if sum.abs() > RESIDUE_SUM_TOLERANCE * scale {
            return Err(Error::ResidueTheorem { sum });
        }
        Ok(ThirdKindDifferential { poles })
    }

    /// `dz/z`, with poles at 0 and infinity.
    pub fn theta() -> Self {
        ThirdKindDifferential { poles: alloc::vec![(SpherePoint::ZERO, 1.0), (SpherePoint::Infinity, -1.0)] }
    }

    pub fn poles(&self) -> &[(SpherePoint, f64)] {
        &self.poles
    }

    pub fn finite_poles(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        self.poles.iter().filter_map(|(p, r)| p.finite().map(|z| (z, *r)))
    }

    /// Residue at infinity, `-Σ` finite residues (zero when infinity is not a pole).
    pub fn residue_at_infinity(&self) -> f64 {
        self.poles.iter().find(|(p, _)| p.is_infinite()).map(|&(_, r)| r).unwrap_or(0.0)
    }

    pub fn residue_at(&self, p: &SpherePoint) -> Option<f64> {
        self.poles.iter().find(|(q, _)| chordal_distance(p, q) <= MATCH_TOLERANCE).map(|&(_, r)| r)
    }

    /// The coefficient of `dz` at a finite point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.finite_poles().map(|(q, r)| r / (z - q)).sum()
    }

    /// `ω = P(z)/Q(z) dz` with `Q = Π (z - q_k)` over the finite poles.
    pub fn numerator_denominator(&self) -> (Polynomial, Polynomial) {
        let finite: Vec<(Complex64, f64)> = self.finite_poles().collect();
        let n = finite.len();
        let mut p = Polynomial::zero();
        for (k, &(_, r)) in finite.iter().enumerate() {
            let mut term = Polynomial::constant(Complex64::new(r, 0.0));
            for (j, &(q, _)) in finite.iter().enumerate() {
                if j != k {
                    term = &term * &Polynomial::linear_factor(q);
                }
            }
            p = &p + &term;
        }
        // The top coefficient is Σ r_k = -Res_∞; pin it to its exact value.
        let mut coeffs = p.into_coeffs();
        coeffs.resize(n, Complex64::zero());
        if n > 0 {
            coeffs[n - 1] = Complex64::new(-self.residue_at_infinity(), 0.0);
        }
        let p = Polynomial::new(coeffs).trim_relative(1e-10);
        let q = Polynomial::from_roots(&finite.iter().map(|&(q, _)| (q, 1)).collect::<Vec<_>>(), Complex64::one());
        (p, q)
    }
}

/// Zeros (with order) and simple poles of a differential.
#[derive(Clone, Debug, PartialEq)]
pub struct FormDivisor {
    pub zeros: Vec<(SpherePoint, usize)>,
    pub poles: Vec<SpherePoint>,
}

impl FormDivisor {
    /// `Σ zero orders - #poles`; always -2 on the sphere.
    pub fn degree(&self) -> i64 {
        self.zeros.iter().map(|&(_, k)| k as i64).sum::<i64>() - self.poles.len() as i64
    }
}

/// Role of a zero or pole of `ω` for `Ψ = 4|f|^2/(1+|f|^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    Saddle,
    Min,
    Max,
    /// A minimum at a pole with residue exactly 1, where the metric is smooth.
    SmoothMin,
    /// A maximum at a pole with residue exactly -1, where the metric is smooth.
    SmoothMax,
}

impl PointKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointKind::Saddle => "saddle",
            PointKind::Min => "min",
            PointKind::Max => "max",
            PointKind::SmoothMin => "smooth-min",
            PointKind::SmoothMax => "smooth-max",
        }
    }
}

/// Everything `build_metric` derives from a differential.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianMetricDescriptor {
    pub omega: ThirdKindDifferential,
    pub form_divisor: FormDivisor,
    pub divisor: ConicalDivisor,
    pub trivial: bool,
    pub area: f64,
    pub classification: Vec<(SpherePoint, PointKind)>,
}

/// A polyline in the finite plane, optionally closed.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPolyline {
    pub vertices: Vec<Complex64>,
    pub closed: bool,
}

impl PathPolyline {
    pub fn new(vertices: Vec<Complex64>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two vertices".into()));
        }
        if vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("path vertices must be finite".into()));
        }
        Ok(PathPolyline { vertices, closed })
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: Complex64, b: Complex64) -> Self {
        PathPolyline { vertices: alloc::vec![a, b], closed: false }
    }

    /// Closed regular `n`-gon inscribed in the circle `|z - center| = radius`,
    /// traversed counterclockwise from angle `phase`.
    pub fn circle(center: Complex64, radius: f64, n: usize, phase: f64) -> Self {
        let vertices = (0..n.max(3))
            .map(|k| center + Complex64::from_polar(radius, phase + TAU * k as f64 / n.max(3) as f64))
            .collect();
        PathPolyline { vertices, closed: true }
    }

    /// Open polyline through `n + 1` points of an arc.
    pub fn arc(center: Complex64, radius: f64, from: f64, to: f64, n: usize) -> Self {
        let n = n.max(1);
        let vertices =
            (0..=n).map(|k| center + Complex64::from_polar(radius, from + (to - from) * k as f64 / n as f64)).collect();
        PathPolyline { vertices, closed: false }
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        if self.closed {
            self.vertices[0]
        } else {
            self.vertices[self.vertices.len() - 1]
        }
    }

    /// Segments in traversal order, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Zeros and poles of `ω`. Finite zeros are the roots of the numerator of
/// `Σ r_k/(z - q_k)`; the order at infinity is `#finite poles - deg P - 2`.
pub fn differential_divisor(w: &ThirdKindDifferential) -> Result<FormDivisor> {
    let (p, q) = w.numerator_denominator();
    let mut zeros = Vec::new();
    if p.deg() > 0 {
        for (z, m) in roots_with_multiplicity(&p, 1e-8)? {
            zeros.push((SpherePoint::Finite(z), m));
        }
    }
    let order_inf = q.deg() as i64 - p.deg() as i64 - 2;
    if order_inf > 0 {
        zeros.push((SpherePoint::Infinity, order_inf as usize));
    }
    let poles: Vec<SpherePoint> = w.poles.iter().map(|(p, _)| *p).collect();
    let div = FormDivisor { zeros, poles };
    if div.degree() != -2 {
        return Err(Error::Internal(format!("differential divisor has degree {} instead of -2", div.degree())));
    }
    Ok(div)
}

/// `df/f` for a nonconstant rational map: a simple pole of residue
/// `ord_p f` at every zero and pole of `f`, infinity included.
pub fn logarithmic_differential(f: &RationalMap) -> Result<ThirdKindDifferential> {
    if f.is_constant() {
        return Err(Error::ConstantMap);
    }
    let mut poles = Vec::new();
    if f.num().deg() > 0 {
        for (z, m) in roots_with_multiplicity(f.num(), 1e-8)? {
            poles.push((SpherePoint::Finite(z), m as f64));
        }
    }
    if f.den().deg() > 0 {
        for (z, m) in roots_with_multiplicity(f.den(), 1e-8)? {
            poles.push((SpherePoint::Finite(z), -(m as f64)));
        }
    }
    let order_inf = f.den().deg() as i64 - f.num().deg() as i64;
    if order_inf != 0 {
        poles.push((SpherePoint::Infinity, order_inf as f64));
    }
    ThirdKindDifferential::new(poles)
}

/// Real parts of all periods vanish. On the sphere the periods are `2πi`
/// times sums of residues, so this holds exactly when the residues are real.
pub fn is_real_part_exact(w: &ThirdKindDifferential) -> bool {
    let sum: f64 = w.poles.iter().map(|(_, r)| r).sum();
    let scale: f64 = w.poles.iter().map(|(_, r)| r.abs()).sum();
    w.poles.iter().all(|(_, r)| r.is_finite()) && sum.abs() <= RESIDUE_SUM_TOLERANCE * scale
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOLERANCE
}

/// All periods lie in `2πi Z`, so `exp(∫ω)` is single valued.
pub fn is_trivial(w: &ThirdKindDifferential) -> bool {
    w.poles.iter().all(|&(_, r)| is_integer(r))
}

fn pole_kind(r: f64) -> PointKind {
    match (r > 0.0, (r.abs() - 1.0).abs() <= SMOOTH_ANGLE_TOLERANCE) {
        (true, false) => PointKind::Min,
        (true, true) => PointKind::SmoothMin,
        (false, false) => PointKind::Max,
        (false, true) => PointKind::SmoothMax,
    }
}

/// Cone divisor, area and critical-point structure of the metric with
/// character 1-form `ω`.
pub fn build_metric(w: &ThirdKindDifferential) -> Result<AbelianMetricDescriptor> {
    let form_divisor = differential_divisor(w)?;
    let mut entries = Vec::new();
    let mut classification = Vec::new();
    for &(p, k) in &form_divisor.zeros {
        entries.push((p, (k + 1) as f64));
        classification.push((p, PointKind::Saddle));
    }
    for &(p, r) in &w.poles {
        let kind = pole_kind(r);
        if !matches!(kind, PointKind::SmoothMin | PointKind::SmoothMax) {
            entries.push((p, r.abs()));
        }
        classification.push((p, kind));
    }
    let divisor = ConicalDivisor::new(entries)?;
    let area = TAU * w.poles.iter().map(|(_, r)| r.abs()).sum::<f64>();
    Ok(AbelianMetricDescriptor {
        omega: w.clone(),
        form_divisor,
        divisor,
        trivial: is_trivial(w),
        area,
        classification,
    })
}

/// Kind of a zero or pole of the dual field `Y = (f/f') ∂_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldPointKind {
    Zero,
    Pole,
}

/// Zeros and poles of the vector field dual to `ω`: a simple zero at each
/// pole of `ω`, a pole of the same order at each zero of `ω`.
pub fn dual_field_orders(w: &ThirdKindDifferential) -> Result<Vec<(SpherePoint, FieldPointKind, usize)>> {
    let div = differential_divisor(w)?;
    let mut out: Vec<_> = w.poles.iter().map(|&(p, _)| (p, FieldPointKind::Zero, 1)).collect();
    out.extend(div.zeros.iter().map(|&(p, k)| (p, FieldPointKind::Pole, k)));
    Ok(out)
}

/// Whether `p` is a minimum, maximum or saddle of `Ψ`. Poles are reported
/// as plain minima or maxima regardless of whether the metric is smooth there.
pub fn psi_classify(w: &ThirdKindDifferential, p: &SpherePoint) -> Result<PointKind> {
    if let Some(r) = w.residue_at(p) {
        return Ok(if r > 0.0 { PointKind::Min } else { PointKind::Max });
    }
    let div = differential_divisor(w)?;
    if div.zeros.iter().any(|(q, _)| chordal_distance(p, q) <= MATCH_TOLERANCE) {
        return Ok(PointKind::Saddle);
    }
    Err(Error::OrdinaryPoint)
}

/// `Π (z - q_k)^{r_k}` over the finite poles, for integer residues.
pub fn reconstruct_rational(w: &ThirdKindDifferential) -> Result<RationalMap> {
    if !is_trivial(w) {
        return Err(Error::MonodromyObstruction);
    }
    let mut zeros = Vec::new();
    let mut poles = Vec::new();
    for (q, r) in w.finite_poles() {
        let k = r.round() as i64;
        if k > 0 {
            zeros.push((q, k as usize));
        } else {
            poles.push((q, (-k) as usize));
        }
    }
    let num = Polynomial::from_roots(&zeros, Complex64::one());
    let den = Polynomial::from_roots(&poles, Complex64::one());
    Ok(RationalMap::from_coprime(num, den))
}

/// Chordal distance from `p` to the segment `[a, b]`, measured at the
/// Euclidean nearest point (for infinity, at the farther endpoint).
fn segment_clearance(a: Complex64, b: Complex64, p: &SpherePoint) -> f64 {
    match *p {
        SpherePoint::Infinity => {
            chordal_distance(&SpherePoint::Finite(a), p).min(chordal_distance(&SpherePoint::Finite(b), p))
        }
        SpherePoint::Finite(q) => {
            let d = b - a;
            let len2 = d.norm_sqr();
            let t = if len2 > 0.0 { ((q - a) * d.conj()).re / len2 } else { 0.0 };
            let nearest = a + d * t.clamp(0.0, 1.0);
            chordal_distance(&SpherePoint::Finite(nearest), p)
        }
    }
}

fn check_clearance(w: &ThirdKindDifferential, path: &PathPolyline) -> Result<()> {
    for (i, (a, b)) in path.segments().enumerate() {
        for (p, _) in &w.poles {
            let distance = segment_clearance(a, b, p);
            if distance < PATH_CLEARANCE {
                return Err(Error::PathTooClose { segment: i, distance });
            }
        }
    }
    Ok(())
}

/// `∫_path ω` by adaptive quadrature, segment by segment.
pub fn path_integral(w: &ThirdKindDifferential, path: &PathPolyline) -> Result<Complex64> {
    check_clearance(w, path)?;
    let segments: Vec<_> = path.segments().collect();
    let budget = PATH_INTEGRAL_TOLERANCE / segments.len() as f64;
    let mut total = Complex64::zero();
    let mut error = 0.0;
    for &(a, b) in &segments {
        let d = b - a;
        if d.norm() == 0.0 {
            continue;
        }
        let est = integrate_complex(|t| w.eval(a + d * t) * d, 0.0, 1.0, 0.1 * budget, 0.0, 20_000)?;
        total += est.value;
        error += est.error;
    }
    if error > PATH_INTEGRAL_TOLERANCE {
        return Err(Error::NotConverged { what: "path integral", estimate: total.norm(), error_bound: error });
    }
    Ok(total)
}

/// `f(end)` for the branch of `exp(∫ω)` with `f(basepoint) = 1`.
pub fn develop(w: &ThirdKindDifferential, basepoint: Complex64, path: &PathPolyline) -> Result<Complex64> {
    develop_from(w, basepoint, Complex64::one(), path)
}

/// `f(end)` for the branch of `exp(∫ω)` with `f(basepoint) = f0`.
pub fn develop_from(
    w: &ThirdKindDifferential,
    basepoint: Complex64,
    f0: Complex64,
    path: &PathPolyline,
) -> Result<Complex64> {
    if (path.start() - basepoint).norm() > 1e-12 * (1.0 + basepoint.norm()) {
        return Err(Error::InvalidArgument(format!(
            "path starts at {} but the basepoint is {basepoint}",
            path.start()
        )));
    }
    Ok(f0 * path_integral(w, path)?.exp())
}

/// `Ψ = 4|f|^2/(1+|f|^2)` at the end of `path`, with `f(basepoint) = 1`.
pub fn psi_value(w: &ThirdKindDifferential, basepoint: Complex64, path: &PathPolyline) -> Result<f64> {
    psi_value_from(w, basepoint, Complex64::one(), path)
}

/// As [`psi_value`] with `f(basepoint) = f0`.
pub fn psi_value_from(
    w: &ThirdKindDifferential,
    basepoint: Complex64,
    f0: Complex64,
    path: &PathPolyline,
) -> Result<f64> {
    let f = develop_from(w, basepoint, f0, path)?;
    Ok(psi_of(f))
}

/// `4|f|^2/(1+|f|^2)`, stable for large `|f|`.
pub fn psi_of(f: Complex64) -> f64 {
    let m = f.norm_sqr();
    if m <= 1.0 {
        4.0 * m / (1.0 + m)
    } else {
        4.0 / (1.0 + 1.0 / m)
    }
}

/// Winding number of a closed polyline around `q`, counted from crossings of
/// the ray `q + [0, ∞)`. A vertex on the ray counts as lying just above it.
pub fn winding_number(path: &PathPolyline, q: Complex64) -> Result<i64> {
    if let Some(i) = path.vertices.iter().position(|v| *v == q) {
        return Err(Error::DegenerateWinding { vertex: i });
    }
    let mut n = 0;
    for (i, (a, b)) in path.segments().enumerate() {
        let up = a.im <= q.im && b.im > q.im;
        let down = b.im <= q.im && a.im > q.im;
        if !(up || down) {
            // Horizontal segment through q.
            if a.im == q.im && b.im == q.im && (a.re - q.re) * (b.re - q.re) < 0.0 {
                return Err(Error::DegenerateWinding { vertex: i });
            }
            continue;
        }
        // Sign of the cross product tells on which side of the segment q lies.
        let side = (b.re - a.re) * (q.im - a.im) - (q.re - a.re) * (b.im - a.im);
        if side == 0.0 {
            return Err(Error::DegenerateWinding { vertex: i });
        }
        if up && side > 0.0 {
            n += 1;
        } else if down && side < 0.0 {
            n -= 1;
        }
    }
    Ok(n)
}

/// `exp(∮ω)` around a closed loop. It is computed twice, by quadrature and as
/// `exp(2πi Σ n_k r_k)` from exact winding numbers; the two must agree to 1e-9.
pub fn monodromy_multiplier(w: &ThirdKindDifferential, path: &PathPolyline) -> Result<Complex64> {
    if !path.closed {
        return Err(Error::InvalidArgument("monodromy needs a closed loop".into()));
    }
    let mut enclosed = 0.0;
    for (q, r) in w.finite_poles() {
        enclosed += winding_number(path, q)? as f64 * r;
    }
    let exact = Complex64::new(0.0, TAU * enclosed).exp();
    let quad = path_integral(w, path)?.exp();
    if (exact - quad).norm() > 1e-9 {
        return Err(Error::Internal(format!("quadrature multiplier {quad} disagrees with winding multiplier {exact}")));
    }
    Ok(exact)
}

/// `2π Σ|r_k|`, the area of the metric.
pub fn area(w: &ThirdKindDifferential) -> f64 {
    2.0 * PI * w.poles.iter().map(|(_, r)| r.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn pt(re: f64) -> SpherePoint {
        SpherePoint::new(re, 0.0)
    }

    fn trivial_example() -> ThirdKindDifferential {
        ThirdKindDifferential::new(alloc::vec![(pt(0.0), 2.0), (pt(1.0), -1.0), (pt(-1.0), -1.0)]).unwrap()
    }

    fn football() -> ThirdKindDifferential {
        ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.5), (SpherePoint::Infinity, -1.5)]).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert!(matches!(
            ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.0), (pt(1.0), 1.0)]),
            Err(Error::ResidueTheorem { .. })
        ));
        assert_eq!(ThirdKindDifferential::new(alloc::vec![(pt(0.0), 0.0), (pt(1.0), 0.0)]), Err(Error::ZeroResidue));
        assert_eq!(
            ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.0), (pt(0.0), -1.0)]),
            Err(Error::DuplicatePoint)
        );
        assert!(ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.0)]).is_err());
        assert_eq!(trivial_example().residue_at_infinity(), 0.0);
    }

    #[test]
    fn divisors_of_examples() {
        let d = differential_divisor(&ThirdKindDifferential::theta()).unwrap();
        assert!(d.zeros.is_empty());
        assert_eq!(d.poles.len(), 2);

        let d = differential_divisor(&trivial_example()).unwrap();
        assert_eq!(d.zeros, alloc::vec![(SpherePoint::Infinity, 1)]);

        let w = ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.0), (pt(2.0), 1.0), (SpherePoint::Infinity, -2.0)])
            .unwrap();
        let d = differential_divisor(&w).unwrap();
        assert_eq!(d.zeros.len(), 1);
        assert!(d.zeros[0].0.approx_eq(&pt(1.0), 1e-12));
    }

    #[test]
    fn log_differentials() {
        let w = logarithmic_differential(&RationalMap::identity()).unwrap();
        assert_eq!(w.residue_at(&SpherePoint::ZERO), Some(1.0));
        assert_eq!(w.residue_at(&SpherePoint::Infinity), Some(-1.0));

        let f = RationalMap::new(Polynomial::from_real(&[0.0, 0.0, 1.0]), Polynomial::from_real(&[-1.0, 0.0, 1.0]))
            .unwrap();
        let w = logarithmic_differential(&f).unwrap();
        assert_eq!(w.poles().len(), 3);
        assert_eq!(w.residue_at(&pt(0.0)), Some(2.0));
        assert_eq!(w.residue_at(&pt(1.0)), Some(-1.0));
        assert_eq!(w.residue_at(&pt(-1.0)), Some(-1.0));

        let m = RationalMap::new(Polynomial::from_real(&[0.0, 1.0]), Polynomial::from_real(&[-1.0, 1.0])).unwrap();
        let w = logarithmic_differential(&m).unwrap();
        assert_eq!(w.poles().len(), 2);
        assert_eq!(w.residue_at(&pt(1.0)), Some(-1.0));
    }

    #[test]
    fn metrics_of_examples() {
        let m = build_metric(&ThirdKindDifferential::theta()).unwrap();
        assert!(m.divisor.is_empty() && m.trivial);
        assert!((m.area - 4.0 * PI).abs() < 1e-14);
        assert_eq!(m.classification[0].1, PointKind::SmoothMin);
        assert_eq!(m.classification[1].1, PointKind::SmoothMax);

        let m = build_metric(&football()).unwrap();
        assert!(!m.trivial);
        assert_eq!(m.divisor.alpha_at(&SpherePoint::ZERO), Some(1.5));
        assert_eq!(m.divisor.alpha_at(&SpherePoint::Infinity), Some(1.5));
        assert!((m.area - 6.0 * PI).abs() < 1e-14);

        let m = build_metric(&trivial_example()).unwrap();
        assert_eq!(m.divisor.len(), 2);
        assert_eq!(m.divisor.alpha_at(&SpherePoint::Infinity), Some(2.0));
        assert!((m.area - 8.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn developing_examples() {
        let w = ThirdKindDifferential::new(alloc::vec![(pt(0.0), 1.5), (SpherePoint::Infinity, -1.5)]).unwrap();
        let semicircle = PathPolyline::arc(c64(0.0, 0.0), 1.0, 0.0, PI, 400);
        // The polygon is not the circle, but the integral only sees winding.
        let f = develop(&w, c64(1.0, 0.0), &semicircle).unwrap();
        assert!((f - c64(0.0, -1.0)).norm() < 1e-10);

        let f = develop(
            &ThirdKindDifferential::theta(),
            c64(1.0, 0.0),
            &PathPolyline::segment(c64(1.0, 0.0), c64(2.0, 0.0)),
        )
        .unwrap();
        assert!((f - c64(2.0, 0.0)).norm() < 1e-10);

        let path = PathPolyline::new(alloc::vec![c64(2.0, 0.0), c64(2.5, 1.0), c64(3.0, 0.0)], false).unwrap();
        let f = develop(&trivial_example(), c64(2.0, 0.0), &path).unwrap();
        assert!((f - c64(27.0 / 32.0, 0.0)).norm() < 1e-10);
        let back = PathPolyline::segment(c64(3.0, 0.0), c64(2.0, 0.0));
        let psi = psi_value_from(&trivial_example(), c64(3.0, 0.0), c64(9.0 / 8.0, 0.0), &back).unwrap();
        assert!((psi - 64.0 / 25.0).abs() < 1e-10);
    }

    #[test]
    fn paths_near_poles_are_rejected() {
        let err = develop(
            &ThirdKindDifferential::theta(),
            c64(-1.0, 1e-4),
            &PathPolyline::segment(c64(-1.0, 1e-4), c64(1.0, 1e-4)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::PathTooClose { segment: 0, .. }));
    }

    #[test]
    fn monodromy_examples() {
        let unit = PathPolyline::circle(c64(0.0, 0.0), 1.0, 64, 0.1);
        let m = monodromy_multiplier(&football(), &unit).unwrap();
        assert!((m + 1.0).norm() < 1e-9);
        let m = monodromy_multiplier(&ThirdKindDifferential::theta(), &unit).unwrap();
        assert!((m - 1.0).norm() < 1e-9);
        let small = PathPolyline::circle(c64(1.0, 0.0), 0.5, 64, 0.1);
        let m = monodromy_multiplier(&trivial_example(), &small).unwrap();
        assert!((m - 1.0).norm() < 1e-9);
    }

    #[test]
    fn winding_half_open_rule() {
        // Square whose bottom-left vertex lies on the ray from q.
        let sq =
            PathPolyline::new(alloc::vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 1.0), c64(1.0, 1.0)], true).unwrap();
        assert_eq!(winding_number(&sq, c64(1.5, 0.5)).unwrap(), 1);
        assert_eq!(winding_number(&sq, c64(0.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&sq, c64(0.0, 1.0)).unwrap(), 0);
        assert!(winding_number(&sq, c64(1.5, 0.0)).is_err());
        let twice =
            PathPolyline::new((0..32).map(|k| Complex64::from_polar(1.0, 2.0 * TAU * k as f64 / 32.0)).collect(), true)
                .unwrap();
        assert_eq!(winding_number(&twice, c64(0.0, 0.0)).unwrap(), 2);
    }

    #[test]
    fn dual_field_and_classification() {
        let orders = dual_field_orders(&trivial_example()).unwrap();
        assert_eq!(orders.iter().filter(|o| o.1 == FieldPointKind::Zero).count(), 3);
        assert!(orders.contains(&(SpherePoint::Infinity, FieldPointKind::Pole, 1)));
        let theta = ThirdKindDifferential::theta();
        assert_eq!(psi_classify(&theta, &SpherePoint::ZERO).unwrap(), PointKind::Min);
        assert_eq!(psi_classify(&theta, &SpherePoint::Infinity).unwrap(), PointKind::Max);
        assert_eq!(psi_classify(&trivial_example(), &SpherePoint::Infinity).unwrap(), PointKind::Saddle);
        assert_eq!(psi_classify(&theta, &pt(3.0)), Err(Error::OrdinaryPoint));
    }

    #[test]
    fn reconstruction() {
        let f = reconstruct_rational(&trivial_example()).unwrap();
        let expected =
            RationalMap::new(Polynomial::from_real(&[0.0, 0.0, 1.0]), Polynomial::from_real(&[-1.0, 0.0, 1.0]))
                .unwrap();
        assert_eq!(f, expected);
        assert_eq!(reconstruct_rational(&ThirdKindDifferential::theta()).unwrap(), RationalMap::identity());
        assert_eq!(reconstruct_rational(&football()), Err(Error::MonodromyObstruction));
        assert!(is_trivial(&trivial_example()) && !is_trivial(&football()));
        assert!(is_real_part_exact(&football()));
    }
}
