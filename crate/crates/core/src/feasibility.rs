//! Which cone divisors can carry the zero/residue pattern of a character 1-form.
//!
//! A non-integer cone point must be a pole of `ω` with residue `±α`. An
//! integer cone point is either a zero of order `α - 1` (a saddle of `Ψ`) or
//! such a pole. Smooth extrema add poles of residue `±1`. On the sphere the
//! number of poles is `Σ zero orders + 2` and the residues sum to zero; these
//! two identities are the whole test.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{CheckedAdd, Float, One, Zero};

use crate::character::{build_metric, ThirdKindDifferential};
use crate::poly::Polynomial;
use crate::pullback::ConicalDivisor;
use crate::sphere::SpherePoint;
use crate::{Error, Result};

/// Angles closer than this to an integer are integer angles.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

/// Largest denominator tried when reading an angle as a fraction.
const MAX_DENOMINATOR: i64 = 10_000;

/// What a cone point is for `ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointRole {
    /// A zero of `ω` of the given order.
    Saddle { order: usize },
    /// A pole of `ω` with residue `±α`.
    Extremum { residue: f64 },
}

/// One admissible role pattern together with the smooth poles it needs.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityAssignment {
    pub roles: Vec<(SpherePoint, PointRole)>,
    /// Smooth poles with residue `+1`.
    pub smooth_positive: usize,
    /// Smooth poles with residue `-1`.
    pub smooth_negative: usize,
}

impl FeasibilityAssignment {
    pub fn smooth_poles(&self) -> usize {
        self.smooth_positive + self.smooth_negative
    }

    /// `Σ zero orders - #poles`, which must be -2.
    pub fn form_degree(&self) -> i64 {
        let zeros: i64 = self
            .roles
            .iter()
            .map(|(_, r)| match r {
                PointRole::Saddle { order } => *order as i64,
                PointRole::Extremum { .. } => 0,
            })
            .sum();
        let poles = self.roles.iter().filter(|(_, r)| matches!(r, PointRole::Extremum { .. })).count();
        zeros - (poles + self.smooth_poles()) as i64
    }

    /// Sum of all residues, smooth poles included.
    pub fn residue_sum(&self) -> f64 {
        let extremal: f64 = self
            .roles
            .iter()
            .filter_map(|(_, r)| match r {
                PointRole::Extremum { residue } => Some(*residue),
                PointRole::Saddle { .. } => None,
            })
            .sum();
        extremal + self.smooth_positive as f64 - self.smooth_negative as f64
    }
}

/// Continued-fraction reading of `x` as `p/q` with `q <= MAX_DENOMINATOR`,
/// accepted only if it reproduces `x` to rounding.
fn as_fraction(x: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= 1e-14 * x.abs().max(1.0) {
            return Some(Ratio::new(h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Exact when every residue is a small fraction, floating point otherwise.
#[derive(Clone, Copy, Debug)]
enum Sum {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Sum {
    fn add(self, x: f64) -> Sum {
        match self {
            Sum::Exact(s) => match as_fraction(x).and_then(|q| s.checked_add(&q)) {
                Some(t) => Sum::Exact(t),
                None => Sum::Float(ratio_to_f64(s) + x),
            },
            Sum::Float(s) => Sum::Float(s + x),
        }
    }

    /// The sum as an integer, if it is one.
    fn as_integer(self) -> Option<i64> {
        match self {
            Sum::Exact(s) => s.is_integer().then(|| s.to_integer()),
            Sum::Float(s) => ((s - s.round()).abs() <= INTEGER_TOLERANCE).then(|| s.round() as i64),
        }
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn integer_angle(alpha: f64) -> Option<usize> {
    let r = alpha.round();
    ((alpha - r).abs() <= INTEGER_TOLERANCE && r >= 2.0).then(|| r as usize)
}

fn role_options(alpha: f64) -> Vec<PointRole> {
    let mut out = Vec::with_capacity(3);
    if let Some(m) = integer_angle(alpha) {
        out.push(PointRole::Saddle { order: m - 1 });
        let a = m as f64;
        out.push(PointRole::Extremum { residue: a });
        out.push(PointRole::Extremum { residue: -a });
    } else {
        out.push(PointRole::Extremum { residue: alpha });
        out.push(PointRole::Extremum { residue: -alpha });
    }
    out
}

/// Every role/sign pattern for the points of `d` satisfying the degree
/// identity and the residue theorem, in lexicographic order of role choices
/// (saddle, positive pole, negative pole).
pub fn feasibility_search(d: &ConicalDivisor) -> Vec<FeasibilityAssignment> {
    let options: Vec<Vec<PointRole>> = d.entries().iter().map(|&(_, a)| role_options(a)).collect();
    let mut out = Vec::new();
    let mut choice = alloc::vec![0usize; options.len()];
    loop {
        let roles: Vec<(SpherePoint, PointRole)> =
            d.entries().iter().zip(&choice).zip(&options).map(|((&(p, _), &c), o)| (p, o[c])).collect();
        if let Some(a) = complete(roles) {
            out.push(a);
        }
        // Odometer increment, last point fastest.
        let mut i = options.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Fixes the smooth poles for a role pattern, if any choice works.
fn complete(roles: Vec<(SpherePoint, PointRole)>) -> Option<FeasibilityAssignment> {
    let mut zeros = 0i64;
    let mut extremal = 0i64;
    let mut sum = Sum::Exact(Ratio::zero());
    for (_, r) in &roles {
        match *r {
            PointRole::Saddle { order } => zeros += order as i64,
            PointRole::Extremum { residue } => {
                extremal += 1;
                sum = sum.add(residue);
            }
        }
    }
    let s = zeros + 2 - extremal;
    if s < 0 {
        return None;
    }
    // Smooth residues must cancel the rest: s_plus - s_minus = -sum.
    let t = -sum.as_integer()?;
    if t.abs() > s || (s - t) % 2 != 0 {
        return None;
    }
    Some(FeasibilityAssignment {
        roles,
        smooth_positive: ((s + t) / 2) as usize,
        smooth_negative: ((s - t) / 2) as usize,
    })
}

/// Whether two cone points of angles `2πα` and `2πβ` admit a pattern.
pub fn two_point_check(alpha: f64, beta: f64) -> Result<bool> {
    let d = ConicalDivisor::new(alloc::vec![(SpherePoint::ZERO, alpha), (SpherePoint::Infinity, beta)])?;
    Ok(!feasibility_search(&d).is_empty())
}

/// A concrete differential realising an assignment, with the divisor its
/// metric is expected to have.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub omega: ThirdKindDifferential,
    /// Cone points at their instantiated positions.
    pub expected: ConicalDivisor,
    /// Position of each divisor point, in assignment order.
    pub positions: Vec<SpherePoint>,
}

/// Chooses pole and zero positions for an assignment by minimum-norm
/// Newton iteration on the numerator coefficients of `ω`: the numerator
/// `Σ r_k Π_{j≠k} (z - q_j)` must equal `Π (z - ζ_i)^{o_i}`. Scaling fixes
/// the leading coefficient at 1 and translation pins the first zero at 0;
/// all poles move.
///
/// Returns `NotConverged` when no start leads to a valid configuration,
/// which happens for patterns that pass the counting test but are not
/// realisable.
pub fn instantiate(a: &FeasibilityAssignment) -> Result<Instance> {
    let orders: Vec<usize> = a
        .roles
        .iter()
        .filter_map(|(_, r)| match r {
            PointRole::Saddle { order } => Some(*order),
            _ => None,
        })
        .collect();
    let mut residues: Vec<f64> = a
        .roles
        .iter()
        .filter_map(|(_, r)| match r {
            PointRole::Extremum { residue } => Some(*residue),
            _ => None,
        })
        .collect();
    residues.extend(core::iter::repeat(1.0).take(a.smooth_positive));
    residues.extend(core::iter::repeat(-1.0).take(a.smooth_negative));
    if residues.len() < 2 {
        return Err(Error::InvalidArgument("assignment has fewer than two poles".into()));
    }
    let problem = Problem { residues, orders };
    let mut best = f64::INFINITY;
    for attempt in 0..400 {
        let mut state = problem.start(attempt);
        let Some(res) = problem.newton(&mut state) else { continue };
        best = best.min(res);
        if let Some(inst) = validate(a, &problem, &state) {
            return Ok(inst);
        }
    }
    Err(Error::NotConverged { what: "instantiation", estimate: best, error_bound: 1e-10 })
}

struct Problem {
    residues: Vec<f64>,
    orders: Vec<usize>,
}

#[derive(Clone)]
struct State {
    q: Vec<Complex64>,
    zeta: Vec<Complex64>,
}

impl Problem {
    fn start(&self, attempt: usize) -> State {
        let n = self.residues.len();
        let spiral = |j: usize, r0: f64| {
            let t = (attempt * 7 + j) as f64;
            Complex64::from_polar(r0 + 0.2 * j as f64 + 0.03 * attempt as f64, 2.399_963 * t + 0.4 * attempt as f64)
        };
        let q = (0..n).map(|j| spiral(j, 0.8)).collect();
        let zeta =
            (0..self.orders.len()).map(|i| if i == 0 { Complex64::zero() } else { spiral(i + n, 0.5) }).collect();
        State { q, zeta }
    }

    fn target(&self, zeta: &[Complex64]) -> Polynomial {
        Polynomial::from_roots(
            &zeta.iter().copied().zip(self.orders.iter().copied()).collect::<Vec<_>>(),
            Complex64::one(),
        )
    }

    fn system(&self, s: &State) -> Vec<Complex64> {
        let t = self.target(&s.zeta);
        numerator(&self.residues, &s.q).iter().enumerate().map(|(i, c)| c - t.coeff(i)).collect()
    }

    /// Unknowns: `q_0..q_{n-1}` and `ζ_1..ζ_{k-1}`.
    fn unknowns(&self) -> usize {
        self.residues.len() + self.orders.len().saturating_sub(1)
    }

    fn jacobian(&self, s: &State) -> Vec<Vec<Complex64>> {
        let n = self.residues.len();
        let cols = self.unknowns();
        let mut jac = alloc::vec![alloc::vec![Complex64::zero(); cols]; n - 1];
        let mut q = s.q.clone();
        // The numerator is affine in each q_m, so columns are exact differences.
        for m in 0..n {
            q[m] = Complex64::one();
            let hi = numerator(&self.residues, &q);
            q[m] = Complex64::zero();
            let lo = numerator(&self.residues, &q);
            q[m] = s.q[m];
            for i in 0..n - 1 {
                jac[i][m] = hi[i] - lo[i];
            }
        }
        // d/dζ_i of -Π (z - ζ)^o is o_i Π(z - ζ)^o / (z - ζ_i).
        for i in 1..self.orders.len() {
            let mut reduced: Vec<(Complex64, usize)> =
                s.zeta.iter().copied().zip(self.orders.iter().copied()).collect();
            reduced[i].1 -= 1;
            let d = Polynomial::from_roots(&reduced, Complex64::new(self.orders[i] as f64, 0.0));
            for r in 0..n - 1 {
                jac[r][n + i - 1] = d.coeff(r);
            }
        }
        debug_assert_eq!(cols, n + self.orders.len().saturating_sub(1));
        jac
    }

    fn apply(&self, s: &State, step: &[Complex64], lambda: f64) -> State {
        let n = self.residues.len();
        let mut t = s.clone();
        for m in 0..n {
            t.q[m] += step[m] * lambda;
        }
        for i in 1..self.orders.len() {
            t.zeta[i] += step[n + i - 1] * lambda;
        }
        t
    }

    /// Damped minimum-norm Newton. Returns the final residual norm.
    fn newton(&self, s: &mut State) -> Option<f64> {
        let norm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut f = self.system(s);
        let mut fnorm = norm(&f);
        for _ in 0..200 {
            if fnorm <= 1e-14 {
                break;
            }
            let jac = self.jacobian(s);
            // step = J^H (J J^H)^{-1} (-F)
            let rows = jac.len();
            let cols = jac[0].len();
            let mut gram = alloc::vec![alloc::vec![Complex64::zero(); rows]; rows];
            for i in 0..rows {
                for j in 0..rows {
                    gram[i][j] = (0..cols).map(|c| jac[i][c] * jac[j][c].conj()).sum();
                }
            }
            let y = solve(gram, f.iter().map(|c| -c).collect())?;
            let step: Vec<Complex64> = (0..cols).map(|c| (0..rows).map(|r| jac[r][c].conj() * y[r]).sum()).collect();
            let mut lambda = 1.0;
            loop {
                let trial = self.apply(s, &step, lambda);
                let ft = self.system(&trial);
                let tn = norm(&ft);
                if tn < fnorm || lambda < 1e-4 {
                    *s = trial;
                    f = ft;
                    fnorm = tn;
                    break;
                }
                lambda *= 0.5;
            }
            let blown = |x: &Complex64| !(x.re.is_finite() && x.im.is_finite()) || x.norm() > 1e4;
            if s.q.iter().chain(&s.zeta).any(blown) {
                return None;
            }
        }
        (fnorm <= 1e-10).then_some(fnorm)
    }
}

/// Numerator `Σ r_k Π_{j≠k} (z - q_j)`, as coefficients `0..=n-2`.
fn numerator(residues: &[f64], q: &[Complex64]) -> Vec<Complex64> {
    let n = q.len();
    let mut acc = alloc::vec![Complex64::zero(); n];
    for k in 0..n {
        let mut term = alloc::vec![Complex64::zero(); n];
        term[0] = Complex64::new(residues[k], 0.0);
        let mut deg = 0;
        for (j, &qj) in q.iter().enumerate() {
            if j == k {
                continue;
            }
            // term *= (z - qj)
            for i in (0..=deg).rev() {
                let c = term[i];
                term[i + 1] += c;
                term[i] = -c * qj;
            }
            deg += 1;
        }
        for i in 0..n {
            acc[i] += term[i];
        }
    }
    acc.truncate(n - 1);
    acc
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = alloc::vec![Complex64::zero(); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn validate(a: &FeasibilityAssignment, problem: &Problem, s: &State) -> Option<Instance> {
    let separated = |x: Complex64, y: Complex64| (x - y).norm() > 1e-4;
    let all: Vec<Complex64> = s.q.iter().chain(&s.zeta).copied().collect();
    for i in 0..all.len() {
        if all[..i].iter().any(|&p| !separated(p, all[i])) {
            return None;
        }
    }
    let omega = ThirdKindDifferential::new(
        s.q.iter().zip(&problem.residues).map(|(&p, &r)| (SpherePoint::Finite(p), r)).collect(),
    )
    .ok()?;
    let mut positions = Vec::with_capacity(a.roles.len());
    let mut entries = Vec::new();
    let (mut next_pole, mut next_zero) = (0, 0);
    for (_, role) in &a.roles {
        match role {
            PointRole::Saddle { order } => {
                let p = SpherePoint::Finite(s.zeta[next_zero]);
                entries.push((p, (*order + 1) as f64));
                positions.push(p);
                next_zero += 1;
            }
            PointRole::Extremum { residue } => {
                let p = SpherePoint::Finite(s.q[next_pole]);
                if (residue.abs() - 1.0).abs() > INTEGER_TOLERANCE {
                    entries.push((p, residue.abs()));
                }
                positions.push(p);
                next_pole += 1;
            }
        }
    }
    let expected = ConicalDivisor::new(entries).ok()?;
    let got = build_metric(&omega).ok()?;
    got.divisor.approx_eq(&expected, 1e-6, 1e-9).then_some(Instance { omega, expected, positions })
}
