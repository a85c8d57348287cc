//! Rational self-maps of the Riemann sphere.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::One;

use crate::poly::{approximate_gcd, Polynomial};
use crate::roots::GCD_TOLERANCE;
use crate::series;
use crate::sphere::{Moebius, SU2Moebius, SpherePoint};
use crate::{Error, Result};

/// Relative size below which a Taylor coefficient counts as zero when
/// reading off local orders.
pub const LOCAL_ORDER_TOLERANCE: f64 = 1e-8;

/// `num / den` in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

/// Taylor coefficients of `f` or of `1/f` around a point, whichever is finite.
#[derive(Clone, Debug)]
pub struct LocalSeries {
    /// `true` when `coeffs` expands `1/f`.
    pub inverted: bool,
    pub coeffs: Vec<Complex64>,
}

impl RationalMap {
    /// Builds `num / den`, cancelling any approximate common factor.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalMap { num, den: Polynomial::one() });
        }
        let g = approximate_gcd(&num, &den, GCD_TOLERANCE);
        let (num, den) = if g.deg() > 0 { (num.div_rem(&g).0, den.div_rem(&g).0) } else { (num, den) };
        Ok(Self::normalized(num, den))
    }

    /// Skips the GCD step; for callers that build coprime parts by construction.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalMap { num, den: Polynomial::one() };
        }
        Self::normalized(num, den)
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        let s = den.leading().inv();
        RationalMap { num: num.scale(s), den: den.scale(s) }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::from_coprime(p, Polynomial::one())
    }

    /// The identity map `z`.
    pub fn identity() -> Self {
        Self::polynomial(Polynomial::monomial(Complex64::one(), 1))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    /// The map `(a z + b) / (c z + d)`.
    pub fn moebius(m: &Moebius) -> Self {
        Self::from_coprime(Polynomial::new(alloc::vec![m.b, m.a]), Polynomial::new(alloc::vec![m.d, m.c]))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// `max(deg num, deg den)`; zero for constants.
    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Chart-aware evaluation: poles map to `Infinity` and `Infinity` is
    /// evaluated in the `w = 1/z` chart.
    pub fn eval(&self, p: &SpherePoint) -> Result<SpherePoint> {
        match *p {
            SpherePoint::Infinity => self.in_infinity_chart().eval(&SpherePoint::ZERO),
            SpherePoint::Finite(z) => {
                let n = self.num.eval(z);
                let d = self.den.eval(z);
                let dscale = self.den.eval_scale(z);
                let nscale = self.num.eval_scale(z);
                if d.norm() <= 1e-15 * dscale {
                    if n.norm() <= 1e-15 * nscale {
                        return Err(Error::Internal("0/0 in reduced rational map".into()));
                    }
                    return Ok(SpherePoint::Infinity);
                }
                Ok(SpherePoint::from_complex(n / d))
            }
        }
    }

    /// Plain evaluation at a finite point; may return a non-finite value at poles.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `z ↦ f(1/z)`, i.e. `f` read in the source chart at infinity.
    pub fn in_infinity_chart(&self) -> RationalMap {
        let d = self.degree();
        Self::from_coprime(self.num.reversed(d), self.den.reversed(d))
    }

    /// `1/f`, i.e. `f` read in the target chart at infinity.
    pub fn reciprocal(&self) -> Result<RationalMap> {
        if self.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    /// `N' D - N D'`, whose roots are the finite critical points (including
    /// multiple poles).
    ///
    /// By Riemann–Hurwitz its degree is exactly `2d - 1 - k`, with `k` the
    /// local degree at infinity; coefficients above that cancel in exact
    /// arithmetic and are dropped rather than left as rounding noise.
    pub fn critical_numerator(&self) -> Polynomial {
        let w = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = self.degree();
        if d == 0 {
            return w;
        }
        let exact = (2 * d - 1).saturating_sub(self.local_degree(&SpherePoint::Infinity));
        let mut coeffs = w.into_coeffs();
        coeffs.truncate(exact + 1);
        Polynomial::new(coeffs)
    }

    /// Quotient-rule derivative in lowest terms.
    pub fn derivative(&self) -> RationalMap {
        if self.den.deg() == 0 {
            return Self::from_coprime(self.num.derivative().scale(self.den.coeff(0).inv()), Polynomial::one());
        }
        let dd = self.den.derivative();
        // D = E D0, D' = E G with E = gcd(D, D'); f' = (N' D0 - N G) / (D D0).
        let e = approximate_gcd(&self.den, &dd, GCD_TOLERANCE);
        let d0 = self.den.div_rem(&e).0;
        let g = dd.div_rem(&e).0;
        let num = &(&self.num.derivative() * &d0) - &(&self.num * &g);
        let den = &self.den * &d0;
        Self::new(num, den).expect("denominator is nonzero")
    }

    /// `M ∘ f` for a general fractional linear map.
    pub fn post_compose(&self, m: &Moebius) -> RationalMap {
        let num = &self.num.scale(m.a) + &self.den.scale(m.b);
        let den = &self.num.scale(m.c) + &self.den.scale(m.d);
        Self::from_coprime(num, den)
    }

    /// `L ∘ f` for an isometry `L` of the round sphere.
    pub fn su2_compose(&self, l: &SU2Moebius) -> RationalMap {
        self.post_compose(&l.as_moebius())
    }

    /// `f ∘ h` for a fractional linear `h`.
    pub fn pre_compose(&self, h: &Moebius) -> RationalMap {
        let d = self.degree();
        let top = Polynomial::new(alloc::vec![h.b, h.a]);
        let bottom = Polynomial::new(alloc::vec![h.d, h.c]);
        let homogenize = |p: &Polynomial| {
            let mut acc = Polynomial::zero();
            for (k, &c) in p.coeffs().iter().enumerate() {
                let term = &top.pow(k) * &bottom.pow(d - k);
                acc = &acc + &term.scale(c);
            }
            acc
        };
        Self::new(homogenize(&self.num), homogenize(&self.den)).expect("nonzero denominator")
    }

    /// Taylor coefficients of `f(z0 + x)`, or `None` at a pole.
    pub fn taylor(&self, z0: Complex64, len: usize) -> Option<Vec<Complex64>> {
        let dn = self.den.taylor_shift(z0);
        if dn.coeff(0).norm() <= 1e-15 * self.den.eval_scale(z0) {
            return None;
        }
        Some(series::div(self.num.taylor_shift(z0).coeffs(), dn.coeffs(), len))
    }

    /// Expansion of `f` or `1/f` at `z0`, choosing the one that is at most 1 in modulus.
    pub fn local_series(&self, z0: Complex64, len: usize) -> LocalSeries {
        let n0 = self.num.eval(z0);
        let d0 = self.den.eval(z0);
        let nn = self.num.taylor_shift(z0);
        let dn = self.den.taylor_shift(z0);
        if n0.norm() <= d0.norm() {
            LocalSeries { inverted: false, coeffs: series::div(nn.coeffs(), dn.coeffs(), len) }
        } else {
            LocalSeries { inverted: true, coeffs: series::div(dn.coeffs(), nn.coeffs(), len) }
        }
    }

    /// Local degree of `f` at `p`: the order of the pole, or the order of
    /// vanishing of `f - f(p)`.
    pub fn local_degree(&self, p: &SpherePoint) -> usize {
        let z = match *p {
            SpherePoint::Infinity => return self.in_infinity_chart().local_degree(&SpherePoint::ZERO),
            SpherePoint::Finite(z) => z,
        };
        let nn = self.num.taylor_shift(z);
        let dn = self.den.taylor_shift(z);
        let n_abs = self.num.shift_scales(z.norm());
        let d_abs = self.den.shift_scales(z.norm());
        if dn.coeff(0).norm() <= LOCAL_ORDER_TOLERANCE * d_abs[0] {
            return leading_negligible(&dn, &d_abs);
        }
        let v = nn.coeff(0) / dn.coeff(0);
        let h = &nn - &dn.scale(v);
        let len = n_abs.len().max(d_abs.len());
        let scales: Vec<f64> = (0..len)
            .map(|k| n_abs.get(k).copied().unwrap_or(0.0) + v.norm() * d_abs.get(k).copied().unwrap_or(0.0))
            .collect();
        leading_negligible(&h, &scales)
    }
}

fn leading_negligible(h: &Polynomial, scales: &[f64]) -> usize {
    let mut k = 0;
    while k < scales.len() && h.coeff(k).norm() <= LOCAL_ORDER_TOLERANCE * scales[k] {
        k += 1;
    }
    k
}
