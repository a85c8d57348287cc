mod common;

use std::f64::consts::TAU;

use common::{corpus, random_complex, rng};
use conemetric::pullback::singular_divisor;
use conemetric::schwarzian::{angle_to_weight, laurent_tail, schwarzian, schwarzian_at, weight_to_angle};
use conemetric::{c64, Complex64, Moebius, PullbackMetric, RationalMap, SpherePoint};
use proptest::prelude::*;

const NODES: usize = 96;

/// `k!/(2πi) ∮ g(z)/(z - z0)^{k+1} dz` on a circle, for k = 1, 2, 3.
fn cauchy_derivatives(g: &dyn Fn(Complex64) -> Complex64, z0: Complex64, rho: f64) -> [Complex64; 3] {
    let mut d = [Complex64::default(); 3];
    for j in 0..NODES {
        let e = Complex64::from_polar(1.0, TAU * j as f64 / NODES as f64);
        let v = g(z0 + rho * e);
        for (k, dk) in d.iter_mut().enumerate() {
            *dk += v * e.powi(-(k as i32 + 1));
        }
    }
    let fact = [1.0, 2.0, 6.0];
    let mut out = [Complex64::default(); 3];
    for k in 0..3 {
        out[k] = d[k] * fact[k] / (NODES as f64 * rho.powi(k as i32 + 1));
    }
    out
}

fn schwarzian_oracle(g: &dyn Fn(Complex64) -> Complex64, z: Complex64, rho: f64) -> Complex64 {
    let [d1, d2, d3] = cauchy_derivatives(g, z, rho);
    d3 / d1 - 1.5 * (d2 / d1).powi(2)
}

/// `(c, d)` from `c = (1/2πi)∮ S (z-p) dz` and `d = (1/2πi)∮ S dz`.
fn tail_oracle(g: &dyn Fn(Complex64) -> Complex64, p: Complex64, radius: f64) -> (Complex64, Complex64) {
    let (mut c, mut d) = (Complex64::default(), Complex64::default());
    for j in 0..NODES {
        let e = Complex64::from_polar(1.0, TAU * j as f64 / NODES as f64);
        let s = schwarzian_oracle(g, p + radius * e, 0.5 * radius);
        c += s * (radius * e).powi(2);
        d += s * radius * e;
    }
    (c / NODES as f64, d / NODES as f64)
}

/// Distance from `p` to the nearest other finite critical point or pole.
fn clearance(f: &RationalMap, p: Complex64) -> f64 {
    let mut features: Vec<Complex64> = common::companion_roots(f.den());
    if f.critical_numerator().deg() > 0 {
        features.extend(common::companion_roots(&f.critical_numerator()));
    }
    features.iter().map(|q| (q - p).norm()).filter(|&d| d > 1e-6).fold(4.0, f64::min)
}

#[test]
fn weights_at_cone_points_match_the_angles() {
    for (name, f) in corpus() {
        let s = schwarzian(&f).unwrap();
        let div = singular_divisor(&PullbackMetric::new(f.clone()).unwrap()).unwrap();
        for (p, alpha) in div.entries() {
            let tail = laurent_tail(&s, p).unwrap();
            assert!((tail.c - (1.0 - alpha * alpha) / 2.0).abs() < 1e-9, "{name} at {p:?}: {}", tail.c);
            assert!((tail.alpha().unwrap() - alpha).abs() < 1e-9);
        }
    }
}

#[test]
fn tails_match_contour_integrals() {
    for (name, f) in corpus() {
        if f.degree() < 2 {
            continue;
        }
        let s = schwarzian(&f).unwrap();
        let div = singular_divisor(&PullbackMetric::new(f.clone()).unwrap()).unwrap();
        for (p, _) in div.entries() {
            let tail = laurent_tail(&s, p).unwrap();
            let (c, d) = match p.finite() {
                Some(z) => {
                    let g = |w: Complex64| f.eval_complex(w);
                    tail_oracle(&g, z, 0.4 * clearance(&f, z))
                }
                None => {
                    let g = |w: Complex64| f.eval_complex(w.inv());
                    tail_oracle(&g, c64(0.0, 0.0), 0.05)
                }
            };
            assert!((c.re - tail.c).abs() < 1e-6 && c.im.abs() < 1e-6, "{name} at {p:?}: c {c} vs {}", tail.c);
            assert!((d - tail.d).norm() < 1e-6, "{name} at {p:?}: d {d} vs {}", tail.d);
        }
    }
}

#[test]
fn schwarzian_values_match_the_cauchy_oracle() {
    let mut r = rng(5);
    for (name, f) in corpus() {
        let s = schwarzian(&f).unwrap();
        for _ in 0..10 {
            let z = random_complex(&mut r, 2.0);
            let rho = 0.3 * clearance(&f, z).min(1.0);
            if rho < 0.02 {
                continue;
            }
            let g = |w: Complex64| f.eval_complex(w);
            let expected = schwarzian_oracle(&g, z, rho);
            let got = s.eval_complex(z);
            assert!((got - expected).norm() < 1e-7 * (1.0 + expected.norm()), "{name} at {z}: {got} vs {expected}");
            let direct = schwarzian_at(&f, z).unwrap();
            assert!((direct - got).norm() < 1e-9 * (1.0 + got.norm()));
        }
    }
}

#[test]
fn regular_points_have_zero_tail() {
    let f = common::map(&[0.0, 0.0, 1.0], &[-1.0, 0.0, 1.0]);
    let s = schwarzian(&f).unwrap();
    let tail = laurent_tail(&s, &SpherePoint::new(0.3, 0.7)).unwrap();
    assert_eq!(tail.c, 0.0);
    assert_eq!(tail.d, c64(0.0, 0.0));
}

#[test]
fn weight_and_angle_are_inverse() {
    for alpha in [0.5, 1.5, 2.0, 3.0, 7.25] {
        assert!((weight_to_angle(angle_to_weight(alpha)).unwrap() - alpha).abs() < 1e-12);
    }
}

fn moebius() -> impl Strategy<Value = Moebius> {
    prop::array::uniform8(-2.0..2.0f64)
        .prop_filter_map("degenerate", |v| {
            Moebius::new(c64(v[0], v[1]), c64(v[2], v[3]), c64(v[4], v[5]), c64(v[6], v[7])).ok()
        })
        .prop_filter("well conditioned", |m| (m.a * m.d - m.b * m.c).norm() > 0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moebius_maps_have_zero_schwarzian(m in moebius()) {
        let s = schwarzian(&RationalMap::moebius(&m)).unwrap();
        prop_assert!(s.is_zero());
    }

    #[test]
    fn post_composition_leaves_the_schwarzian_unchanged(m in moebius(), k in 0usize..9) {
        let f = corpus().swap_remove(k).1;
        let a = schwarzian(&f).unwrap();
        let b = schwarzian(&f.post_compose(&m)).unwrap();
        for z in [c64(0.37, 0.21), c64(-1.3, 0.8), c64(2.2, -1.9)] {
            let (x, y) = (a.eval_complex(z), b.eval_complex(z));
            prop_assert!((x - y).norm() < 1e-8 * (1.0 + x.norm()), "{x} vs {y}");
        }
    }
}
