#![allow(dead_code)]

use conemetric::{c64, Complex64, Polynomial, PullbackMetric, RationalMap, SU2Moebius};
use nalgebra::{DMatrix, Schur};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn map(num: &[f64], den: &[f64]) -> RationalMap {
    RationalMap::new(Polynomial::from_real(num), Polynomial::from_real(den)).unwrap()
}

pub fn metric(num: &[f64], den: &[f64]) -> PullbackMetric {
    PullbackMetric::new(map(num, den)).unwrap()
}

/// Rational maps of degree at most four used across the tests.
pub fn corpus() -> Vec<(&'static str, RationalMap)> {
    vec![
        ("z", map(&[0.0, 1.0], &[1.0])),
        ("z^2", map(&[0.0, 0.0, 1.0], &[1.0])),
        ("z^3", map(&[0.0, 0.0, 0.0, 1.0], &[1.0])),
        ("z^4", map(&[0.0, 0.0, 0.0, 0.0, 1.0], &[1.0])),
        ("z^2/(z^2-1)", map(&[0.0, 0.0, 1.0], &[-1.0, 0.0, 1.0])),
        ("(z^3-3z)/2", map(&[0.0, -1.5, 0.0, 0.5], &[1.0])),
        ("(z^2+1)/(z-2)", map(&[1.0, 0.0, 1.0], &[-2.0, 1.0])),
        ("(z^3+2)/(z^2+z+3)", map(&[2.0, 0.0, 0.0, 1.0], &[3.0, 1.0, 1.0])),
        (
            "(z^4-z)/(2z^2+i)",
            RationalMap::new(
                Polynomial::from_real(&[0.0, -1.0, 0.0, 0.0, 1.0]),
                Polynomial::new(vec![c64(0.0, 1.0), c64(0.0, 0.0), c64(2.0, 0.0)]),
            )
            .unwrap(),
        ),
    ]
}

pub fn random_complex<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    c64(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

pub fn random_su2<R: Rng>(rng: &mut R) -> SU2Moebius {
    loop {
        let a = random_complex(rng, 1.0);
        let b = random_complex(rng, 1.0);
        if a.norm() + b.norm() > 0.1 {
            return SU2Moebius::normalized(a, b).unwrap();
        }
    }
}

/// Roots from nalgebra's real Schur decomposition. A complex polynomial is
/// handled through the real `2n x 2n` embedding of its companion matrix,
/// whose spectrum is the roots together with their conjugates; the `n`
/// candidates with the smallest relative residual are kept. The unshifted
/// QR iteration can stall on defective matrices, so on failure the roots of
/// a translate `p(z + s)` are computed instead.
pub fn companion_roots(p: &Polynomial) -> Vec<Complex64> {
    match p.deg() {
        0 => return Vec::new(),
        1 => return vec![-p.coeff(0) / p.coeff(1)],
        _ => {}
    }
    for shift in [0.0, 0.3141, -0.2718, 0.5772] {
        let s = c64(shift, 0.0);
        if let Some(eig) = companion_eigenvalues(&p.taylor_shift(s)) {
            let mut eig: Vec<Complex64> = eig.into_iter().map(|z| z + s).collect();
            if eig.len() > p.deg() {
                let rel = |z: &Complex64| p.eval(*z).norm() / p.eval_scale(*z).max(1e-300);
                eig.sort_by(|a, b| rel(a).total_cmp(&rel(b)));
                eig.truncate(p.deg());
            }
            return eig;
        }
    }
    panic!("Schur iteration did not converge for {p:?}");
}

fn companion_eigenvalues(p: &Polynomial) -> Option<Vec<Complex64>> {
    let n = p.deg();
    let lead = p.leading();
    let c: Vec<Complex64> = (0..n).map(|i| -p.coeff(i) / lead).collect();
    let real = c.iter().all(|z| z.im == 0.0);
    let size = if real { n } else { 2 * n };
    let mut m = DMatrix::<f64>::zeros(size, size);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
        if !real {
            m[(n + i, n + i - 1)] = 1.0;
        }
    }
    for i in 0..n {
        m[(i, n - 1)] = c[i].re;
        if !real {
            m[(n + i, 2 * n - 1)] = c[i].re;
            m[(i, 2 * n - 1)] = -c[i].im;
            m[(n + i, n - 1)] = c[i].im;
        }
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().map(|z| c64(z.re, z.im)).collect())
}

/// Groups nearby values and counts them.
pub fn cluster(values: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &v in values {
        match out.iter_mut().find(|(c, _)| (*c - v).norm() < radius) {
            Some(entry) => entry.1 += 1,
            None => out.push((v, 1)),
        }
    }
    out
}
