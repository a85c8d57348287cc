//! The invariant suite behind `conemetric verify`.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use conemetric::character::{
    build_metric, differential_divisor, logarithmic_differential, monodromy_multiplier, path_integral,
};
use conemetric::feasibility::{feasibility_search, two_point_check};
use conemetric::frobenius::{
    is_apparent, local_solutions, ode_from_schwarzian, residual, resonance_obstruction, INTEGER_ANGLE_TOLERANCE,
};
use conemetric::pullback::{area_numeric, metric_density, singular_divisor};
use conemetric::schwarzian::{laurent_tail, schwarzian};
use conemetric::{
    c64, Complex64, ConicalDivisor, PathPolyline, PowerSeries, PullbackMetric, RationalMap, SU2Moebius, SpherePoint,
    ThirdKindDifferential,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::input;
use crate::json::{num, object};
use crate::CliError;

const SHIPPED: &[(&str, &str)] = &[
    ("chebyshev3.json", include_str!("../corpus/chebyshev3.json")),
    ("double_cone.json", include_str!("../corpus/double_cone.json")),
    ("football.json", include_str!("../corpus/football.json")),
    ("mixed.json", include_str!("../corpus/mixed.json")),
    ("quartic.json", include_str!("../corpus/quartic.json")),
    ("quotient.json", include_str!("../corpus/quotient.json")),
    ("resonant_q.json", include_str!("../corpus/resonant_q.json")),
    ("scalene.json", include_str!("../corpus/scalene.json")),
    ("segment.json", include_str!("../corpus/segment.json")),
    ("three_halves.json", include_str!("../corpus/three_halves.json")),
    ("trivial.json", include_str!("../corpus/trivial.json")),
    ("unit_loop.json", include_str!("../corpus/unit_loop.json")),
    ("zcube.json", include_str!("../corpus/zcube.json")),
    ("zfourth.json", include_str!("../corpus/zfourth.json")),
    ("zsq.json", include_str!("../corpus/zsq.json")),
];

/// Corpus files sorted by kind; the kind is read off the top-level keys.
#[derive(Default)]
pub struct Corpus {
    pub maps: Vec<(String, RationalMap)>,
    pub omegas: Vec<(String, ThirdKindDifferential)>,
    pub divisors: Vec<(String, ConicalDivisor)>,
    pub series: Vec<(String, PowerSeries)>,
}

impl Corpus {
    fn add(&mut self, name: &str, v: &Value) -> Result<(), CliError> {
        let ctx = |e: CliError| match e {
            CliError::Schema(m) => CliError::Schema(format!("{name}: {m}")),
            other => other,
        };
        if v.get("num").is_some() {
            self.maps.push((name.into(), input::rational_map(v).map_err(ctx)?));
        } else if v.get("poles").is_some() {
            self.omegas.push((name.into(), input::omega(v).map_err(ctx)?));
        } else if v.get("points").is_some() {
            self.divisors.push((name.into(), input::divisor(v).map_err(ctx)?));
        } else if v.get("coeffs").is_some() {
            self.series.push((name.into(), input::series(v).map_err(ctx)?));
        }
        Ok(())
    }

    pub fn shipped() -> Result<Corpus, CliError> {
        let mut c = Corpus::default();
        for (name, text) in SHIPPED {
            let v = serde_json::from_str(text).map_err(|e| CliError::Schema(format!("{name}: {e}")))?;
            c.add(name, &v)?;
        }
        Ok(c)
    }

    /// Every `*.json` file in `dir`, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Corpus, CliError> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| CliError::Schema(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut c = Corpus::default();
        for p in paths {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            c.add(&name, &input::read_json(&p)?)?;
        }
        Ok(c)
    }
}

/// Outcome of one property over the corpus.
struct Property {
    name: &'static str,
    checked: usize,
    max_error: f64,
    failures: Vec<String>,
}

impl Property {
    fn new(name: &'static str) -> Self {
        Property { name, checked: 0, max_error: 0.0, failures: Vec::new() }
    }

    /// Records `error` against `bound`.
    fn check(&mut self, what: impl FnOnce() -> String, error: f64, bound: f64) {
        self.checked += 1;
        if error.is_nan() || error > bound {
            self.failures.push(format!("{}: error {error:e} exceeds {bound:e}", what()));
        }
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        }
    }

    fn require(&mut self, what: impl FnOnce() -> String, ok: bool) {
        self.check(what, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn absorb<T>(&mut self, what: &str, r: conemetric::Result<T>) -> Option<T> {
        r.map_err(|e| {
            self.checked += 1;
            self.failures.push(format!("{what}: {e}"));
        })
        .ok()
    }

    fn to_json(&self) -> Value {
        object([
            ("name", Value::from(self.name)),
            ("pass", Value::Bool(self.failures.is_empty() && self.checked > 0)),
            ("checked", Value::from(self.checked)),
            ("max_error", num(self.max_error)),
            ("failures", Value::Array(self.failures.iter().map(|f| Value::from(f.as_str())).collect())),
        ])
    }
}

fn all_omegas(c: &Corpus) -> Vec<(String, ThirdKindDifferential)> {
    let mut out = c.omegas.clone();
    for (name, f) in &c.maps {
        if let Ok(w) = logarithmic_differential(f) {
            out.push((format!("df/f of {name}"), w));
        }
    }
    out
}

fn residue_theorem(c: &Corpus) -> Property {
    let mut p = Property::new("residue_theorem");
    for (name, w) in all_omegas(c) {
        let total: f64 = w.poles().iter().map(|x| x.1).sum();
        let scale: f64 = w.poles().iter().map(|x| x.1.abs()).sum();
        p.check(|| format!("{name}: residue sum"), total.abs(), 1e-12 * scale);
        let reach = w.finite_poles().map(|(q, _)| q.norm()).fold(0.0, f64::max);
        let circle = PathPolyline::circle(c64(0.0, 0.0), 2.0 * reach + 1.0, 512, 0.1);
        let enclosed: f64 = w.finite_poles().map(|x| x.1).sum();
        if let Some(v) = p.absorb(&name, path_integral(&w, &circle)) {
            let expected = Complex64::new(0.0, TAU * enclosed);
            p.check(|| format!("{name}: large circle"), (v - expected).norm(), 1e-9 * (1.0 + expected.norm()));
        }
    }
    p
}

fn form_degree(c: &Corpus) -> Property {
    let mut p = Property::new("form_degree");
    for (name, w) in all_omegas(c) {
        if let Some(d) = p.absorb(&name, differential_divisor(&w)) {
            p.require(|| format!("{name}: degree {}", d.degree()), d.degree() == -2);
        }
    }
    p
}

fn unitary_monodromy(c: &Corpus) -> Property {
    let mut p = Property::new("unitary_monodromy");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, w) in &c.omegas {
        let mut tried = 0;
        while tried < 20 {
            let centre = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let radius = rng.gen_range(0.2..3.0);
            if w.finite_poles().any(|(q, _)| ((q - centre).norm() - radius).abs() < 0.05) {
                continue;
            }
            tried += 1;
            let enclosed: f64 = w.finite_poles().filter(|(q, _)| (q - centre).norm() < radius).map(|x| x.1).sum();
            let lp = PathPolyline::circle(centre, radius, 128, 0.0);
            if let Some(m) = p.absorb(name, monodromy_multiplier(w, &lp)) {
                let e = (m - Complex64::from_polar(1.0, TAU * enclosed)).norm().max((m.norm() - 1.0).abs());
                p.check(|| format!("{name}: loop at {centre} radius {radius}"), e, 1e-9);
            }
        }
    }
    p
}

fn su2_invariance(c: &Corpus) -> Property {
    let mut p = Property::new("su2_invariance");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gaussian = |rng: &mut ChaCha8Rng| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    for (name, f) in &c.maps {
        for _ in 0..20 {
            let (a, b) = (gaussian(&mut rng), gaussian(&mut rng));
            let Some(l) = p.absorb(name, SU2Moebius::normalized(a, b)) else {
                continue;
            };
            let (Some(m0), Some(m1)) = (
                p.absorb(name, PullbackMetric::new(f.clone())),
                p.absorb(name, PullbackMetric::new(f.su2_compose(&l))),
            ) else {
                continue;
            };
            for _ in 0..5 {
                let z = SpherePoint::Finite(3.0 * gaussian(&mut rng));
                let (x, y) = (metric_density(&m0, &z), metric_density(&m1, &z));
                p.check(|| format!("{name} at {z:?}"), (x - y).abs() / x.abs().max(f64::MIN_POSITIVE), 1e-10);
            }
        }
    }
    p
}

fn gauss_bonnet(c: &Corpus, tol: f64) -> Property {
    let mut p = Property::new("gauss_bonnet");
    for (name, f) in &c.maps {
        let Some(m) = p.absorb(name, PullbackMetric::new(f.clone())) else {
            continue;
        };
        let (Some(area), Some(div)) = (p.absorb(name, area_numeric(&m, tol)), p.absorb(name, singular_divisor(&m)))
        else {
            continue;
        };
        let by_degree = 4.0 * PI * f.degree() as f64;
        p.check(|| format!("{name}: area vs 4π deg"), (area - by_degree).abs() / by_degree, 1e-6);
        let by_divisor = div.gauss_bonnet_area();
        p.check(|| format!("{name}: area vs 2π(2 + deg D)"), (area - by_divisor).abs() / by_divisor, 1e-6);
    }
    for (name, w) in all_omegas(c) {
        if let Some(d) = p.absorb(&name, build_metric(&w)) {
            let gb = d.divisor.gauss_bonnet_area();
            p.check(|| format!("{name}: 2π Σ|r| vs 2π(2 + deg D)"), (d.area - gb).abs() / gb, 1e-12);
        }
    }
    p
}

fn schwarzian_weight(c: &Corpus) -> Property {
    let mut p = Property::new("schwarzian_weight");
    for (name, f) in &c.maps {
        let Some(s) = p.absorb(name, schwarzian(f)) else {
            continue;
        };
        let Some(m) = p.absorb(name, PullbackMetric::new(f.clone())) else {
            continue;
        };
        let Some(div) = p.absorb(name, singular_divisor(&m)) else {
            continue;
        };
        for (pt, alpha) in div.entries() {
            if let Some(t) = p.absorb(name, laurent_tail(&s, pt)) {
                p.check(|| format!("{name} at {pt:?}"), (t.c - (1.0 - alpha * alpha) / 2.0).abs(), 1e-9);
            }
        }
    }
    p
}

fn frobenius_residuals(c: &Corpus, order: usize) -> Property {
    let mut p = Property::new("frobenius_residuals");
    for (name, f) in &c.maps {
        let Some(s) = p.absorb(name, schwarzian(f)) else {
            continue;
        };
        let Some(m) = p.absorb(name, PullbackMetric::new(f.clone())) else {
            continue;
        };
        let Some(div) = p.absorb(name, singular_divisor(&m)) else {
            continue;
        };
        for (pt, alpha) in div.entries() {
            let Some(t) = p.absorb(name, laurent_tail(&s, pt)) else {
                continue;
            };
            let Some(q) = p.absorb(name, ode_from_schwarzian(&t, order)) else {
                continue;
            };
            if let Some((u0, u1)) = p.absorb(name, local_solutions(&q, *alpha, order)) {
                p.check(|| format!("{name} at {pt:?}: residual"), residual(&q, &u0).max(residual(&q, &u1)), 1e-9);
            }
            let k = alpha.round();
            if (alpha - k).abs() < INTEGER_ANGLE_TOLERANCE && k >= 1.0 {
                if let Some(rm) = p.absorb(name, resonance_obstruction(&q, k as usize)) {
                    p.require(
                        || format!("{name} at {pt:?}: R_{k} = {rm} is not negligible"),
                        is_apparent(&q, rm, k as usize),
                    );
                }
            }
        }
    }
    for (name, q) in &c.series {
        let b0 = q.coeff(0).re;
        let alpha = (1.0 - 4.0 * b0).max(0.0).sqrt();
        if let Some((u0, u1)) = p.absorb(name, local_solutions(q, alpha, order)) {
            p.check(|| format!("{name}: residual"), residual(q, &u0).max(residual(q, &u1)), 1e-9);
        }
    }
    p
}

fn feasibility(c: &Corpus) -> Property {
    let mut p = Property::new("feasibility");
    for (a, b) in [(0.5, 0.5), (1.5, 2.5), (0.3, 0.3), (2.5, 0.5), (3.25, 3.25), (0.75, 1.75)] {
        if let Some(v) = p.absorb("two-point", two_point_check(a, b)) {
            p.require(|| format!("two_point_check({a}, {b}) = {v}"), v == (a == b));
        }
    }
    for (name, d) in &c.divisors {
        let found = feasibility_search(d);
        let non_integer = d.entries().iter().filter(|(_, a)| (a - a.round()).abs() > 1e-9).count();
        if non_integer >= 3 {
            p.require(|| format!("{name}: {} assignments for 3+ non-integer angles", found.len()), found.is_empty());
        }
        if d.len() == 2 && d.entries()[0].1 == d.entries()[1].1 {
            p.require(|| format!("{name}: equal two-point divisor infeasible"), !found.is_empty());
        }
    }
    let zsq = RationalMap::polynomial(conemetric::Polynomial::monomial(c64(1.0, 0.0), 2));
    let target = ConicalDivisor::new(vec![(SpherePoint::ZERO, 2.0), (SpherePoint::Infinity, 2.0)]);
    if let (Some(target), Some(w)) = (p.absorb("(2, 2)", target), p.absorb("z^2", logarithmic_differential(&zsq))) {
        p.require(|| "(2, 2) infeasible".into(), !feasibility_search(&target).is_empty());
        if let Some(d) = p.absorb("z^2", build_metric(&w)) {
            p.require(|| "z^2 does not realise (2, 2)".into(), d.divisor.approx_eq(&target, 1e-12, 1e-12));
        }
    }
    p
}

/// Runs every property and reports whether all passed.
pub fn run(c: &Corpus, tol: f64, order: usize) -> (Value, bool) {
    let props = [
        residue_theorem(c),
        form_degree(c),
        unitary_monodromy(c),
        su2_invariance(c),
        gauss_bonnet(c, tol),
        schwarzian_weight(c),
        frobenius_residuals(c, order),
        feasibility(c),
    ];
    let pass = props.iter().all(|p| p.failures.is_empty() && p.checked > 0);
    let report = object([
        ("maps", Value::from(c.maps.len())),
        ("forms", Value::from(c.omegas.len())),
        ("divisors", Value::from(c.divisors.len())),
        ("series", Value::from(c.series.len())),
        ("properties", Value::Array(props.iter().map(Property::to_json).collect())),
        ("pass", Value::Bool(pass)),
    ]);
    (report, pass)
}
