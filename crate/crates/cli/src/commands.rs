use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use conemetric::character::{
    build_metric, develop, monodromy_multiplier, path_integral, psi_value, reconstruct_rational, winding_number,
};
use conemetric::cusp::{cusp_limit_check_log, indicator_curve_log};
use conemetric::feasibility::{feasibility_search, PointRole};
use conemetric::frobenius::{
    indicial_roots, is_apparent, local_solutions, ratio_normal_form, residual, resonance_obstruction, NormalFormKind,
    INTEGER_ANGLE_TOLERANCE,
};
use conemetric::pullback::{area_expected, area_numeric, curvature_numeric, metric_density, singular_divisor};
use conemetric::schwarzian::{laurent_tail, schwarzian};
use conemetric::{c64, chordal_distance, ConformalFactor, FrobeniusSolution, Preset, PullbackMetric, SpherePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::input;
use crate::json::{self, complex, complexes, num, object, point};
use crate::CliError;

/// Half-width of the square `[-e, e]^2` sampled by `analyze --grid`.
pub const GRID_EXTENT: f64 = 2.0;
/// Curvature spot-checks reported by `analyze`.
pub const CURVATURE_SAMPLES: usize = 8;
/// Stencil step for the curvature spot-checks.
pub const CURVATURE_STEP: f64 = 1e-3;
/// Radii sampled by `cusp`.
pub const CUSP_SAMPLES: usize = 33;

pub fn analyze(map: &Path, grid: Option<&Path>, res: usize, tol: f64) -> Result<Value, CliError> {
    let f = input::rational_map(&input::read_json(map)?)?;
    let m = PullbackMetric::new(f.clone())?;
    let div = singular_divisor(&m)?;
    let area = area_numeric(&m, tol)?;
    let samples = curvature_spot_checks(&m, &div.entries().iter().map(|e| e.0).collect::<Vec<_>>())?;
    let worst = samples.iter().map(|(_, k)| (k - 1.0).abs()).fold(0.0, f64::max);
    if let Some(path) = grid {
        write_grid(&m, path, res)?;
    }
    Ok(object([
        ("map", json::rational(&f)),
        ("degree", Value::from(f.degree())),
        ("divisor", json::divisor(&div)),
        ("divisor_degree", num(div.degree())),
        ("area", num(area)),
        ("area_expected", num(area_expected(&m))),
        ("gauss_bonnet_area", num(div.gauss_bonnet_area())),
        (
            "curvature",
            Value::Array(samples.iter().map(|(z, k)| object([("z", point(z)), ("value", num(*k))])).collect()),
        ),
        ("max_curvature_error", num(worst)),
    ]))
}

/// Seeded points in `|z| < 2` at chordal distance at least 0.2 from every
/// cone point, where the stencil is accurate.
fn curvature_spot_checks(m: &PullbackMetric, cones: &[SpherePoint]) -> Result<Vec<(SpherePoint, f64)>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::new();
    for _ in 0..1000 {
        if out.len() == CURVATURE_SAMPLES {
            break;
        }
        let z = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = SpherePoint::Finite(z);
        if z.norm() >= 2.0 || cones.iter().any(|q| chordal_distance(&p, q) < 0.2) {
            continue;
        }
        out.push((p, curvature_numeric(m, z, CURVATURE_STEP)?));
    }
    Ok(out)
}

fn write_grid(m: &PullbackMetric, path: &Path, res: usize) -> Result<(), CliError> {
    if res < 2 {
        return Err(CliError::Schema(format!("--res must be at least 2, got {res}")));
    }
    let step = 2.0 * GRID_EXTENT / (res - 1) as f64;
    let mut csv = String::from("x,y,density\n");
    for i in 0..res {
        let y = -GRID_EXTENT + step * i as f64;
        for j in 0..res {
            let x = -GRID_EXTENT + step * j as f64;
            let d = metric_density(m, &SpherePoint::new(x, y));
            let _ = writeln!(csv, "{},{},{}", json::format_f64(x), json::format_f64(y), json::format_f64(d));
        }
    }
    std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn schwarzian_cmd(map: &Path, at: Option<&str>) -> Result<Value, CliError> {
    let f = input::rational_map(&input::read_json(map)?)?;
    let at = at.map(input::point_arg).transpose()?;
    let s = schwarzian(&f)?;
    let div = singular_divisor(&PullbackMetric::new(f.clone())?)?;
    let tails = div
        .entries()
        .iter()
        .map(|(p, alpha)| {
            let t = laurent_tail(&s, p)?;
            Ok(object([
                ("point", point(p)),
                ("c", num(t.c)),
                ("d", complex(t.d)),
                ("alpha", num(*alpha)),
                ("alpha_from_weight", t.alpha().map_or(Value::Null, num)),
            ]))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut out =
        object([("map", json::rational(&f)), ("schwarzian", json::rational(&s)), ("tails", Value::Array(tails))]);
    if let Some(p) = at {
        let t = laurent_tail(&s, &p)?;
        let value = match s.eval(&p)? {
            SpherePoint::Infinity => Value::String("inf".into()),
            SpherePoint::Finite(z) => complex(z),
        };
        out["at"] = object([("point", point(&p)), ("value", value), ("c", num(t.c)), ("d", complex(t.d))]);
    }
    Ok(out)
}

pub fn build(omega: &Path, path: Option<&Path>, loops: &[std::path::PathBuf]) -> Result<Value, CliError> {
    let w = input::omega(&input::read_json(omega)?)?;
    let desc = build_metric(&w)?;
    let mut multipliers = Vec::new();
    for l in loops {
        let lp = input::path(&input::read_json(l)?, true)?;
        let windings = w
            .finite_poles()
            .map(|(q, r)| {
                Ok(object([
                    ("point", complex(q)),
                    ("residue", num(r)),
                    ("winding", Value::from(winding_number(&lp, q)?)),
                ]))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mult = monodromy_multiplier(&w, &lp)?;
        multipliers.push(object([
            ("loop", Value::String(l.display().to_string())),
            ("integral", complex(path_integral(&w, &lp)?)),
            ("multiplier", complex(mult)),
            ("modulus", num(mult.norm())),
            ("windings", Value::Array(windings)),
        ]));
    }
    let form = &desc.form_divisor;
    let mut out = object([
        ("divisor", json::divisor(&desc.divisor)),
        ("area", num(desc.area)),
        ("gauss_bonnet_area", num(desc.divisor.gauss_bonnet_area())),
        ("trivial", Value::Bool(desc.trivial)),
        (
            "classification",
            Value::Array(
                desc.classification
                    .iter()
                    .map(|(p, k)| object([("point", point(p)), ("kind", Value::from(k.as_str()))]))
                    .collect(),
            ),
        ),
        (
            "form_divisor",
            object([
                (
                    "zeros",
                    Value::Array(
                        form.zeros
                            .iter()
                            .map(|(p, k)| object([("point", point(p)), ("order", Value::from(*k))]))
                            .collect(),
                    ),
                ),
                ("poles", Value::Array(form.poles.iter().map(point).collect())),
                ("degree", Value::from(form.degree())),
            ]),
        ),
        ("multipliers", Value::Array(multipliers)),
    ]);
    if desc.trivial {
        out["reconstruction"] = json::rational(&reconstruct_rational(&w)?);
    }
    if let Some(p) = path {
        let pp = input::path(&input::read_json(p)?, false)?;
        let start = pp.start();
        out["path"] = object([
            ("integral", complex(path_integral(&w, &pp)?)),
            ("start", complex(start)),
            ("end", complex(pp.end())),
            ("developed", complex(develop(&w, start, &pp)?)),
            ("psi", num(psi_value(&w, start, &pp)?)),
        ]);
    }
    Ok(out)
}

fn solution(sol: &FrobeniusSolution) -> Value {
    let mut v = object([
        ("exponent", complex(sol.exponent)),
        ("coeffs", complexes(&sol.coeffs)),
        ("logarithmic", Value::Bool(sol.logarithmic)),
    ]);
    if let Some(c) = &sol.companion {
        v["log_part"] = object([("exponent", complex(c.exponent)), ("coeffs", complexes(&c.coeffs))]);
    }
    v
}

pub fn frobenius(q: &Path, alpha: f64, order: usize) -> Result<Value, CliError> {
    let q = input::series(&input::read_json(q)?)?;
    let (u0, u1) = local_solutions(&q, alpha, order)?;
    let (s0, s1) = indicial_roots(alpha);
    let m = alpha.round();
    let resonance = if (alpha - m).abs() < INTEGER_ANGLE_TOLERANCE && m >= 1.0 {
        let rm = resonance_obstruction(&q, m as usize)?;
        object([
            ("m", Value::from(m as u64)),
            ("R_m", complex(rm)),
            ("apparent", Value::Bool(is_apparent(&q, rm, m as usize))),
        ])
    } else {
        Value::Null
    };
    let normal_form = match ratio_normal_form(&u0, &u1) {
        Ok(nf) => object([
            (
                "kind",
                Value::from(match nf.form {
                    NormalFormKind::MuZs => "mu-x^alpha",
                    NormalFormKind::LambdaZNegs => "lambda-x^-alpha",
                }),
            ),
            ("alpha", num(nf.alpha)),
            ("coefficient", complex(nf.mu_or_lambda)),
            ("unit", complexes(&nf.unit)),
        ]),
        Err(_) => Value::Null,
    };
    Ok(object([
        ("alpha", num(alpha)),
        ("order", Value::from(order)),
        ("roots", Value::Array(vec![num(s0), num(s1)])),
        ("solutions", Value::Array(vec![solution(&u0), solution(&u1)])),
        ("residuals", Value::Array(vec![num(residual(&q, &u0)), num(residual(&q, &u1))])),
        ("resonance", resonance),
        ("logarithmic", Value::Bool(u0.logarithmic || u1.logarithmic)),
        ("normal_form", normal_form),
    ]))
}

pub fn feasible(divisor: &Path) -> Result<Value, CliError> {
    let d = input::divisor(&input::read_json(divisor)?)?;
    let found = feasibility_search(&d);
    let assignments: Vec<Value> = found
        .iter()
        .map(|a| {
            let roles = a
                .roles
                .iter()
                .map(|(p, r)| match r {
                    PointRole::Saddle { order } => {
                        object([("point", point(p)), ("role", Value::from("saddle")), ("order", Value::from(*order))])
                    }
                    PointRole::Extremum { residue } => {
                        object([("point", point(p)), ("role", Value::from("extremum")), ("residue", num(*residue))])
                    }
                })
                .collect();
            object([
                ("roles", Value::Array(roles)),
                ("smooth_positive", Value::from(a.smooth_positive)),
                ("smooth_negative", Value::from(a.smooth_negative)),
            ])
        })
        .collect();
    Ok(object([
        ("divisor", json::divisor(&d)),
        ("result", Value::from(if assignments.is_empty() { "infeasible" } else { "feasible" })),
        ("assignments", Value::Array(assignments)),
    ]))
}

/// `--rmin` as a log-radius: a number in `(0, 1)` or `exp(T)` with `T < 0`,
/// which reaches radii below the smallest double.
pub fn parse_rmin(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let t = match s.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => inner.trim().parse::<f64>().ok(),
        None => s.parse::<f64>().ok().filter(|r| *r > 0.0 && *r < 1.0).map(f64::ln),
    };
    match t {
        Some(t) if t < 0.0 && t.is_finite() => Ok(t),
        _ => Err(CliError::Schema(format!("--rmin: expected a radius in (0, 1) or exp(T) with T < 0, got \"{s}\""))),
    }
}

pub fn preset(name: &str, alpha: Option<f64>) -> Result<Preset, CliError> {
    let need = || alpha.ok_or_else(|| CliError::Schema(format!("--preset {name} needs --alpha")));
    Ok(match name {
        "sph-cone" => Preset::spherical_cone(need()?)?,
        "flat-cone" => Preset::flat_cone(need()?)?,
        "hyp-cusp" => Preset::HyperbolicCusp,
        _ => return Err(CliError::Schema(format!("unknown preset \"{name}\""))),
    })
}

/// Log-radii from `max(t_min/2, -1)` down to `t_min`, geometric in `|t|`.
pub fn cusp_log_radii(t_min: f64) -> Vec<f64> {
    let a = (-t_min / 2.0).min(1.0);
    let b = -t_min;
    (0..CUSP_SAMPLES).map(|k| -a * (b / a).powf(k as f64 / (CUSP_SAMPLES - 1) as f64)).collect()
}

pub fn cusp(name: &str, alpha: Option<f64>, rmin: &str) -> Result<Value, CliError> {
    let f = preset(name, alpha)?;
    let ts = cusp_log_radii(parse_rmin(rmin)?);
    let curve = indicator_curve_log(&f, &ts)?;
    let limit = cusp_limit_check_log(&f, &ts)?;
    let values: Vec<f64> = curve.iter().map(|p| p.1).collect();
    let indicator = values.iter().copied().fold(f64::INFINITY, f64::min);
    let peak = values.iter().copied().fold(0.0, f64::max);
    let last = values[values.len() - 1];
    let tail = &values[values.len() * 3 / 4..];
    let spread = tail.iter().map(|v| (v - last).abs()).fold(0.0, f64::max);
    let verdict = if limit && last <= 0.1 * peak {
        "weak-cusp"
    } else if last > 0.0 && spread <= 1e-3 * last {
        "conical"
    } else {
        "inconclusive"
    };
    let samples = curve
        .iter()
        .map(|&(t, v)| {
            object([
                ("log_r", num(t)),
                ("r", num(t.exp())),
                ("indicator", num(v)),
                ("psi_ratio", num(f.psi(t, 0.0) / t)),
            ])
        })
        .collect();
    Ok(object([
        ("preset", Value::from(name)),
        ("alpha", f.alpha().map_or(Value::Null, num)),
        ("curvature", num(f.curvature())),
        ("samples", Value::Array(samples)),
        ("indicator", num(indicator)),
        ("indicator_meta", Value::from("liminf proxy = min over sampled r")),
        ("psi_ratio_meta", Value::from("(phi + ln r)/ln r at theta = 0")),
        ("cone_angle_estimate", num(last / TAU)),
        ("cusp_limit", Value::Bool(limit)),
        ("verdict", Value::from(verdict)),
    ]))
}
