//! Input files. Anything that does not match the expected shape is a
//! schema violation.

use std::path::Path;

use conemetric::{
    c64, Complex64, ConicalDivisor, PathPolyline, Polynomial, PowerSeries, RationalMap, SpherePoint,
    ThirdKindDifferential,
};
use serde_json::Value;

use crate::CliError;

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
}

fn field<'a>(v: &'a Value, key: &str, ctx: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| schema(format!("{ctx}: missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a [Value], CliError> {
    v.as_array().map(Vec::as_slice).ok_or_else(|| schema(format!("{ctx}: expected an array")))
}

fn real(v: &Value, ctx: &str) -> Result<f64, CliError> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| schema(format!("{ctx}: expected a finite number")))
}

/// `[re, im]`, or a bare real number.
pub fn complex(v: &Value, ctx: &str) -> Result<Complex64, CliError> {
    if v.is_number() {
        return Ok(c64(real(v, ctx)?, 0.0));
    }
    match array(v, ctx)? {
        [re, im] => Ok(c64(real(re, ctx)?, real(im, ctx)?)),
        _ => Err(schema(format!("{ctx}: expected [re, im]"))),
    }
}

/// `[re, im]` or `"inf"`.
pub fn sphere_point(v: &Value, ctx: &str) -> Result<SpherePoint, CliError> {
    match v {
        Value::String(s) if s == "inf" => Ok(SpherePoint::Infinity),
        Value::Array(_) => Ok(SpherePoint::Finite(complex(v, ctx)?)),
        _ => Err(schema(format!("{ctx}: expected [re, im] or \"inf\""))),
    }
}

/// A point given on the command line: `inf`, `re,im`, or a JSON `[re, im]`.
pub fn point_arg(s: &str) -> Result<SpherePoint, CliError> {
    let s = s.trim();
    if s == "inf" {
        return Ok(SpherePoint::Infinity);
    }
    if let Ok(v) = serde_json::from_str::<Value>(s) {
        return sphere_point(&v, "--at");
    }
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
            (Ok(re), Ok(im)) if re.is_finite() && im.is_finite() => Ok(SpherePoint::new(re, im)),
            _ => Err(schema(format!("--at: cannot parse \"{s}\""))),
        },
        _ => Err(schema(format!("--at: expected \"re,im\" or \"inf\", got \"{s}\""))),
    }
}

fn coefficients(v: &Value, ctx: &str) -> Result<Vec<Complex64>, CliError> {
    let items = array(v, ctx)?;
    if items.is_empty() {
        return Err(schema(format!("{ctx}: empty coefficient list")));
    }
    items.iter().enumerate().map(|(i, x)| complex(x, &format!("{ctx}[{i}]"))).collect()
}

/// `{"num": [...], "den": [...]}` with ascending coefficients.
pub fn rational_map(v: &Value) -> Result<RationalMap, CliError> {
    let num = coefficients(field(v, "num", "map")?, "map.num")?;
    let den = coefficients(field(v, "den", "map")?, "map.den")?;
    Ok(RationalMap::new(Polynomial::new(num), Polynomial::new(den))?)
}

/// `{"poles": [{"point": ..., "residue": ...}, ...]}`.
pub fn omega(v: &Value) -> Result<ThirdKindDifferential, CliError> {
    let poles = array(field(v, "poles", "omega")?, "omega.poles")?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ctx = format!("omega.poles[{i}]");
            Ok((sphere_point(field(p, "point", &ctx)?, &ctx)?, real(field(p, "residue", &ctx)?, &ctx)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ThirdKindDifferential::new(poles)?)
}

/// `{"points": [{"point": ..., "alpha": ...}, ...]}`.
pub fn divisor(v: &Value) -> Result<ConicalDivisor, CliError> {
    let entries = array(field(v, "points", "divisor")?, "divisor.points")?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ctx = format!("divisor.points[{i}]");
            Ok((sphere_point(field(p, "point", &ctx)?, &ctx)?, real(field(p, "alpha", &ctx)?, &ctx)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ConicalDivisor::new(entries)?)
}

/// `{"coeffs": [b0, b1, ...]}`, each a real number or `[re, im]`.
pub fn series(v: &Value) -> Result<PowerSeries, CliError> {
    Ok(PowerSeries::new(coefficients(field(v, "coeffs", "q")?, "q.coeffs")?)?)
}

/// `{"vertices": [[re, im], ...], "closed": bool}` or
/// `{"circle": {"center": [re, im], "radius": r, "samples": n}}`.
pub fn path(v: &Value, closed_default: bool) -> Result<PathPolyline, CliError> {
    if let Some(c) = v.get("circle") {
        let center = complex(field(c, "center", "circle")?, "circle.center")?;
        let radius = real(field(c, "radius", "circle")?, "circle.radius")?;
        let samples = match c.get("samples") {
            None => 128,
            Some(n) => n.as_u64().filter(|&n| n >= 3).ok_or_else(|| schema("circle.samples: integer >= 3"))? as usize,
        };
        if !(radius > 0.0) {
            return Err(schema("circle.radius: must be positive"));
        }
        return Ok(PathPolyline::circle(center, radius, samples, 0.0));
    }
    let vertices = coefficients(field(v, "vertices", "path")?, "path.vertices")?;
    let closed = match v.get("closed") {
        None => closed_default,
        Some(b) => b.as_bool().ok_or_else(|| schema("path.closed: expected a boolean"))?,
    };
    Ok(PathPolyline::new(vertices, closed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn points_and_maps_parse() {
        assert_eq!(sphere_point(&json!("inf"), "p").unwrap(), SpherePoint::Infinity);
        assert_eq!(sphere_point(&json!([1, -2]), "p").unwrap(), SpherePoint::new(1.0, -2.0));
        assert!(sphere_point(&json!("zero"), "p").is_err());
        assert_eq!(point_arg("0.5, 2").unwrap(), SpherePoint::new(0.5, 2.0));
        assert_eq!(point_arg("[0, 1]").unwrap(), SpherePoint::new(0.0, 1.0));
        let f = rational_map(&json!({"num": [0, 0, 1], "den": [[1, 0]]})).unwrap();
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn violations_are_schema_errors() {
        for bad in [json!({"num": [1]}), json!({"num": [], "den": [1]}), json!({"num": ["x"], "den": [1]})] {
            assert!(matches!(rational_map(&bad), Err(CliError::Schema(_))));
        }
        assert!(matches!(omega(&json!({"poles": [{"point": [0, 0]}]})), Err(CliError::Schema(_))));
    }
}
