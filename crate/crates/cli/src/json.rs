//! Deterministic JSON output: sorted keys, floats at 17 significant digits.

use conemetric::{Complex64, ConicalDivisor, RationalMap, SpherePoint};
use serde_json::{Map, Value};

/// A float as a JSON value. Non-finite values become the strings
/// `"nan"`, `"inf"` and `"-inf"`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn complexes(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

pub fn point(p: &SpherePoint) -> Value {
    match p {
        SpherePoint::Finite(z) => complex(*z),
        SpherePoint::Infinity => Value::String("inf".into()),
    }
}

pub fn rational(f: &RationalMap) -> Value {
    object([("num", complexes(f.num().coeffs())), ("den", complexes(f.den().coeffs()))])
}

pub fn divisor(d: &ConicalDivisor) -> Value {
    Value::Array(d.entries().iter().map(|(p, a)| object([("point", point(p)), ("alpha", num(*a))])).collect())
}

pub fn object<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

/// `%.17g` with trailing zeros removed.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if (-5..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim_fraction(&body))
    } else {
        format!("{sign}{}e{exp}", trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..])))
    }
}

fn trim_fraction(s: &str) -> &str {
    s.trim_end_matches('0').trim_end_matches('.')
}

/// Pretty-printed JSON with two-space indentation and sorted object keys.
pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, Some(u), _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, _, Some(x)) => out.push_str(&format_f64(x)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                push_indent(indent + 1, out);
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                push_indent(indent + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}
