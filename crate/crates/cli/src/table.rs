//! Plain-text rendering of command output.

use std::fmt::Write;

use serde_json::Value;

/// Decimal digits shown next to exact rationals.
const DIGITS: usize = 6;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    walk(&mut out, "", v, 0);
    out
}

fn rational(v: &Value) -> Option<String> {
    let obj = v.as_object()?;
    if obj.len() != 2 {
        return None;
    }
    let num = obj.get("num")?.as_str()?;
    let den = obj.get("den")?.as_str()?;
    let exact = if den == "1" { num.to_string() } else { format!("{num}/{den}") };
    let approx = format!("{num}/{den}")
        .parse::<fekete_core::Rational>()
        .map(|q| q.to_decimal(DIGITS))
        .unwrap_or_default();
    // long exact forms are abbreviated; the decimal carries the value
    if exact.len() > 40 {
        Some(format!("~{approx} ({DIGITS} dp)"))
    } else {
        Some(format!("{exact}  (~{approx}, {DIGITS} dp)"))
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => rational(v),
    }
}

fn walk(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}{}{s}", if key.is_empty() { "" } else { ": " });
        return;
    }
    match v {
        Value::Object(map) => {
            if !key.is_empty() {
                let _ = writeln!(out, "{pad}{key}:");
            }
            let inner = if key.is_empty() { depth } else { depth + 1 };
            for (k, x) in map {
                walk(out, k, x, inner);
            }
        }
        Value::Array(items) if items.iter().all(|x| scalar(x).is_some()) => {
            let cells: Vec<String> = items.iter().filter_map(scalar).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", cells.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, x) in items.iter().enumerate() {
                walk(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        _ => {}
    }
}
