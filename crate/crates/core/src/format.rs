//! Number formatting shared by the CSV and JSON writers.
//!
//! Output never depends on locale: Rust's float formatting always uses `.`
//! as the decimal separator. Floats in JSON are rounded to 12 significant
//! digits and written in shortest round-trip form, which makes
//! parse-then-reserialize byte-identical.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// Significant digits kept in JSON output.
pub const JSON_DIGITS: usize = 12;
/// Significant digits shown in human-readable tables.
pub const TABLE_DIGITS: usize = 6;

/// Rounds to `digits` significant digits.
pub fn round_sig(value: f64, digits: usize) -> f64 {
    if !value.is_finite() || value == 0.0 {
        return value;
    }
    format!("{:.*e}", digits.saturating_sub(1), value)
        .parse()
        .unwrap_or(value)
}

/// Shortest decimal form of `value` rounded to `digits` significant digits.
pub fn fmt_sig(value: f64, digits: usize) -> String {
    let r = round_sig(value, digits);
    if r == 0.0 {
        // avoid "-0"
        return "0".to_owned();
    }
    format!("{r}")
}

fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(f, JSON_DIGITS)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to [`JSON_DIGITS`], newline-terminated.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// CSV cell for a float: 12 significant digits, shortest form.
pub fn csv_float(value: f64) -> String {
    if value.is_nan() {
        return "nan".to_owned();
    }
    fmt_sig(value, JSON_DIGITS)
}
