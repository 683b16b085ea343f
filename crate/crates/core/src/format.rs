//! Deterministic number formatting for reports: 12 significant digits.

use serde_json::Value;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal rendering of `x` rounded to 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let s = format!("{r}");
    // Debug/Display of f64 never uses exponents; fall back for extreme magnitudes.
    if s.len() > 24 {
        format!("{r:e}")
    } else {
        s
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(f)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON of `value` with floats rounded to 12 significant digits.
pub fn to_report_json<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(0.7), "0.7");
        assert_eq!(format_sig(-2.0 / 3.0 * 1e-7), "-0.0000000666666666667");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(12.578_643_578_643_1), "12.5786435786");
    }

    #[test]
    fn json_rounding() {
        let mut v = serde_json::json!({"a": [0.1 + 0.2, 1], "b": {"c": 2.0 / 3.0}});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,1],"b":{"c":0.666666666667}}"#);
    }
}
