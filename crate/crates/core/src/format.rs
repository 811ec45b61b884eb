//! Fixed-precision number formatting for tabular and JSON output.

/// Rounds to 15 significant decimal digits. Non-finite values pass through.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// Shortest text that reads back as [`round_sig15`]`(x)`.
///
/// Infinities print as `inf` and `-inf`, NaN as `nan`.
pub fn sig15(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:?}", round_sig15(x))
    }
}

/// Replaces every number in a JSON tree by its 15-digit rounding.
pub fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                if let Some(r) = n.as_f64().map(round_sig15).and_then(serde_json::Number::from_f64) {
                    *n = r;
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}
