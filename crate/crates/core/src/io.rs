//! Output helpers shared by the library writers and the CLI.

use serde::Serialize;

/// Fixed 17-significant-digit scientific format used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

/// Wraps a serializable value as `{"version": 1, ...fields}`.
pub fn versioned_json<T: Serialize>(value: &T) -> serde_json::Value {
    let mut out = serde_json::Map::new();
    out.insert("version".into(), serde_json::Value::from(1));
    match serde_json::to_value(value).expect("serializable report") {
        serde_json::Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    serde_json::Value::Object(out)
}
