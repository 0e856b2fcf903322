//! Report rendering with stable field order and 2^53-safe integers.
//!
//! Counts are emitted as JSON numbers only while they are exactly
//! representable in a double; larger values become decimal strings so
//! consumers with double-precision JSON parsers never lose digits.

use bisector_lab::checks::{CheckMode, CheckReport, CheckValue};
use serde_json::{json, Map, Value};

/// Largest integer emitted as a JSON number.
const SAFE_JSON_INT: u128 = 1 << 53;

pub fn json_count(v: u128) -> Value {
    if v <= SAFE_JSON_INT {
        json!(v as u64)
    } else {
        json!(v.to_string())
    }
}

/// Fixed-precision rendering for ratio columns; used by both the JSON and
/// CSV writers so outputs stay byte-identical across runs.
pub fn render_ratio(x: f64) -> String {
    format!("{x:.9}")
}

pub fn check_value_json(v: &CheckValue) -> Value {
    match v {
        CheckValue::Exact(r) => {
            if r.is_integer() {
                match u128::try_from(r.numer().clone()) {
                    Ok(n) => json_count(n),
                    Err(_) => json!(r.numer().to_string()),
                }
            } else {
                json!(format!("{}/{}", r.numer(), r.denom()))
            }
        }
        CheckValue::Real(x) => json!(render_ratio(*x)),
    }
}

/// One verify row; `status` is "pass", "FAIL", or "SKIPPED".
pub fn check_row(report: &CheckReport) -> Value {
    let mut row = Map::new();
    row.insert("name".into(), json!(report.name));
    row.insert(
        "mode".into(),
        json!(match report.mode {
            CheckMode::Assert => "assert",
            CheckMode::Report => "report",
        }),
    );
    row.insert("lhs".into(), check_value_json(&report.lhs));
    row.insert("rhs".into(), check_value_json(&report.rhs));
    row.insert("ratio".into(), check_value_json(&report.ratio));
    row.insert(
        "status".into(),
        json!(if report.pass { "pass" } else { "FAIL" }),
    );
    row.insert("context".into(), json!(report.context));
    Value::Object(row)
}

pub fn skipped_row(name: &str, reason: &str) -> Value {
    let mut row = Map::new();
    row.insert("name".into(), json!(name));
    row.insert("mode".into(), json!("assert"));
    row.insert("status".into(), json!("SKIPPED"));
    row.insert("context".into(), json!(reason));
    Value::Object(row)
}

/// Flattens a verify row for CSV output.
pub fn check_row_csv(row: &Value) -> Vec<String> {
    let get = |k: &str| -> String {
        match row.get(k) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => String::new(),
        }
    };
    vec![
        get("name"),
        get("mode"),
        get("lhs"),
        get("rhs"),
        get("ratio"),
        get("status"),
        get("context"),
    ]
}

/// Serializes a JSON value with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
