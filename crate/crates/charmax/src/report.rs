//! Deterministic report serialization. JSON objects are emitted with sorted
//! keys and every double printed with 17 significant digits, so identical
//! inputs produce byte-identical output.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// 17 significant digits round-trip any f64 exactly.
fn format_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn escape_json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().expect("number is f64")));
            }
        }
        Value::String(s) => out.push_str(&escape_json_string(s)),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration is
            // already key-sorted.
            out.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&escape_json_string(k));
                out.push(':');
                write_value(val, out);
            }
            out.push('}');
        }
    }
}

/// Serializes any value to the deterministic JSON encoding.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

/// CSV cell for a double, same 17-significant-digit convention.
pub fn csv_f64(x: f64) -> String {
    format_f64(x)
}
