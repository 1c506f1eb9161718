//! Report assembly and rendering. Reports are machine-readable JSON with
//! sorted keys, or an indented text rendering of the same data; both are
//! byte-stable given identical inputs, so they can be pinned by golden
//! files. Timing is deliberately kept out of reports (it goes to stderr)
//! to preserve that stability.

use serde_json::Value;

use crate::doc::SCHEMA;

/// A finished report: the echoed invocation, an overall status and the
/// command-specific payload.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    /// `ok` (exit 0), `fail` (validation failure, exit 1) or `error`
    /// (engine or parse error, exit 2/3).
    pub status: &'static str,
    pub payload: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status,
            "payload": self.payload,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("reports serialize");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("schema: {SCHEMA}\n"));
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("status: {}\n", self.status));
        out.push_str("payload:\n");
        render_value(&self.payload, 1, &mut out);
        out
    }
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::String(_) | Value::Number(_))) => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| scalar_text(i).expect("strings and numbers are scalar"))
                .collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

/// Indented, deterministic rendering: objects one `key: value` line per
/// entry (sorted keys), arrays one `-` item per line, flat arrays of
/// scalars inline.
fn render_value(v: &Value, level: usize, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                indent(level, out);
                match scalar_text(val) {
                    Some(s) => out.push_str(&format!("{key}: {s}\n")),
                    None => {
                        out.push_str(&format!("{key}:\n"));
                        render_value(val, level + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                indent(level, out);
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("- {s}\n")),
                    None => {
                        out.push_str("-\n");
                        render_value(item, level + 1, out);
                    }
                }
            }
        }
        other => {
            indent(level, out);
            out.push_str(&scalar_text(other).expect("non-container values are scalar"));
            out.push('\n');
        }
    }
}
