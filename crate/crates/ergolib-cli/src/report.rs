//! Deterministic report assembly and rendering. JSON maps are backed by
//! sorted keys and floats print as shortest round-trip decimals, so identical
//! inputs produce byte-identical output.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use ergolib::Complex64;

pub const SCHEMA_VERSION: &str = "1";

/// JSON value for a float; non-finite magnitudes become tagged strings since
/// JSON has no literal for them.
pub fn float_value(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn complex_value(z: Complex64) -> Value {
    Value::Array(vec![float_value(z.re), float_value(z.im)])
}

pub fn state_value(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_value(z)).collect())
}

/// SHA-256 of the canonical (sorted-key, compact) input JSON.
pub fn input_digest(doc: &Value) -> String {
    let canonical = serde_json::to_string(doc).expect("canonical JSON");
    let hash = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(2 * hash.len() + 7);
    hex.push_str("sha256:");
    for byte in hash {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

pub struct ReportEnvelope {
    pub command: String,
    pub digest: String,
    pub config: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    /// `None` when all verifications passed; failing detail otherwise.
    pub failure: Option<String>,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("command".into(), json!(self.command));
        map.insert("input_digest".into(), json!(self.digest));
        map.insert("config".into(), self.config.clone());
        map.insert(
            "status".into(),
            json!(if self.failure.is_none() {
                "ok"
            } else {
                "verification-failed"
            }),
        );
        if let Some(failure) = &self.failure {
            map.insert("failure".into(), json!(failure));
        }
        map.insert("results".into(), self.results.clone());
        map.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().map(|w| json!(w)).collect()),
        );
        Value::Object(map)
    }

    pub fn render_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("report JSON");
        text.push('\n');
        text
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("input:   {}\n", self.digest));
        out.push_str(&format!(
            "status:  {}\n",
            if self.failure.is_none() {
                "ok"
            } else {
                "verification-failed"
            }
        ));
        if let Some(failure) = &self.failure {
            out.push_str(&format!("failure: {failure}\n"));
        }
        render_value(&self.results, "results", 0, &mut out);
        for warning in &self.warnings {
            out.push_str(&format!("warning: {warning}\n"));
        }
        out
    }
}

fn render_value(value: &Value, label: &str, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{label}:\n"));
            for (k, v) in map {
                render_value(v, k, depth + 1, out);
            }
        }
        Value::Array(items) if items.len() > 8 => {
            out.push_str(&format!("{pad}{label}: [{} entries]\n", items.len()));
        }
        other => {
            out.push_str(&format!("{pad}{label}: {other}\n"));
        }
    }
}

/// CSV for the Cesàro grid: t, interleaved re/im mean components, error norm.
pub fn render_grid_csv(grid: &[ergolib::ergodic::GridPoint<f64>]) -> String {
    let mut out = String::new();
    let dim = grid.first().map_or(0, |g| g.mean.len());
    out.push('t');
    for i in 0..dim {
        out.push_str(&format!(",mean_{i}_re,mean_{i}_im"));
    }
    out.push_str(",error_norm\n");
    for point in grid {
        out.push_str(&format!("{:?}", point.t));
        for z in &point.mean {
            out.push_str(&format!(",{:?},{:?}", z.re, z.im));
        }
        out.push_str(&format!(",{:?}\n", point.error_norm));
    }
    out
}
