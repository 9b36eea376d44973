//! Deterministic output plumbing: JSON values with sorted keys, CSV rows,
//! atomic file writes, and one number formatter shared by the JSON reports
//! and the human summaries so every printed value matches its JSON twin.

use crate::CliError;
use serde_json::{json, Map, Value};
use std::path::Path;

/// Formats a float exactly as `serde_json` will serialize it.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| String::from("null"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    match x {
        Some(v) => json!(v),
        None => Value::Null,
    }
}

/// Provenance block embedded in every report: grid sizes, the tolerances in
/// force, and (unless suppressed) a wall-clock stamp.
pub fn provenance(grid_n: usize, tol: f64, reproducible: bool) -> Value {
    let mut m = Map::new();
    m.insert("b_grid_size".into(), json!(1000));
    m.insert("curve_grid_n".into(), json!(grid_n));
    m.insert(
        "tolerances".into(),
        json!({
            "equality_tol": 1e-9,
            "residual_tol": tol,
        }),
    );
    if !reproducible {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        m.insert("generated_at_unix".into(), json!(secs));
    }
    Value::Object(m)
}

/// Writes a JSON value pretty-printed with a trailing newline, atomically
/// (temp file then rename).
pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

pub fn write_csv(dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_atomic(dir, name, text.as_bytes())
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, &target)?;
    Ok(())
}
