//! Dataset emission: CSV and JSON with a fixed column schema.
//!
//! Values print through Rust's shortest round-trip float formatting, so a
//! written file parses back to bit-identical numbers. The data files carry
//! nothing run-variant; timestamps and worker counts go to a sidecar.

use crate::config::OutputKind;
use crate::scan::{Dataset, RowValues};
use nhpb_core::hamiltonian::ModelKind;
use nhpb_core::{Error, Result};
use serde_json::{json, Map, Value};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

struct Column {
    name: &'static str,
    requested: bool,
    /// Optional columns are dropped from the header when not requested.
    optional: bool,
    get: fn(&RowValues) -> Option<f64>,
}

/// The fixed schema. Base observable columns always appear in the header;
/// the closed-form reference columns appear only when requested.
fn columns(ds: &Dataset) -> Vec<Column> {
    let has = |k: OutputKind| ds.config.outputs.contains(&k);
    use OutputKind::*;
    vec![
        Column { name: "I_rel", requested: has(Intensity), optional: false, get: |v| v.i_rel },
        Column { name: "g2", requested: has(G2), optional: false, get: |v| v.g2 },
        Column { name: "g3", requested: has(G3), optional: false, get: |v| v.g3 },
        Column {
            name: "g2_two_state",
            requested: has(TwoState),
            optional: false,
            get: |v| v.g2_two_state,
        },
        Column {
            name: "g2_tampered",
            requested: has(Tampered),
            optional: false,
            get: |v| v.g2_tampered,
        },
        Column { name: "Gamma_p1", requested: has(Eigs), optional: false, get: |v| v.gamma_p1 },
        Column { name: "Gamma_p2", requested: has(Eigs), optional: false, get: |v| v.gamma_p2 },
        Column { name: "N2_p1", requested: has(Components), optional: false, get: |v| v.n2_p1 },
        Column { name: "N2_p2", requested: has(Components), optional: false, get: |v| v.n2_p2 },
        Column {
            name: "g2_analytic",
            requested: has(Analytic),
            optional: true,
            get: |v| v.g2_analytic,
        },
        Column {
            name: "d_threshold",
            requested: has(Threshold),
            optional: true,
            get: |v| v.d_threshold,
        },
    ]
    .into_iter()
    .filter(|c| !c.optional || c.requested)
    .collect()
}

fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Quadratic => "quadratic",
        ModelKind::Hybrid => "hybrid",
    }
}

/// Shortest decimal that parses back to the same f64.
fn fmt(v: f64) -> String {
    format!("{v}")
}

pub fn csv_string(ds: &Dataset) -> String {
    let cols = columns(ds);
    let mut out = String::new();
    out.push_str("model");
    for name in ds.axis_names() {
        out.push(',');
        out.push_str(name);
    }
    for c in &cols {
        out.push(',');
        out.push_str(c.name);
    }
    out.push_str(",status\n");

    let model = model_name(ds.config.model);
    for row in &ds.rows {
        out.push_str(model);
        for v in &row.axis_values {
            out.push(',');
            out.push_str(&fmt(*v));
        }
        for c in &cols {
            out.push(',');
            if c.requested {
                match (c.get)(&row.values) {
                    Some(v) if v.is_nan() => out.push_str("NaN"),
                    Some(v) => out.push_str(&fmt(v)),
                    None => out.push_str("NaN"),
                }
            }
            // Unrequested cells stay empty: absent, not zero.
        }
        out.push(',');
        out.push_str(&row.status);
        out.push('\n');
    }
    out
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

/// Tolerances baked into scan evaluation, echoed so a dataset states the
/// contract it was produced under.
fn thresholds() -> Value {
    json!({
        "route_equivalence_tol": nhpb_core::correlations::ROUTE_EQUIVALENCE_TOL,
        "steady_state_residual_tol": nhpb_core::lindblad::STEADY_STATE_RESIDUAL_TOL,
        "oracle_g2_rel_tol": crate::config::ORACLE_G2_REL_TOL,
        "convergence_bound": nhpb_core::lindblad::DEFAULT_CONVERGENCE_BOUND,
        "access_threshold": nhpb_core::eigen::ACCESS_THRESHOLD,
    })
}

pub fn json_value(ds: &Dataset) -> Value {
    let cols = columns(ds);
    let model = model_name(ds.config.model);
    let rows: Vec<Value> = ds
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            obj.insert("model".into(), Value::String(model.into()));
            for (name, v) in ds.axis_names().iter().zip(&row.axis_values) {
                obj.insert((*name).into(), number(*v));
            }
            for c in &cols {
                let cell = if c.requested {
                    (c.get)(&row.values).map(number).unwrap_or(Value::Null)
                } else {
                    Value::Null
                };
                obj.insert(c.name.into(), cell);
            }
            obj.insert("status".into(), Value::String(row.status.clone()));
            Value::Object(obj)
        })
        .collect();

    json!({
        "metadata": {
            "config": serde_json::to_value(&ds.config).expect("config serializes"),
            "version": env!("CARGO_PKG_VERSION"),
            "thresholds": thresholds(),
        },
        "rows": rows,
    })
}

pub fn json_string(ds: &Dataset) -> String {
    let mut text = serde_json::to_string_pretty(&json_value(ds)).expect("dataset serializes");
    text.push('\n');
    text
}

/// Run-variant record kept out of the data files for determinism.
fn sidecar_value(ds: &Dataset) -> Value {
    let created_unix_ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let mut doc = json!({
        "created_unix_ms": created_unix_ms,
        "threads": ds.threads,
        "version": env!("CARGO_PKG_VERSION"),
    });
    if ds.config.oracle.enabled {
        // Cross-checked runs must state their drive amplitude; the default
        // is re-derived per row from that row's rates.
        let omega = match ds.config.oracle.omega {
            Some(w) => json!(w),
            None => json!("1e-2 * min positive rate, per row"),
        };
        doc["oracle_omega"] = omega;
    }
    doc
}

fn write_with_context(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Writes the data file plus a `<stem>.meta.json` sidecar next to it.
pub fn write_dataset(ds: &Dataset, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Csv => csv_string(ds),
        Format::Json => json_string(ds),
    };
    write_with_context(path, &text)?;
    let sidecar = path.with_extension("meta.json");
    let mut meta = serde_json::to_string_pretty(&sidecar_value(ds)).expect("sidecar serializes");
    meta.push('\n');
    write_with_context(&sidecar, &meta)
}
