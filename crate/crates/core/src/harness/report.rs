//! CSV reports and their metadata sidecars.
//!
//! Floats are written in shortest round-trip form, so a report parsed back
//! reproduces the table bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::convergence::{ErrorRow, ErrorTable, StudyKind};
use crate::error::{Error, Result};
use crate::mesh::GradedMesh;
use crate::spectral::SpectralField;

pub const REPORT_HEADER: &str = "resolution,error,stderr,samples";

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// Renders the table: one row per resolution, then `#`-prefixed footer
/// lines carrying the kind and the observed orders.
pub fn render_report(table: &ErrorTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{REPORT_HEADER}");
    for r in &table.rows {
        let _ = writeln!(s, "{},{:e},{:e},{}", r.resolution, r.error, r.stderr, r.samples);
    }
    let _ = writeln!(s, "# kind,{}", table.kind.label());
    let _ = writeln!(s, "# orders,{}", join(&table.orders));
    let _ = writeln!(s, "# order_stderr,{}", join(&table.order_stderr));
    match table.mean_order {
        Some(m) => {
            let _ = writeln!(s, "# mean_order,{m:e}");
        }
        None => {
            let _ = writeln!(s, "# mean_order,");
        }
    }
    s
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::validation(format!("malformed report: {}", msg.into()))
}

fn parse_float_list(text: &str) -> Result<Vec<f64>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|v| v.parse().map_err(|_| parse_err(format!("bad number '{v}'"))))
        .collect()
}

pub fn parse_report(text: &str) -> Result<ErrorTable> {
    let mut lines = text.lines();
    if lines.next() != Some(REPORT_HEADER) {
        return Err(parse_err("missing header"));
    }
    let mut rows = Vec::new();
    let mut kind = None;
    let mut orders = Vec::new();
    let mut order_stderr = Vec::new();
    let mut mean_order = None;
    for line in lines {
        if let Some(footer) = line.strip_prefix("# ") {
            let (key, value) = footer.split_once(',').unwrap_or((footer, ""));
            match key {
                "kind" => {
                    kind = Some(match value {
                        "spatial" => StudyKind::Spatial,
                        "temporal" => StudyKind::Temporal,
                        other => return Err(parse_err(format!("unknown kind '{other}'"))),
                    })
                }
                "orders" => orders = parse_float_list(value)?,
                "order_stderr" => order_stderr = parse_float_list(value)?,
                "mean_order" => mean_order = parse_float_list(value)?.first().copied(),
                other => return Err(parse_err(format!("unknown footer '{other}'"))),
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(format!("expected 4 fields in '{line}'")));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse().map_err(|_| parse_err(format!("bad number '{}'", fields[i])))
        };
        rows.push(ErrorRow {
            resolution: num(0)?,
            error: num(1)?,
            stderr: num(2)?,
            samples: fields[3].parse().map_err(|_| parse_err("bad sample count"))?,
        });
    }
    Ok(ErrorTable {
        kind: kind.ok_or_else(|| parse_err("missing kind"))?,
        rows,
        orders,
        order_stderr,
        mean_order,
    })
}

/// `<path>.meta` next to a report.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta");
    PathBuf::from(os)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the CSV report and a sidecar holding the full configuration and
/// the crate version, enough to regenerate the report.
pub fn emit_report(table: &ErrorTable, cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    write_file(path, &render_report(table))?;
    let mut meta = cfg.to_text();
    let _ = writeln!(meta, "# study = {}", table.kind.label());
    let _ = writeln!(meta, "# version = {}", env!("CARGO_PKG_VERSION"));
    write_file(&sidecar_path(path), &meta)
}

pub fn read_report(path: &Path) -> Result<ErrorTable> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_report(&text)
}

/// `k,coefficient` rows of a spectral field.
pub fn render_field(field: &SpectralField) -> String {
    let mut s = String::from("k,coefficient\n");
    for (i, c) in field.coeffs().iter().enumerate() {
        let _ = writeln!(s, "{},{c:e}", i + 1);
    }
    s
}

/// `n,t,step` rows of a mesh; the step of level 0 is written as 0.
pub fn render_mesh(mesh: &GradedMesh) -> String {
    let mut s = String::from("n,t,step\n");
    for n in 0..=mesh.steps() {
        let step = if n == 0 { 0.0 } else { mesh.step(n) };
        let _ = writeln!(s, "{n},{:e},{step:e}", mesh.time(n));
    }
    s
}
