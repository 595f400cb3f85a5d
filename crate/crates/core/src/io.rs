//! Plain-text configuration files and deterministic CSV renderers.
//!
//! Configuration format (line-oriented, UTF-8):
//!
//! ```text
//! # inclab configuration v1
//! # metadata: <free-form one-liner>
//! delta 2^-8
//! <a> <b> <c>
//! ...
//! ```
//!
//! Floats are written in shortest-roundtrip form, so read(write(X)) == X
//! bit-for-bit and rewriting is byte-identical.

use crate::phase::{Configuration, PhasePoint};
use crate::util::{format_dyadic, parse_dyadic};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Render a configuration to the text format.
pub fn configuration_to_string(x: &Configuration) -> String {
    let mut s = String::new();
    s.push_str("# inclab configuration v1\n");
    let meta = x.metadata.replace('\n', " ");
    let _ = writeln!(s, "# metadata: {meta}");
    let _ = writeln!(s, "delta {}", format_dyadic(x.delta));
    for p in &x.points {
        let _ = writeln!(s, "{:?} {:?} {:?}", p.a, p.b, p.c);
    }
    s
}

/// Parse the text format.
pub fn configuration_from_str(s: &str) -> Result<Configuration> {
    let mut delta: Option<f64> = None;
    let mut metadata = String::new();
    let mut points = Vec::new();
    for (ln, line) in s.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# metadata:") {
            metadata = rest.trim().to_string();
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("delta ") {
            delta = Some(
                parse_dyadic(rest.trim())
                    .ok_or_else(|| Error::Parse(format!("line {}: bad delta {rest:?}", ln + 1)))?,
            );
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = |name: &str| -> Result<f64> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing {name}", ln + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
        };
        let (a, b, c) = (next("a")?, next("b")?, next("c")?);
        if it.next().is_some() {
            return Err(Error::Parse(format!("line {}: trailing fields", ln + 1)));
        }
        points.push(PhasePoint::new(a, b, c));
    }
    let delta = delta.ok_or_else(|| Error::Parse("missing delta line".into()))?;
    Ok(Configuration::new(points, delta, metadata))
}

/// Write a configuration file.
pub fn write_configuration(path: &Path, x: &Configuration) -> Result<()> {
    std::fs::write(path, configuration_to_string(x))?;
    Ok(())
}

/// Read a configuration file.
pub fn read_configuration(path: &Path) -> Result<Configuration> {
    configuration_from_str(&std::fs::read_to_string(path)?)
}

/// Render serializable rows as CSV with the given header.  Fields come from
/// `serde_json` flattening of each row struct in declaration order, so the
/// header must match the struct.
pub fn rows_to_csv<T: serde::Serialize>(header: &str, rows: &[T]) -> Result<String> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    let ncols = header.split(',').count();
    for r in rows {
        let v = serde_json::to_value(r).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("CSV rows must be structs".into()))?;
        let mut first = true;
        let mut cols = 0;
        for name in header.split(',') {
            let cell = obj
                .get(name.trim())
                .ok_or_else(|| Error::Parse(format!("row missing field {name}")))?;
            if !first {
                out.push(',');
            }
            first = false;
            cols += 1;
            match cell {
                serde_json::Value::String(s) => out.push_str(s),
                other => {
                    let _ = write!(out, "{other}");
                }
            }
        }
        if cols != ncols {
            return Err(Error::Parse("column count mismatch".into()));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Branching values as CSV (x, y, z, f), sorted by grid index.
pub fn branching_to_csv(f: &crate::branching::BranchingFunction) -> String {
    let mut keys: Vec<_> = f.values.keys().copied().collect();
    keys.sort();
    let step = f.step();
    let mut out = String::from("x,y,z,f\n");
    for (ix, iy, iz) in keys {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?}",
            ix as f64 * step,
            iy as f64 * step,
            iz as f64 * step,
            f.values[&(ix, iy, iz)]
        );
    }
    out
}
