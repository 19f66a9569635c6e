use std::io::Write;

use crate::companion::{LevelBranch, LevelCurve};
use crate::error::{Error, Result};
use crate::series::{Sample, TimeSeries};

pub const HEADER: &str = "t,x,xdot,residual";
pub const LEVEL_HEADER: &str = "x,xdot,branch";

/// Write `t,x,xdot,residual` rows. Reals use the shortest decimal string
/// that parses back to the same `f64`.
pub fn emit_csv<W: Write + ?Sized>(series: &TimeSeries, sink: &mut W) -> Result<()> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = String::with_capacity(32 * (series.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for s in series.samples() {
        out.push_str(&format!("{},{},{},{}\n", s.t, s.x, s.v, s.residual));
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// Parse the output of [`emit_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<Sample>> {
    let mut lines = text.split('\n');
    match lines.next() {
        Some(HEADER) => {}
        other => {
            return Err(Error::Csv { line: 1, reason: format!("expected header {HEADER:?}, got {other:?}") })
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Csv { line: i + 2, reason: format!("expected 4 fields, got {}", fields.len()) });
        }
        let mut vals = [0.0; 4];
        for (slot, field) in vals.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|e| Error::Csv { line: i + 2, reason: format!("{field:?}: {e}") })?;
        }
        samples.push(Sample { t: vals[0], x: vals[1], v: vals[2], residual: vals[3] });
    }
    Ok(samples)
}

/// Write a companion level curve as `x,xdot,branch` rows.
pub fn emit_level_csv<W: Write + ?Sized>(curve: &LevelCurve, sink: &mut W) -> Result<()> {
    if curve.points.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = String::new();
    out.push_str(LEVEL_HEADER);
    out.push('\n');
    for p in &curve.points {
        let branch = match p.branch {
            LevelBranch::Lower => "lower",
            LevelBranch::Upper => "upper",
        };
        out.push_str(&format!("{},{},{}\n", p.x, p.v, branch));
    }
    sink.write_all(out.as_bytes())?;
    Ok(())
}
