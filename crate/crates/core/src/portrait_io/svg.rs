//! Standalone SVG 1.1 phase portraits using only `svg`, `line`, `polyline`
//! and `text` elements. Output depends only on the inputs.

use std::fmt::Write as _;
use std::io::Write;

use super::{OrbitSpec, PortraitSpec};
use crate::closed_form::derive_params;
use crate::companion::trace_level;
use crate::energy::level_bounds;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 52.0;
const TICKS: usize = 5;
const ORBIT_STROKE: f64 = 1.5;
const GUIDE_STROKE: f64 = 1.0;
const AXIS_COLOR: &str = "#000000";
const GUIDE_COLOR: &str = "#7f7f7f";
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x0: f64,
    x1: f64,
    v0: f64,
    v1: f64,
    left: f64,
    top: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn new(spec: &PortraitSpec) -> Self {
        let c = &spec.canvas;
        Frame {
            x0: c.x_range.0,
            x1: c.x_range.1,
            v0: c.v_range.0,
            v1: c.v_range.1,
            left: MARGIN_LEFT,
            top: MARGIN_TOP,
            w: c.width as f64 - MARGIN_LEFT - MARGIN_RIGHT,
            h: c.height as f64 - MARGIN_TOP - MARGIN_BOTTOM,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.w
    }

    fn py(&self, v: f64) -> f64 {
        self.top + (self.v1 - v) / (self.v1 - self.v0) * self.h
    }

    fn contains(&self, x: f64, v: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.v0..=self.v1).contains(&v)
    }

    fn bottom(&self) -> f64 {
        self.top + self.h
    }

    fn right(&self) -> f64 {
        self.left + self.w
    }
}

fn tick_label(value: f64) -> String {
    let s = format!("{value:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn line(out: &mut String, (x1, y1): (f64, f64), (x2, y2): (f64, f64), color: &str, width: f64, dashed: bool) {
    let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
    let _ = writeln!(
        out,
        "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>"
    );
}

fn text(out: &mut String, (x, y): (f64, f64), anchor: &str, body: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{anchor}\">{body}</text>"
    );
}

fn axes(out: &mut String, f: &Frame) {
    line(out, (f.left, f.bottom()), (f.right(), f.bottom()), AXIS_COLOR, 1.0, false);
    line(out, (f.left, f.top), (f.left, f.bottom()), AXIS_COLOR, 1.0, false);
    for i in 0..TICKS {
        let s = i as f64 / (TICKS - 1) as f64;
        let x = f.x0 + s * (f.x1 - f.x0);
        let px = f.px(x);
        line(out, (px, f.bottom()), (px, f.bottom() + 5.0), AXIS_COLOR, 1.0, false);
        text(out, (px, f.bottom() + 18.0), "middle", &tick_label(x));
        let v = f.v0 + s * (f.v1 - f.v0);
        let py = f.py(v);
        line(out, (f.left - 5.0, py), (f.left, py), AXIS_COLOR, 1.0, false);
        text(out, (f.left - 8.0, py + 4.0), "end", &tick_label(v));
    }
    text(out, (f.left + 0.5 * f.w, f.bottom() + 40.0), "middle", "x");
    text(out, (14.0, f.top + 0.5 * f.h), "start", "y = ẋ");
}

fn guide(out: &mut String, f: &Frame, v: f64, label: &str) {
    if !(f.v0..=f.v1).contains(&v) {
        return;
    }
    let py = f.py(v);
    line(out, (f.left, py), (f.right(), py), GUIDE_COLOR, GUIDE_STROKE, true);
    text(out, (f.right() - 4.0, py - 4.0), "end", label);
}

fn strip_bounds(spec: &PortraitSpec) -> Vec<f64> {
    let mut bounds = Vec::new();
    for orbit in &spec.orbits {
        if let OrbitSpec::Main(init) = orbit {
            if let Ok(p) = derive_params(*init) {
                if p.energy() > 0.0 {
                    if let Ok(level) = level_bounds(p.energy()) {
                        bounds.push(level.xdot_lo);
                        bounds.push(level.xdot_hi);
                    }
                }
            }
        }
    }
    bounds.sort_by(f64::total_cmp);
    bounds.dedup();
    bounds
}

/// Split a curve into runs that stay inside the frame.
fn visible_runs(f: &Frame, points: &[(f64, f64)], clip: bool) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut runs = vec![Vec::new()];
    for &(x, v) in points {
        if f.contains(x, v) {
            runs.last_mut().expect("non-empty").push((x, v));
        } else if clip {
            if !runs.last().expect("non-empty").is_empty() {
                runs.push(Vec::new());
            }
        } else {
            return Err(Error::OutOfCanvas { x, v });
        }
    }
    runs.retain(|r| !r.is_empty());
    Ok(runs)
}

/// Render a portrait of arbitrary phase-plane curves.
pub fn emit_svg_curves<W: Write>(spec: &PortraitSpec, curves: &[Vec<(f64, f64)>], sink: &mut W) -> Result<()> {
    spec.validate()?;
    let f = Frame::new(spec);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.canvas.width,
        h = spec.canvas.height
    );
    axes(&mut out, &f);
    if spec.guides.half {
        guide(&mut out, &f, 0.5, "ẋ = 1/2");
    }
    if spec.guides.interface {
        guide(&mut out, &f, 1.0, "ẋ = 1");
    }
    if spec.guides.strip {
        for v in strip_bounds(spec) {
            guide(&mut out, &f, v, &tick_label(v));
        }
    }
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for run in visible_runs(&f, curve, spec.clip)? {
            let mut pts = String::new();
            for (k, &(x, v)) in run.iter().enumerate() {
                if k > 0 {
                    pts.push(' ');
                }
                let _ = write!(pts, "{:.2},{:.2}", f.px(x), f.py(v));
            }
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{ORBIT_STROKE}\" points=\"{pts}\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    sink.write_all(out.as_bytes())?;
    Ok(())
}

/// Render the sampled main-equation orbits plus any companion levels listed
/// in the spec.
pub fn emit_svg<W: Write>(spec: &PortraitSpec, orbits: &[TimeSeries], sink: &mut W) -> Result<()> {
    let mut curves: Vec<Vec<(f64, f64)>> = orbits.iter().map(TimeSeries::phase_points).collect();
    for orbit in &spec.orbits {
        if let OrbitSpec::Companion(level) = orbit {
            curves.extend(trace_level(level, spec.samples_per_orbit)?.polylines());
        }
    }
    emit_svg_curves(spec, &curves, sink)
}
