//! Parametric sampling of orbits and their CSV / SVG renderings.

mod csv;
mod svg;

use std::f64::consts::{PI, TAU};

pub use self::csv::{emit_csv, emit_level_csv, parse_csv, HEADER, LEVEL_HEADER};
pub use self::svg::{emit_svg, emit_svg_curves};

use crate::closed_form::{InitialData, OrbitClass, OrbitParams};
use crate::companion::CompanionLevel;
use crate::energy::energy_residual;
use crate::error::{Error, Result};
use crate::series::{Sample, SeriesMeta, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitSpec {
    Main(InitialData),
    Companion(CompanionLevel),
}

/// Dashed reference lines drawn behind the orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guides {
    /// `ẋ = 1/2`.
    pub half: bool,
    /// `ẋ = 1`.
    pub interface: bool,
    /// Velocity bounds of every orbit with `c > 0`.
    pub strip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub x_range: (f64, f64),
    pub v_range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitSpec {
    pub orbits: Vec<OrbitSpec>,
    pub t_span: (f64, f64),
    pub samples_per_orbit: usize,
    pub guides: Guides,
    pub canvas: Canvas,
    /// Drop samples outside the canvas instead of failing.
    pub clip: bool,
}

impl PortraitSpec {
    pub fn validate(&self) -> Result<()> {
        let (t0, t1) = self.t_span;
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.samples_per_orbit < 2 {
            return bad(format!("samples_per_orbit = {} < 2", self.samples_per_orbit));
        }
        if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
            return bad(format!("empty time span [{t0}, {t1}]"));
        }
        let (x0, x1) = self.canvas.x_range;
        let (v0, v1) = self.canvas.v_range;
        if !(x0 < x1 && v0 < v1) || self.canvas.width == 0 || self.canvas.height == 0 {
            return bad("empty canvas".to_string());
        }
        Ok(())
    }

    /// Two closed orbits around the origin: `a = 0`, `b ∈ {1/4, −2/5}`.
    pub fn figure_one() -> Self {
        PortraitSpec {
            orbits: vec![main_orbit(0.25), main_orbit(-0.4)],
            t_span: (0.0, TAU),
            samples_per_orbit: 1000,
            guides: Guides { half: true, interface: false, strip: false },
            canvas: Canvas { width: 640, height: 480, x_range: (-0.5, 0.5), v_range: (-0.6, 0.6) },
            clip: false,
        }
    }

    /// Two running orbits on the level `c = 8`: `a = 0`, `b ∈ {3/4, 3/2}`,
    /// over two velocity periods.
    pub fn figure_two() -> Self {
        PortraitSpec {
            orbits: vec![main_orbit(0.75), main_orbit(1.5)],
            t_span: (0.0, 2.0 * TAU),
            samples_per_orbit: 1000,
            guides: Guides { half: true, interface: true, strip: true },
            canvas: Canvas { width: 640, height: 480, x_range: (-0.25, 4.0 * PI + 0.25), v_range: (0.4, 1.7) },
            clip: false,
        }
    }
}

fn main_orbit(b: f64) -> OrbitSpec {
    OrbitSpec::Main(InitialData { a: 0.0, b, shift_n: 0 })
}

/// Evaluate the closed form on a uniform grid over `spec.t_span`.
///
/// Generic orbits also get the velocity extremes and (when unbounded) the
/// crossing times inserted, so the sampled curve attains its true bounds.
/// Positions are in the frame of the raw initial data.
pub fn sample_orbit(p: &OrbitParams, spec: &PortraitSpec) -> Result<TimeSeries> {
    spec.validate()?;
    if let OrbitClass::Equilibrium(_) = p.class() {
        return Err(Error::NotApplicable { op: "sample_orbit", class: p.class() });
    }
    let (t0, t1) = spec.t_span;
    let n = spec.samples_per_orbit;
    let mut times: Vec<f64> =
        (0..n).map(|i| if i == n - 1 { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect();
    times.extend(p.extremal_times(t0, t1));
    if p.class() == OrbitClass::Unbounded {
        let j_lo = (t0 / PI).floor() as i64 - 2;
        let j_hi = (t1 / PI).ceil() as i64 + 2;
        times.extend(p.crossing_times(j_lo, j_hi)?.into_iter().filter(|t| (t0..=t1).contains(t)));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();

    let c = p.energy();
    let offset = p.init().offset();
    let samples = times
        .into_iter()
        .map(|t| {
            let x = p.x(t);
            let v = p.xdot(t);
            Sample { t, x: x + offset, v, residual: energy_residual(x, v, c) }
        })
        .collect();
    TimeSeries::new(samples, SeriesMeta::closed_form())
}

/// The single state of a rest point.
pub fn equilibrium_series(p: &OrbitParams, t: f64) -> Result<TimeSeries> {
    match p.class() {
        OrbitClass::Equilibrium(n) => TimeSeries::new(
            vec![Sample { t, x: n as f64 * PI, v: 0.0, residual: 0.0 }],
            SeriesMeta::closed_form(),
        ),
        class => Err(Error::NotApplicable { op: "equilibrium_series", class }),
    }
}

/// Sample every main-equation orbit of the spec; rest points give one sample.
pub fn sample_all(spec: &PortraitSpec) -> Result<Vec<TimeSeries>> {
    spec.orbits
        .iter()
        .filter_map(|o| match o {
            OrbitSpec::Main(init) => Some(init),
            OrbitSpec::Companion(_) => None,
        })
        .map(|init| {
            let p = crate::closed_form::derive_params(*init)?;
            match p.class() {
                OrbitClass::Equilibrium(_) => equilibrium_series(&p, spec.t_span.0),
                _ => sample_orbit(&p, spec),
            }
        })
        .collect()
}
