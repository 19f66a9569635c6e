//! Independent numerical checks of the closed form: an adaptive integrator
//! with singularity-aware fields, a finite-difference residual of the
//! original equation, quadrature of the mean velocity and linearization at
//! the rest points.

pub mod dopri;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::closed_form::{derive_params, is_singular_position, InitialData, OrbitClass, OrbitParams};
use crate::companion::companion_rhs;
use crate::consts::{EPS_REG, EVENT_TIME, INTEGRATOR_TOL_MAX, INTEGRATOR_TOL_MIN};
use crate::energy::energy_residual;
use crate::error::{Error, Result};
use crate::series::{Event, EventKind, Sample, SeriesMeta, TimeSeries};

pub use dopri::{DenseStep, Dopri5, State};

/// `ẍ = tan x · (1 − ẋ)(2ẋ − 1)`.
pub fn rhs(x: f64, v: f64) -> Result<f64> {
    if is_singular_position(x) {
        return Err(Error::SingularPosition { a: x });
    }
    Ok(raw_rhs(x, v))
}

fn raw_rhs(x: f64, v: f64) -> f64 {
    x.tan() * (1.0 - v) * (2.0 * v - 1.0)
}

/// Acceleration that stays finite at the crossings of level `c > 0`.
///
/// Within `|cos x| < ε` the factor `(1 − v)/cos x` is replaced by
/// `±√((2v − 1)/c)`, which is what the energy relation gives it on the level.
/// The sign is read off the state; at `v = 1` it defaults to `+`.
pub fn rhs_regularized(x: f64, v: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidLevel(c));
    }
    Ok(regularized(x, v, c))
}

fn regularized(x: f64, v: f64, c: f64) -> f64 {
    if x.cos().abs() >= EPS_REG {
        raw_rhs(x, v)
    } else {
        band_formula(x, v, c)
    }
}

fn band_formula(x: f64, v: f64, c: f64) -> f64 {
    let (s, cos_x) = x.sin_cos();
    let lift = (2.0 * v - 1.0).max(0.0);
    let ratio_sign = if (1.0 - v) * cos_x < 0.0 { -1.0 } else { 1.0 };
    ratio_sign * s * (lift / c).sqrt() * lift
}

/// The field with `(1 − v)/cos x` replaced by `sign·√((2v − 1)/c)` everywhere.
///
/// `sign` is the constant sign of `(1 − v)/cos x` along the orbit. The field
/// agrees with [`rhs`] on the level `c` and keeps
/// `sign·(v − 1)/√(2v − 1) + cos x/√c` exactly invariant for every state, so
/// integration error is not amplified by `1/cos x` after a crossing.
pub(crate) fn level_field(x: f64, v: f64, c: f64, sign: f64) -> f64 {
    let lift = (2.0 * v - 1.0).max(0.0);
    sign * x.sin() * (lift / c).sqrt() * lift
}

pub(crate) fn check_span(t0: f64, t1: f64, tol: f64) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::InvalidArgument(format!("need finite t0 < t1, got [{t0}, {t1}]")));
    }
    if !(INTEGRATOR_TOL_MIN..=INTEGRATOR_TOL_MAX).contains(&tol) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} outside [{INTEGRATOR_TOL_MIN}, {INTEGRATOR_TOL_MAX}]"
        )));
    }
    Ok(())
}

/// A sign-change event watched during integration.
pub(crate) struct Watch<'a> {
    pub kind: EventKind,
    pub g: &'a dyn Fn(State) -> f64,
    /// Exact state recorded at the located event.
    pub snap: &'a dyn Fn(State) -> State,
}

fn locate(step: &DenseStep, g: &dyn Fn(State) -> f64) -> f64 {
    let (mut lo, mut hi) = (step.t0, step.t1());
    let g_lo = g(step.y0);
    while hi - lo > EVENT_TIME {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(step.eval(mid)) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of linear pieces per step so that chord error stays below `10·tol`.
fn subdivisions(step: &DenseStep, tol: f64) -> usize {
    let (f0, f1) = (step.f0(), step.f1());
    let curvature = f0[1]
        .abs()
        .max(f1[1].abs())
        .max(((f1[1] - f0[1]) / step.h).abs())
        .max(1e-12);
    let h_max = (80.0 * tol / curvature).sqrt();
    ((step.h / h_max).ceil() as usize).clamp(1, 100_000)
}

/// Run the adaptive integrator and record a dense, event-annotated series.
pub(crate) fn trace_field<F, R>(
    field: F,
    y0: State,
    t0: f64,
    t1: f64,
    tol: f64,
    watch: Option<Watch<'_>>,
    residual: R,
    x_offset: f64,
) -> Result<TimeSeries>
where
    F: FnMut(State) -> State,
    R: Fn(State) -> f64,
{
    let mut meta = SeriesMeta::integrator(tol);
    let sample = |t: f64, y: State| Sample { t, x: y[0] + x_offset, v: y[1], residual: residual(y) };
    let mut samples = vec![sample(t0, y0)];
    let mut events = Vec::new();

    Dopri5::new(tol).run(field, t0, y0, t1, |step| {
        let mut pending: Option<(f64, State)> = None;
        if let Some(w) = &watch {
            let (g0, g1) = ((w.g)(step.y0), (w.g)(step.y1));
            if g0 != 0.0 && (g0 > 0.0) != (g1 > 0.0) {
                let te = locate(step, w.g);
                let ye = (w.snap)(step.eval(te));
                events.push(Event { kind: w.kind, t: te, x: ye[0] + x_offset, v: ye[1] });
                pending = Some((te, ye));
            }
        }
        let m = subdivisions(step, tol);
        for i in 1..=m {
            let t = if i == m { step.t1() } else { step.t0 + step.h * i as f64 / m as f64 };
            if let Some((te, ye)) = pending {
                if te <= t {
                    if te > samples.last().map_or(f64::NEG_INFINITY, |s: &Sample| s.t) && te < t {
                        samples.push(Sample { t: te, x: ye[0] + x_offset, v: ye[1], residual: residual(ye) });
                    }
                    pending = None;
                }
            }
            let y = if i == m { step.y1 } else { step.eval(t) };
            samples.push(sample(t, y));
        }
    })?;

    meta.events = events;
    TimeSeries::new(samples, meta)
}

/// Integrate the orbit through `init`, with the initial state placed at `t0`.
///
/// Orbits above the line `ẋ = 1/2` use the regularized field and record each
/// pass through `ẋ = 1`; closed orbits record their turning points `ẋ = 0`.
/// Positions are reported in the frame of the raw initial data.
pub fn integrate(init: &InitialData, t0: f64, t1: f64, tol: f64) -> Result<TimeSeries> {
    check_span(t0, t1, tol)?;
    let params = derive_params(*init)?;
    let c = params.energy();
    let sign = ((1.0 - init.b) / init.a.cos()).signum();
    let y0 = [init.a, init.b];
    let residual = move |y: State| energy_residual(y[0], y[1], c);

    let crossing_g = |y: State| y[1] - 1.0;
    let crossing_snap = |y: State| {
        let k = ((y[0] - FRAC_PI_2) / PI).round();
        [k * PI + FRAC_PI_2, 1.0]
    };
    let turning_g = |y: State| y[1];
    let turning_snap = |y: State| [y[0], 0.0];

    match params.class() {
        OrbitClass::Unbounded => trace_field(
            |y| [y[1], level_field(y[0], y[1], c, sign)],
            y0,
            t0,
            t1,
            tol,
            Some(Watch { kind: EventKind::InterfaceCrossing, g: &crossing_g, snap: &crossing_snap }),
            residual,
            init.offset(),
        ),
        OrbitClass::Periodic => trace_field(
            |y| [y[1], raw_rhs(y[0], y[1])],
            y0,
            t0,
            t1,
            tol,
            Some(Watch { kind: EventKind::TurningPoint, g: &turning_g, snap: &turning_snap }),
            residual,
            init.offset(),
        ),
        OrbitClass::LineOrbit | OrbitClass::Equilibrium(_) => trace_field(
            |y| [y[1], raw_rhs(y[0], y[1])],
            y0,
            t0,
            t1,
            tol,
            None,
            residual,
            init.offset(),
        ),
    }
}

/// `|d/dt[cos x/(1 − ẋ)] + sin x|` along the closed form, by central
/// differences with step `h`.
pub fn fd_equation_residual(p: &OrbitParams, t: f64, h: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} outside [1e-7, 1e-3]")));
    }
    if let Some(crossing) = p.nearest_crossing(t) {
        if (t - crossing).abs() < 3.0 * h {
            return Err(Error::TooCloseToCrossing { t, h, crossing });
        }
    }
    let flux = |s: f64| p.x(s).cos() / (1.0 - p.xdot(s));
    let derivative = (flux(t + h) - flux(t - h)) / (2.0 * h);
    Ok((derivative + p.x(t).sin()).abs())
}

/// Average of `ẋ` over one period by adaptive composite Simpson.
///
/// The period is anchored at the velocity extreme with the smallest
/// denominator, so a sharp spike sits at the panel ends where refinement
/// concentrates.
pub fn mean_xdot_quadrature(p: &OrbitParams) -> Result<f64> {
    if !matches!(p.class(), OrbitClass::Periodic | OrbitClass::Unbounded) {
        return Err(Error::NotApplicable { op: "mean_xdot_quadrature", class: p.class() });
    }
    let candidates = [-p.phase(), PI - p.phase()];
    let start = if p.velocity_denominator(candidates[0]) <= p.velocity_denominator(candidates[1]) {
        candidates[0]
    } else {
        candidates[1]
    };
    let f = |t: f64| p.xdot(t);
    let panels = 64;
    let width = TAU / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = start + width * k as f64;
        let b = a + width;
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = simpson(a, b, fa, fm, fb);
        total += adaptive_simpson(&f, a, b, fa, fm, fb, whole, 48);
    }
    Ok(total / TAU)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let tol = 1e-13 * (b - a) + 1e-14 * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, depth - 1) + adaptive_simpson(f, m, b, fm, frm, fb, right, depth - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// `d/dt(cos x/(1 − ẋ)) = −sin x`.
    Main,
    /// `d/dt(cos x/(1 − ẋ)) = +sin x`.
    Companion,
}

impl System {
    fn acceleration(self, x: f64, v: f64) -> f64 {
        match self {
            System::Main => raw_rhs(x, v),
            System::Companion => companion_rhs(x, v).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    /// Purely imaginary pair: linearly stable, not asymptotically.
    Center,
    /// Real pair of opposite signs.
    Saddle,
    Node,
    Focus,
    Degenerate,
}

impl EquilibriumKind {
    /// Classification of a conjugate or real eigenvalue pair.
    pub fn from_eigenvalues(pair: [Eigenvalue; 2], tol: f64) -> Self {
        let [l1, l2] = pair;
        let complex = l1.im.abs() > tol;
        if complex {
            if l1.re.abs() <= tol {
                EquilibriumKind::Center
            } else {
                EquilibriumKind::Focus
            }
        } else if l1.re.abs() <= tol || l2.re.abs() <= tol {
            EquilibriumKind::Degenerate
        } else if (l1.re > 0.0) != (l2.re > 0.0) {
            EquilibriumKind::Saddle
        } else {
            EquilibriumKind::Node
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub n: i64,
    /// Rest point `(nπ, 0)`.
    pub point: (f64, f64),
    /// Jacobian of the planar field, row-major.
    pub jacobian: [[f64; 2]; 2],
    pub eigenvalues: [Eigenvalue; 2],
    pub kind: EquilibriumKind,
}

/// Linearize `system` at `(nπ, 0)` with a central-difference Jacobian.
pub fn linearize(n: i64, system: System) -> EquilibriumReport {
    let x0 = n as f64 * PI;
    let d = 1e-6;
    let field = |x: f64, v: f64| [v, system.acceleration(x, v)];
    let (xp, xm) = (field(x0 + d, 0.0), field(x0 - d, 0.0));
    let (vp, vm) = (field(x0, d), field(x0, -d));
    let jacobian = [
        [(xp[0] - xm[0]) / (2.0 * d), (vp[0] - vm[0]) / (2.0 * d)],
        [(xp[1] - xm[1]) / (2.0 * d), (vp[1] - vm[1]) / (2.0 * d)],
    ];
    let eigenvalues = eigenvalues_2x2(jacobian);
    EquilibriumReport {
        n,
        point: (x0, 0.0),
        jacobian,
        eigenvalues,
        kind: EquilibriumKind::from_eigenvalues(eigenvalues, 1e-6),
    }
}

fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> [Eigenvalue; 2] {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_trace * half_trace - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        [Eigenvalue { re: half_trace + r, im: 0.0 }, Eigenvalue { re: half_trace - r, im: 0.0 }]
    } else {
        let r = (-disc).sqrt();
        [Eigenvalue { re: half_trace, im: r }, Eigenvalue { re: half_trace, im: -r }]
    }
}
