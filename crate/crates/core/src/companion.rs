//! Phase-plane analysis of `d/dt(cos x/(1 − ẋ)) = +sin x`.
//!
//! The field is `ẍ = tan x · (1 − ẋ)` and `(1 − ẋ) e^ẋ = c cos x` is conserved.
//! There is no explicit solution, so orbits are obtained as level curves of
//! `f(v) = (1 − v) e^v` against `c cos x`, or by integration.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::closed_form::is_singular_position;
use crate::consts::{EPS_REG, BRANCH_SOLVE};
use crate::error::{Error, Result};
use crate::numeric::{trace_field, State, Watch};
use crate::series::{EventKind, TimeSeries};

/// `f(v) = (1 − v) e^v`; maximum 1 at `v = 0`.
pub fn level_function(v: f64) -> f64 {
    (1.0 - v) * v.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelBranch {
    /// `v ≤ 0`.
    Lower,
    /// `v ≥ 0`.
    Upper,
}

impl LevelBranch {
    fn name(self) -> &'static str {
        match self {
            LevelBranch::Lower => "lower",
            LevelBranch::Upper => "upper",
        }
    }
}

/// Closed interval of positions with flags for which ends belong to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionLevel {
    pub c: f64,
    /// Components of `{x : c cos x ∈ (0, 1]}` in the principal cell
    /// `(−π/2, π/2)`; translates by `2π` repeat them.
    pub x_domain: Vec<Component>,
}

impl CompanionLevel {
    /// Level of the invariant line `ẋ = 1`.
    pub fn is_degenerate(&self) -> bool {
        self.c == 0.0
    }

    pub fn from_constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite { name: "c", value: c });
        }
        Ok(CompanionLevel { c, x_domain: principal_domain(c) })
    }

    /// Conserved-quantity residual of the state `(x, v)` on this level.
    pub fn residual(&self, x: f64, v: f64) -> f64 {
        level_function(v) - self.c * x.cos()
    }
}

fn principal_domain(c: f64) -> Vec<Component> {
    if c <= 0.0 {
        Vec::new()
    } else if c < 1.0 {
        vec![Component { lo: -FRAC_PI_2, hi: FRAC_PI_2, lo_closed: false, hi_closed: false }]
    } else {
        let edge = (1.0 / c).acos();
        vec![
            Component { lo: -FRAC_PI_2, hi: -edge, lo_closed: false, hi_closed: true },
            Component { lo: edge, hi: FRAC_PI_2, lo_closed: true, hi_closed: false },
        ]
    }
}

/// `c = (1 − b) e^b / cos a`.
pub fn companion_level(a: f64, b: f64) -> Result<CompanionLevel> {
    if !a.is_finite() {
        return Err(Error::NonFinite { name: "a", value: a });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite { name: "b", value: b });
    }
    if is_singular_position(a) {
        return Err(Error::SingularPosition { a });
    }
    CompanionLevel::from_constant(level_function(b) / a.cos())
}

/// Solve `(1 − v) e^v = y` on one branch.
pub fn solve_branch(y: f64, branch: LevelBranch) -> Result<f64> {
    let out_of_range = || Error::OutOfRange { y, branch: branch.name() };
    if !y.is_finite() || y > 1.0 {
        return Err(out_of_range());
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    // f is increasing on the lower bracket and decreasing on the upper one;
    // orient both so that `inside(v)` means f(v) > y on the 0 side.
    let (mut near, mut far) = match branch {
        LevelBranch::Lower => {
            if y <= 0.0 {
                return Err(out_of_range());
            }
            let mut v = -1.0;
            while level_function(v) >= y {
                v *= 2.0;
            }
            (0.0, v)
        }
        LevelBranch::Upper => {
            let mut v = 1.0;
            while level_function(v) >= y {
                v *= 2.0;
                if v > 1e3 {
                    return Err(out_of_range());
                }
            }
            (0.0, v)
        }
    };
    while (far - near).abs() > 1e-8 {
        let mid = 0.5 * (near + far);
        if level_function(mid) >= y {
            near = mid;
        } else {
            far = mid;
        }
    }
    let mut v = 0.5 * (near + far);
    for _ in 0..5 {
        let r = level_function(v) - y;
        if r.abs() <= 0.25 * BRANCH_SOLVE * y.abs().max(1.0) {
            break;
        }
        let slope = -v * v.exp();
        if slope == 0.0 {
            break;
        }
        let next = v - r / slope;
        let inside = if near < far { near..=far } else { far..=near };
        if !inside.contains(&next) {
            break;
        }
        v = next;
    }
    // Newton stalls where f' vanishes (y → 1); finish by bisection there.
    while (level_function(v) - y).abs() > 0.25 * BRANCH_SOLVE * y.abs().max(1.0) {
        let mid = 0.5 * (near + far);
        if mid == near || mid == far {
            break;
        }
        if level_function(mid) >= y {
            near = mid;
        } else {
            far = mid;
        }
        v = 0.5 * (near + far);
    }
    Ok(v)
}

/// `ẍ = tan x · (1 − ẋ)`.
pub fn companion_rhs(x: f64, v: f64) -> Result<f64> {
    if is_singular_position(x) {
        return Err(Error::SingularPosition { a: x });
    }
    Ok(x.tan() * (1.0 - v))
}

/// Companion field that stays finite where the level crosses `ẋ = 1` at
/// `cos x = 0`: there `(1 − v) = c cos x · e^(−v)`, so `ẍ = c sin x · e^(−v)`.
pub fn companion_rhs_regularized(x: f64, v: f64, c: f64) -> f64 {
    let (s, cos_x) = x.sin_cos();
    if cos_x.abs() >= EPS_REG {
        s / cos_x * (1.0 - v)
    } else {
        c * s * (-v).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelPoint {
    pub x: f64,
    pub v: f64,
    pub branch: LevelBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub points: Vec<LevelPoint>,
    pub level: CompanionLevel,
}

impl LevelCurve {
    /// Polylines for drawing: each branch of each traced component.
    pub fn polylines(&self) -> Vec<Vec<(f64, f64)>> {
        let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut prev: Option<(LevelBranch, f64)> = None;
        for p in &self.points {
            let start_new = match prev {
                None => true,
                Some((b, x)) => b != p.branch || p.x < x,
            };
            if start_new {
                lines.push(Vec::new());
            }
            lines.last_mut().expect("pushed above").push((p.x, p.v));
            prev = Some((p.branch, p.x));
        }
        lines
    }
}

/// Trace the level curve over the principal cell, `n` points per branch and
/// component.
pub fn trace_level(level: &CompanionLevel, n: usize) -> Result<LevelCurve> {
    trace_level_cells(level, n, 0, 0)
}

/// Trace the level over the cells `(kπ − π/2, kπ + π/2)` for even
/// `k ∈ [2·cell_lo, 2·cell_hi]`; odd cells have `c cos x < 0` and carry no
/// part of the curve.
pub fn trace_level_cells(level: &CompanionLevel, n: usize, cell_lo: i64, cell_hi: i64) -> Result<LevelCurve> {
    if level.is_degenerate() {
        return Err(Error::DegenerateLevel);
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points per branch, got {n}")));
    }
    if level.x_domain.is_empty() || cell_lo > cell_hi {
        return Err(Error::EmptyCurve(level.c));
    }
    let mut points = Vec::new();
    for cell in cell_lo..=cell_hi {
        let shift = 2.0 * PI * cell as f64;
        for comp in &level.x_domain {
            let xs = component_grid(comp, n);
            for branch in [LevelBranch::Lower, LevelBranch::Upper] {
                for &x in &xs {
                    let y = (level.c * x.cos()).min(1.0);
                    let v = solve_branch(y, branch)?;
                    points.push(LevelPoint { x: x + shift, v, branch });
                }
            }
        }
    }
    Ok(LevelCurve { points, level: level.clone() })
}

fn component_grid(comp: &Component, n: usize) -> Vec<f64> {
    let width = comp.hi - comp.lo;
    match (comp.lo_closed, comp.hi_closed) {
        (true, true) => (0..n).map(|k| comp.lo + width * k as f64 / (n - 1) as f64).collect(),
        (true, false) => (0..n).map(|k| comp.lo + width * k as f64 / n as f64).collect(),
        (false, true) => (0..n).map(|k| comp.lo + width * (k + 1) as f64 / n as f64).collect(),
        (false, false) => (0..n).map(|k| comp.lo + width * (k + 1) as f64 / (n + 1) as f64).collect(),
    }
}

/// Integrate the companion equation from `(a, b)` placed at `t0`.
///
/// The recorded residual is `(1 − v) e^v − c cos x`; turning points `ẋ = 0`
/// are logged as events.
pub fn companion_integrate(a: f64, b: f64, t0: f64, t1: f64, tol: f64) -> Result<TimeSeries> {
    let level = companion_level(a, b)?;
    let c = level.c;
    let turning_g = |y: State| y[1];
    let turning_snap = |y: State| [y[0], 0.0];
    crate::numeric::check_span(t0, t1, tol)?;
    trace_field(
        |y| [y[1], c * y[0].sin() * (-y[1]).exp()],
        [a, b],
        t0,
        t1,
        tol,
        Some(Watch { kind: EventKind::TurningPoint, g: &turning_g, snap: &turning_snap }),
        move |y: State| level_function(y[1]) - c * y[0].cos(),
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn level_examples() {
        assert_eq!(companion_level(0.0, 0.0).unwrap().c, 1.0);
        let degenerate = companion_level(0.0, 1.0).unwrap();
        assert_eq!(degenerate.c, 0.0);
        assert!(degenerate.is_degenerate());
        assert!((companion_level(FRAC_PI_3, 0.0).unwrap().c - 2.0).abs() < 1e-14);
        assert!(matches!(companion_level(FRAC_PI_2, 0.0), Err(Error::SingularPosition { .. })));
    }

    #[test]
    fn branch_examples() {
        assert_eq!(solve_branch(1.0, LevelBranch::Lower).unwrap(), 0.0);
        assert_eq!(solve_branch(1.0, LevelBranch::Upper).unwrap(), 0.0);
        assert!((solve_branch(0.0, LevelBranch::Upper).unwrap() - 1.0).abs() < 1e-12);
        assert!((solve_branch(2.0 / E, LevelBranch::Lower).unwrap() + 1.0).abs() < 1e-10);
        assert!(solve_branch(0.0, LevelBranch::Lower).is_err());
        assert!(solve_branch(1.5, LevelBranch::Upper).is_err());
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(companion_rhs(0.0, 7.0).unwrap(), 0.0);
        assert!((companion_rhs(FRAC_PI_4, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(companion_rhs(FRAC_PI_4, 1.0).unwrap(), 0.0);
        assert!(companion_rhs(-FRAC_PI_2, 0.0).is_err());
    }

    #[test]
    fn trace_examples() {
        let one = trace_level(&CompanionLevel::from_constant(1.0).unwrap(), 50).unwrap();
        let at_origin: Vec<_> = one.points.iter().filter(|p| p.x == 0.0).collect();
        assert_eq!(at_origin.len(), 4);
        assert!(at_origin.iter().all(|p| p.v == 0.0));

        let two = trace_level(&CompanionLevel::from_constant(2.0).unwrap(), 50).unwrap();
        let edge: Vec<_> = two.points.iter().filter(|p| (p.x - FRAC_PI_3).abs() < 1e-15).collect();
        assert!(!edge.is_empty());
        assert!(edge.iter().all(|p| p.v.abs() < 1e-7));

        let half = CompanionLevel::from_constant(0.5).unwrap();
        assert_eq!(half.x_domain.len(), 1);
        let curve = trace_level(&half, 40).unwrap();
        assert!(curve.points.iter().all(|p| p.x.abs() < FRAC_PI_2));

        for curve in [one, two, curve] {
            for p in &curve.points {
                assert!(curve.level.residual(p.x, p.v).abs() <= 1e-10, "{p:?}");
            }
        }
        assert!(matches!(
            trace_level(&CompanionLevel::from_constant(-1.0).unwrap(), 10),
            Err(Error::EmptyCurve(_))
        ));
        assert!(matches!(
            trace_level(&CompanionLevel::from_constant(0.0).unwrap(), 10),
            Err(Error::DegenerateLevel)
        ));
    }

    #[test]
    fn integrate_examples() {
        let ts = companion_integrate(0.3, 0.0, 0.0, 5.0, 1e-10).unwrap();
        assert!(ts.max_abs_residual() <= 1e-7);

        let line = companion_integrate(0.1, 1.0, 0.0, 3.0, 1e-10).unwrap();
        for s in line.samples() {
            assert_eq!(s.v, 1.0);
            assert!((s.x - 0.1 - s.t).abs() < 1e-12);
        }

        let rest = companion_integrate(0.0, 0.0, 0.0, 2.0, 1e-10).unwrap();
        assert!(rest.samples().iter().all(|s| s.x == 0.0 && s.v == 0.0));
    }
}
