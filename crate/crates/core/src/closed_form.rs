//! Explicit solutions of `d/dt(cos x / (1 − ẋ)) = −sin x`.
//!
//! Initial data `(a, b)` is first reduced by the π-translation symmetry to
//! `|a| < π/2`, then mapped to the constants of the trigonometric closed form:
//!
//! ```text
//! A = sin 2a,   B = 2b − 1 + cos 2a,   c = (2b − 1) cos²a / (1 − b)²
//! tan x(t) = (A cos t + B sin t) / (2(1 − b) + B cos t − A sin t)
//! ```
//!
//! The velocity is `1/2 + 2(2b − 1) cos²a / D(t)` where `D(t)` is a sum of two
//! squares, and the position is `a + t/2 ± (ψ(t) − ψ(0))` with `ψ` the
//! continuous antiderivative of `2|2b − 1| cos²a / D(t)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::consts::PSI_POLE;
use crate::error::{Error, Result};

/// Admissible initial pair after reduction by `x ↦ x − nπ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    /// Position, `|a| < π/2`.
    pub a: f64,
    /// Initial velocity `ẋ(0)`.
    pub b: f64,
    /// Number of π-translations removed from the raw position.
    pub shift_n: i64,
}

impl InitialData {
    /// Position before normalization.
    pub fn raw_a(&self) -> f64 {
        self.a + self.shift_n as f64 * PI
    }

    /// Offset to add to normalized positions to get back to the raw frame.
    pub fn offset(&self) -> f64 {
        self.shift_n as f64 * PI
    }
}

/// Reduce `a_raw` into `(−π/2, π/2)` by a whole number of half-turns.
pub fn normalize_initial(a_raw: f64, b: f64) -> Result<InitialData> {
    if !a_raw.is_finite() {
        return Err(Error::NonFinite { name: "a", value: a_raw });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite { name: "b", value: b });
    }
    if is_singular_position(a_raw) {
        return Err(Error::SingularPosition { a: a_raw });
    }
    if b == 1.0 {
        return Err(Error::ForbiddenVelocity);
    }
    let shift = (a_raw / PI).round();
    let a = a_raw - shift * PI;
    if a.abs() >= FRAC_PI_2 {
        return Err(Error::SingularPosition { a: a_raw });
    }
    Ok(InitialData { a, b, shift_n: shift as i64 })
}

/// `cos a = 0` up to the representation error of `a`.
pub(crate) fn is_singular_position(a: f64) -> bool {
    a.cos().abs() <= 2.0 * f64::EPSILON * a.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitClass {
    /// Rest point `(nπ, 0)`.
    Equilibrium(i64),
    /// The invariant line `ẋ = 1/2`.
    LineOrbit,
    /// Closed orbit around an equilibrium (`b < 1/2`).
    Periodic,
    /// Orbit oscillating around the interface `ẋ = 1` (`b > 1/2`).
    Unbounded,
}

impl OrbitClass {
    fn is_generic(self) -> bool {
        matches!(self, OrbitClass::Periodic | OrbitClass::Unbounded)
    }
}

/// Sign in front of `ψ` in the position formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Value of `tan x` on the projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projective {
    Finite(f64),
    Infinity,
}

impl Projective {
    pub fn finite(self) -> Option<f64> {
        match self {
            Projective::Finite(v) => Some(v),
            Projective::Infinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodInfo {
    pub velocity_period: f64,
    /// Average of `ẋ` over one velocity period: 0, 1 or 1/2.
    pub mean_velocity: f64,
    pub position_periodic: bool,
}

/// Constants of one orbit. Immutable once derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitParams {
    init: InitialData,
    coef_a: f64,
    coef_b: f64,
    energy: f64,
    radius: f64,
    phase: f64,
    branch: Option<Branch>,
    class: OrbitClass,
    // ψ(t) = atan2(slope·sin(t/2) − offset·cos(t/2), scale·cos(t/2)) on |t| < π
    psi_slope: f64,
    psi_offset: f64,
    psi_scale: f64,
    psi_zero: f64,
}

impl OrbitParams {
    /// Normalize and derive in one go.
    pub fn from_raw(a_raw: f64, b: f64) -> Result<Self> {
        derive_params(normalize_initial(a_raw, b)?)
    }

    pub fn init(&self) -> InitialData {
        self.init
    }

    pub fn a(&self) -> f64 {
        self.init.a
    }

    pub fn b(&self) -> f64 {
        self.init.b
    }

    /// `A = sin 2a`.
    pub fn coef_a(&self) -> f64 {
        self.coef_a
    }

    /// `B = 2b − 1 + cos 2a`.
    pub fn coef_b(&self) -> f64 {
        self.coef_b
    }

    /// Energy level `c`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `R = √(A² + B²)`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `φ` with `B cos t − A sin t = R cos(t + φ)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn branch(&self) -> Option<Branch> {
        self.branch
    }

    pub fn class(&self) -> OrbitClass {
        self.class
    }

    fn one_minus_b(&self) -> f64 {
        1.0 - self.init.b
    }

    /// `B cos t − A sin t`.
    fn trig_form(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        self.coef_b * c - self.coef_a * s
    }

    /// Denominator of the velocity formula, `(A cos t + B sin t)² + (2(1 − b) + B cos t − A sin t)²`.
    pub fn velocity_denominator(&self, t: f64) -> f64 {
        let k = self.one_minus_b();
        4.0 * k * k * self.reduced_denominator(t)
    }

    /// `D / 4(1 − b)²` as `(1 − r)² + 4r·cos²(θ/2)` (or `sin²` when `b > 1`),
    /// with `r = √(1 + c)` and `θ = t + φ`; free of cancellation near the spike.
    fn reduced_denominator(&self, t: f64) -> f64 {
        let r = (1.0 + self.energy).sqrt();
        let gap = self.energy / (1.0 + r);
        let half = 0.5 * (t + self.phase);
        let trig = if self.one_minus_b() > 0.0 { half.cos() } else { half.sin() };
        gap * gap + 4.0 * r * trig * trig
    }

    /// Velocity `ẋ(t)`. Line and rest orbits use their exact formulas.
    pub fn xdot(&self, t: f64) -> f64 {
        match self.class {
            OrbitClass::Equilibrium(_) => 0.0,
            OrbitClass::LineOrbit => 0.5,
            _ => 0.5 + 0.5 * self.energy / self.reduced_denominator(t),
        }
    }

    /// Position `x(t)` in the normalized frame (`x(0) = a`).
    pub fn x(&self, t: f64) -> f64 {
        match (self.class, self.branch) {
            (OrbitClass::Equilibrium(_), _) => self.init.a,
            (OrbitClass::LineOrbit, _) => self.init.a + 0.5 * t,
            (_, Some(branch)) => {
                self.init.a + 0.5 * t + branch.sign() * (self.psi_unchecked(t) - self.psi_zero)
            }
            (_, None) => unreachable!("generic orbits always carry a branch"),
        }
    }

    /// Position in the frame of the raw initial data.
    pub fn x_raw(&self, t: f64) -> f64 {
        self.x(t) + self.init.offset()
    }

    /// The continuous, increasing antiderivative `ψ`.
    pub fn psi(&self, t: f64) -> Result<f64> {
        self.require_generic("psi")?;
        Ok(self.psi_unchecked(t))
    }

    fn psi_unchecked(&self, t: f64) -> f64 {
        let n = ((t + PI) / TAU).floor();
        let r = t - n * TAU;
        n * PI + self.psi_principal(r)
    }

    fn psi_principal(&self, t: f64) -> f64 {
        if (t - PI).abs() <= PSI_POLE {
            return FRAC_PI_2;
        }
        if (t + PI).abs() <= PSI_POLE {
            return -FRAC_PI_2;
        }
        let (s, c) = (0.5 * t).sin_cos();
        (self.psi_slope * s - self.psi_offset * c).atan2(self.psi_scale * c)
    }

    /// `tan x(t)` from the rational trigonometric form.
    pub fn tan_x(&self, t: f64) -> Result<Projective> {
        self.require_generic("tan_x")?;
        let (s, c) = t.sin_cos();
        let num = self.coef_a * c + self.coef_b * s;
        let den = 2.0 * self.one_minus_b() + self.coef_b * c - self.coef_a * s;
        // The denominator only vanishes in exact arithmetic; treat rounding-level
        // values as the pole.
        let scale = 2.0 * self.one_minus_b().abs() + self.radius;
        if den.abs() <= 8.0 * f64::EPSILON * scale {
            Ok(Projective::Infinity)
        } else {
            Ok(Projective::Finite(num / den))
        }
    }

    /// The two crossing times in `(0, 2π]`, ascending.
    fn base_crossings(&self) -> Result<[f64; 2]> {
        if self.class != OrbitClass::Unbounded {
            return Err(Error::NotApplicable { op: "crossing_times", class: self.class });
        }
        let target = 2.0 * (self.init.b - 1.0);
        let spread = (target / self.radius).clamp(-1.0, 1.0).acos();
        let reduce = |t: f64| {
            let r = t.rem_euclid(TAU);
            if r == 0.0 {
                TAU
            } else {
                r
            }
        };
        let mut roots = [
            self.polish_crossing(reduce(-self.phase - spread)),
            self.polish_crossing(reduce(-self.phase + spread)),
        ];
        roots.sort_by(f64::total_cmp);
        Ok(roots)
    }

    fn polish_crossing(&self, t: f64) -> f64 {
        let g = self.trig_form(t) - 2.0 * (self.init.b - 1.0);
        let (s, c) = t.sin_cos();
        let dg = -self.coef_b * s - self.coef_a * c;
        if dg == 0.0 {
            t
        } else {
            t - g / dg
        }
    }

    /// Crossing times `t_j` for `j_min ≤ j ≤ j_max`, where `t_0` is the
    /// smallest positive root of `B cos t − A sin t = 2(b − 1)`.
    pub fn crossing_times(&self, j_min: i64, j_max: i64) -> Result<Vec<f64>> {
        let base = self.base_crossings()?;
        Ok((j_min..=j_max)
            .map(|j| base[j.rem_euclid(2) as usize] + TAU * j.div_euclid(2) as f64)
            .collect())
    }

    /// The crossing time closest to `t`, if the orbit has any.
    pub fn nearest_crossing(&self, t: f64) -> Option<f64> {
        let base = self.base_crossings().ok()?;
        base.iter()
            .map(|s| s + TAU * ((t - s) / TAU).round())
            .min_by(|p, q| (p - t).abs().total_cmp(&(q - t).abs()))
    }

    /// Times in `[t0, t1]` where the velocity attains its extremes.
    pub fn extremal_times(&self, t0: f64, t1: f64) -> Vec<f64> {
        if !self.class.is_generic() {
            return Vec::new();
        }
        // cos(t + φ) = ±1
        let first = ((t0 + self.phase) / PI).ceil() as i64;
        let last = ((t1 + self.phase) / PI).floor() as i64;
        (first..=last).map(|k| k as f64 * PI - self.phase).collect()
    }

    pub fn period_info(&self) -> Result<PeriodInfo> {
        match self.class {
            OrbitClass::Equilibrium(_) => {
                Err(Error::NotApplicable { op: "period_info", class: self.class })
            }
            OrbitClass::LineOrbit => Ok(PeriodInfo {
                velocity_period: TAU,
                mean_velocity: 0.5,
                position_periodic: false,
            }),
            OrbitClass::Periodic => Ok(PeriodInfo {
                velocity_period: TAU,
                mean_velocity: 0.0,
                position_periodic: true,
            }),
            OrbitClass::Unbounded => Ok(PeriodInfo {
                velocity_period: TAU,
                mean_velocity: 1.0,
                position_periodic: false,
            }),
        }
    }

    fn require_generic(&self, op: &'static str) -> Result<()> {
        if self.class.is_generic() {
            Ok(())
        } else {
            Err(Error::NotApplicable { op, class: self.class })
        }
    }
}

/// Orbit constants for normalized initial data.
pub fn derive_params(init: InitialData) -> Result<OrbitParams> {
    let InitialData { a, b, shift_n } = init;
    if b == 1.0 {
        return Err(Error::ForbiddenVelocity);
    }
    if a.abs() >= FRAC_PI_2 || !a.is_finite() || !b.is_finite() {
        return Err(Error::SingularPosition { a });
    }
    let (sin2a, cos2a) = (2.0 * a).sin_cos();
    let cos_a = a.cos();
    let cos2 = cos_a * cos_a;
    let coef_a = sin2a;
    let coef_b = 2.0 * b - 1.0 + cos2a;
    let one_minus_b = 1.0 - b;
    let energy = (2.0 * b - 1.0) * cos2 / (one_minus_b * one_minus_b);
    let radius = coef_a.hypot(coef_b);
    let phase = coef_a.atan2(coef_b);

    let (class, branch) = if a == 0.0 && b == 0.0 {
        (OrbitClass::Equilibrium(shift_n), None)
    } else if b == 0.5 {
        (OrbitClass::LineOrbit, None)
    } else if b < 0.5 {
        (OrbitClass::Periodic, Some(Branch::Minus))
    } else {
        (OrbitClass::Unbounded, Some(Branch::Plus))
    };

    let shifted = coef_b - 2.0 * one_minus_b;
    let mut params = OrbitParams {
        init,
        coef_a,
        coef_b,
        energy,
        radius,
        phase,
        branch,
        class,
        psi_slope: coef_a * coef_a + shifted * shifted,
        psi_offset: 4.0 * one_minus_b * coef_a,
        psi_scale: 4.0 * (2.0 * b - 1.0).abs() * cos2,
        psi_zero: 0.0,
    };
    if class.is_generic() {
        params.psi_zero = params.psi_principal(0.0);
    }
    Ok(params)
}

/// Parameters for `a = 0`, `b = ξ/(ξ + 1)`.
pub fn xi_params(xi: f64) -> Result<OrbitParams> {
    if !xi.is_finite() || xi == 0.0 || xi == 1.0 || xi == -1.0 {
        return Err(Error::InvalidXi(xi));
    }
    derive_params(InitialData { a: 0.0, b: xi / (xi + 1.0), shift_n: 0 })
}

/// Velocity of the `a = 0`, `b = ξ/(ξ + 1)` orbit in its reduced form.
pub fn xi_velocity(xi: f64, t: f64) -> f64 {
    let xi2 = xi * xi;
    0.5 * (1.0 + (xi2 - 1.0) / (xi2 + 2.0 * xi * t.cos() + 1.0))
}
