//! The invariant battery behind `singular-orbits verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use crate::closed_form::{OrbitClass, OrbitParams};
use crate::consts;
use crate::energy::energy_residual;
use crate::error::{Error, Result};
use crate::numeric::{fd_equation_residual, integrate, linearize, mean_xdot_quadrature, EquilibriumKind, System};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Worst observed deviation.
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, value: f64, threshold: f64) -> Self {
        CheckOutcome { name, value, threshold, passed: value <= threshold }
    }
}

#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub params: OrbitParams,
    pub tol: f64,
    pub checks: Vec<CheckOutcome>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "orbit a={} b={} class={:?} c={}",
            self.params.init().raw_a(),
            self.params.b(),
            self.params.class(),
            self.params.energy()
        );
        let _ = writeln!(out, "{:<26} {:>12} {:>12}  {}", "check", "value", "threshold", "verdict");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<26} {:>12.3e} {:>12.3e}  {}",
                c.name,
                c.value,
                c.threshold,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn grid(t0: f64, t1: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
}

/// Deviation of `x` from the nearest odd multiple of π/2.
pub fn odd_half_pi_gap(x: f64) -> f64 {
    let k = ((x - FRAC_PI_2) / PI).round();
    (x - (k * PI + FRAC_PI_2)).abs()
}

/// Run every applicable check for the orbit through `(a_raw, b)`.
///
/// `tol` is the integrator tolerance; thresholds are loosened in proportion
/// when it is coarser than the default and never tightened.
pub fn run_battery(a_raw: f64, b: f64, tol: f64) -> Result<BatteryReport> {
    if !(consts::INTEGRATOR_TOL_MIN..=consts::INTEGRATOR_TOL_MAX).contains(&tol) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} out of range")));
    }
    let p = OrbitParams::from_raw(a_raw, b)?;
    let scale = (tol / consts::INTEGRATOR_TOL).max(1.0);
    let c = p.energy();
    let energy_scale = c.abs().max(1.0);
    let mut checks = Vec::new();

    if let OrbitClass::Equilibrium(n) = p.class() {
        let report = linearize(n, System::Main);
        let gap = report.eigenvalues[0].re.abs() + (report.eigenvalues[0].im.abs() - 1.0).abs();
        let mut check = CheckOutcome::new("linearization (center)", gap, consts::EIGEN * scale);
        check.passed &= report.kind == EquilibriumKind::Center;
        checks.push(check);
        return Ok(BatteryReport { params: p, tol, checks });
    }

    let r2 = p.coef_a().powi(2) + p.coef_b().powi(2);
    let one_minus_b = 1.0 - p.b();
    let identity = (r2 - 4.0 * one_minus_b * one_minus_b * (1.0 + c)).abs() / r2.max(1.0);
    checks.push(CheckOutcome::new("identity A^2+B^2", identity, consts::IDENTITY_REL * scale));

    let energy = grid(0.0, 2.0 * TAU, 2000)
        .map(|t| energy_residual(p.x(t), p.xdot(t), c).abs() / energy_scale)
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::new("energy residual (closed)", energy, consts::ENERGY_RESIDUAL_CLOSED * scale));

    let fd = grid(0.1, TAU, 64)
        .filter_map(|t| fd_equation_residual(&p, t, consts::FD_STEP).ok())
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::new("equation residual (FD)", fd, consts::FD_RESIDUAL * scale));

    if let Ok(info) = p.period_info() {
        if p.class() != OrbitClass::LineOrbit {
            let drift = TAU * info.mean_velocity;
            let periodicity = grid(-TAU, TAU, 400)
                .map(|t| (p.x(t + TAU) - p.x(t) - drift).abs())
                .fold(0.0, f64::max);
            checks.push(CheckOutcome::new("periodicity", periodicity, consts::PERIODICITY * scale));

            let mean = mean_xdot_quadrature(&p)?;
            checks.push(CheckOutcome::new(
                "mean velocity (quadrature)",
                (mean - info.mean_velocity).abs(),
                consts::MEAN_VELOCITY * scale,
            ));

            let side = (p.b() - 0.5).signum();
            let violations = grid(-2.0 * TAU, 2.0 * TAU, 4000)
                .filter(|&t| (p.xdot(t) - 0.5).signum() != side)
                .count();
            checks.push(CheckOutcome::new("sign barrier (violations)", violations as f64, 0.0));
        }
    }

    if p.class() == OrbitClass::Unbounded {
        let worst = p
            .crossing_times(0, 5)?
            .into_iter()
            .map(|t| odd_half_pi_gap(p.x(t)).max((p.xdot(t) - 1.0).abs()))
            .fold(0.0, f64::max);
        checks.push(CheckOutcome::new("crossing values", worst, consts::CROSSING_VALUE * scale));
    }

    let init = p.init();
    let oracle = integrate(&init, 0.0, 10.0, tol)?;
    let sup = oracle
        .samples()
        .iter()
        .map(|s| (s.x - p.x_raw(s.t)).abs())
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::new("oracle equivalence", sup, consts::ORACLE_SUP * scale));

    let long = integrate(&init, 0.0, 20.0, tol)?;
    checks.push(CheckOutcome::new(
        "energy drift (integrated)",
        long.max_abs_residual() / energy_scale,
        consts::ENERGY_DRIFT_INTEGRATED * scale,
    ));

    Ok(BatteryReport { params: p, tol, checks })
}
