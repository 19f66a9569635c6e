//! Shared tolerance table.
//!
//! Every numeric threshold used by the library, the `verify` battery and the
//! test suites lives here so the contracts can be read in one place.

/// Relative tolerance for the `A² + B² = 4(1−b)²(1+c)` identity.
pub const IDENTITY_REL: f64 = 1e-12;

/// Absolute bound on the polynomial energy residual along closed-form orbits.
pub const ENERGY_RESIDUAL_CLOSED: f64 = 1e-9;

/// Absolute bound on the energy residual along integrated trajectories.
pub const ENERGY_DRIFT_INTEGRATED: f64 = 1e-7;

/// `x(t + 2π)` vs `x(t)` (or `x(t) + 2π`).
pub const PERIODICITY: f64 = 1e-10;

/// Quadrature estimate of the mean velocity vs its exact value 0 or 1.
pub const MEAN_VELOCITY: f64 = 1e-8;

/// Position and velocity at crossing times.
pub const CROSSING_VALUE: f64 = 1e-9;

/// Closed-form first crossing time against `arccos(−1/3)`.
pub const CROSSING_TIME: f64 = 1e-12;

/// Sup-norm gap between the adaptive integrator and the closed form.
pub const ORACLE_SUP: f64 = 1e-6;

/// Default local tolerance handed to the adaptive integrator.
pub const INTEGRATOR_TOL: f64 = 1e-10;

/// Admissible range of integrator tolerances.
pub const INTEGRATOR_TOL_MIN: f64 = 1e-13;
pub const INTEGRATOR_TOL_MAX: f64 = 1e-3;

/// Bound on the central-difference residual of the equation at `h = 1e−4`.
pub const FD_RESIDUAL: f64 = 1e-6;

/// Default finite-difference step for the equation residual.
pub const FD_STEP: f64 = 1e-4;

/// Accepted window for the residual ratio per halving of `h` (second order).
pub const FD_RATIO_LO: f64 = 3.5;
pub const FD_RATIO_HI: f64 = 4.5;

/// Tolerance on eigenvalues obtained from finite-difference Jacobians.
pub const EIGEN: f64 = 1e-6;

/// `tan(x_closed)` vs the projective closed form, relative.
pub const TAN_CONSISTENCY_REL: f64 = 1e-8;

/// Central-difference derivative of `x_closed` vs `xdot_closed`.
pub const DERIVATIVE_ABS: f64 = 1e-8;
pub const DERIVATIVE_ABS_AT_CROSSING: f64 = 1e-6;

/// Strip extremes and closed-curve closure on sampled portraits.
pub const PORTRAIT_EXTREME: f64 = 1e-9;

/// Companion level residual along traced curves.
pub const LEVEL_CURVE: f64 = 1e-10;

/// Companion branch solver residual.
pub const BRANCH_SOLVE: f64 = 1e-12;

/// Switch radius `|cos x| < ε` for the regularized right-hand sides.
pub const EPS_REG: f64 = 1e-3;

/// Event times are bisected to this width.
pub const EVENT_TIME: f64 = 1e-12;

/// Turning-point radicands within this distance of zero are clamped.
pub const RADICAND_CLAMP: f64 = 1e-12;

/// Half-width around `t = ±π` where `ψ` uses its exact value `±π/2`.
pub const PSI_POLE: f64 = 1e-12;
