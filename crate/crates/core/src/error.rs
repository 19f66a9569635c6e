use std::io;

use thiserror::Error;

use crate::closed_form::OrbitClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("a = {a} is an odd multiple of pi/2: cos a = 0 makes the coefficient of x'' vanish")]
    SingularPosition { a: f64 },

    #[error("b = 1 forbidden: coefficient of x'' unbounded")]
    ForbiddenVelocity,

    #[error("velocity 1 is singular for the energy quotient")]
    SingularVelocity,

    #[error("{op} is not applicable to {class:?} orbits")]
    NotApplicable { op: &'static str, class: OrbitClass },

    #[error("xi = {0} is forbidden (xi must avoid 0, 1 and -1)")]
    InvalidXi(f64),

    #[error("invalid energy level c = {0}")]
    InvalidLevel(f64),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },

    #[error("stencil t = {t} +/- {h} comes within 2h of the crossing at t = {crossing}")]
    TooCloseToCrossing { t: f64, h: f64, crossing: f64 },

    #[error("y = {y} is outside the domain of the {branch} branch")]
    OutOfRange { y: f64, branch: &'static str },

    #[error("level c = {0} has no admissible x in the requested cells")]
    EmptyCurve(f64),

    #[error("level c = 0 is the invariant line v = 1 and cannot be traced")]
    DegenerateLevel,

    #[error("time series is empty")]
    EmptySeries,

    #[error("sample ({x}, {v}) lies outside the canvas and clipping is off")]
    OutOfCanvas { x: f64, v: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Sink(#[from] io::Error),
}
