//! Orbits of the singular autonomous equation `d/dt(cos x/(1 − ẋ)) = −sin x`.
//!
//! * [`closed_form`] evaluates the explicit solution for any admissible
//!   initial pair, its crossing times of the interface `ẋ = 1`, and its
//!   periodicity facts.
//! * [`energy`] holds the first integral and the geometry of its levels.
//! * [`numeric`] is an independent check: an adaptive Dormand–Prince
//!   integrator, finite-difference residuals, quadrature and linearization.
//! * [`companion`] analyses `d/dt(cos x/(1 − ẋ)) = +sin x` through its
//!   conserved level curves.
//! * [`portrait_io`] samples orbits and writes CSV and SVG.
//! * [`verify`] bundles the invariant battery used by the CLI.

pub mod closed_form;
pub mod companion;
pub mod consts;
pub mod energy;
pub mod error;
pub mod numeric;
pub mod portrait_io;
pub mod series;
pub mod verify;

pub mod cli;

pub use closed_form::{
    derive_params, normalize_initial, xi_params, InitialData, OrbitClass, OrbitParams, Projective,
};
pub use error::{Error, Result};
pub use series::{Sample, TimeSeries};
