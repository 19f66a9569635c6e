use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    /// Conserved-quantity residual at this state.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    Integrator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// `v` passes through 1 at an odd multiple of π/2.
    InterfaceCrossing,
    /// `v` passes through 0.
    TurningPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub source: Source,
    /// Step-control tolerance, for integrated series.
    pub tol: Option<f64>,
    pub events: Vec<Event>,
}

impl SeriesMeta {
    pub fn closed_form() -> Self {
        SeriesMeta { source: Source::ClosedForm, tol: None, events: Vec::new() }
    }

    pub fn integrator(tol: f64) -> Self {
        SeriesMeta { source: Source::Integrator, tol: Some(tol), events: Vec::new() }
    }
}

/// Samples ordered by strictly increasing `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Sample>,
    pub meta: SeriesMeta,
}

impl TimeSeries {
    pub fn new(samples: Vec<Sample>, meta: SeriesMeta) -> Result<Self> {
        if let Some(w) = samples.windows(2).find(|w| !(w[0].t < w[1].t)) {
            return Err(Error::InvalidArgument(format!(
                "sample times must increase strictly ({} then {})",
                w[0].t, w[1].t
            )));
        }
        Ok(TimeSeries { samples, meta })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// `(x, v)` pairs in time order.
    pub fn phase_points(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.x, s.v)).collect()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual.abs()).fold(0.0, f64::max)
    }

    /// Velocity range `(min, max)`.
    pub fn velocity_extent(&self) -> Option<(f64, f64)> {
        self.samples.iter().map(|s| s.v).fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Position range `(min, max)`.
    pub fn position_extent(&self) -> Option<(f64, f64)> {
        self.samples.iter().map(|s| s.x).fold(None, |acc, x| match acc {
            None => Some((x, x)),
            Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
        })
    }
}
