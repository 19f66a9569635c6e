//! Dormand–Prince 5(4) with PI step control and the 4th-order continuous
//! extension, specialised to planar autonomous systems.

use crate::error::{Error, Result};

pub type State = [f64; 2];

// The field is autonomous, so the nodes c_i never appear.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous extension: y(t0 + θh) = y0 + h Σ_i k_i Σ_j P[i][j] θ^(j+1).
const DENSE: [[f64; 4]; 7] = [
    [
        1.0,
        -8048581381.0 / 2820520608.0,
        8663915743.0 / 2820520608.0,
        -12715105075.0 / 11282082432.0,
    ],
    [0.0, 0.0, 0.0, 0.0],
    [
        0.0,
        131558114200.0 / 32700410799.0,
        -68118460800.0 / 10900136933.0,
        87487479700.0 / 32700410799.0,
    ],
    [
        0.0,
        -1754552775.0 / 470086768.0,
        14199869525.0 / 1410260304.0,
        -10690763975.0 / 1880347072.0,
    ],
    [
        0.0,
        127303824393.0 / 49829197408.0,
        -318862633887.0 / 49829197408.0,
        701980252875.0 / 199316789632.0,
    ],
    [
        0.0,
        -282668133.0 / 205662961.0,
        2019193451.0 / 616988883.0,
        -1453857185.0 / 822651844.0,
    ],
    [
        0.0,
        40617522.0 / 29380423.0,
        -110615467.0 / 29380423.0,
        69997945.0 / 29380423.0,
    ],
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn axpy(y: State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = y;
    for (w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

/// One accepted step together with its interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    k: [State; 7],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Field value at the start of the step.
    pub fn f0(&self) -> State {
        self.k[0]
    }

    /// Field value at the end of the step.
    pub fn f1(&self) -> State {
        self.k[6]
    }

    /// Interpolated state at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> State {
        if t == self.t1() {
            return self.y1;
        }
        let theta = (t - self.t0) / self.h;
        let powers = [theta, theta * theta, theta.powi(3), theta.powi(4)];
        let mut out = self.y0;
        for (row, k) in DENSE.iter().zip(&self.k) {
            let w: f64 = row.iter().zip(&powers).map(|(p, q)| p * q).sum();
            out[0] += self.h * w * k[0];
            out[1] += self.h * w * k[1];
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    /// Mixed absolute/relative tolerance on the local error.
    pub tol: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Dopri5 { tol, max_steps: 5_000_000 }
    }

    fn error_norm(&self, y0: &State, y1: &State, err: &State) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            let sc = self.tol + self.tol * y0[i].abs().max(y1[i].abs());
            acc += (err[i] / sc).powi(2);
        }
        (acc / 2.0).sqrt()
    }

    fn initial_step<F: FnMut(State) -> State>(&self, field: &mut F, y0: State, f0: State) -> f64 {
        let sc = |y: &State, i: usize| self.tol + self.tol * y[i].abs();
        let norm = |v: &State| ((v[0] / sc(&y0, 0)).powi(2) + (v[1] / sc(&y0, 1)).powi(2)).sqrt() / 2f64.sqrt();
        let d0 = norm(&y0);
        let d1 = norm(&f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(y0, h0, &[(1.0, &f0)]);
        let f1 = field(y1);
        let diff = [f1[0] - f0[0], f1[1] - f0[1]];
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        let h = (100.0 * h0).min(h1);
        if h.is_finite() && h > 0.0 {
            h
        } else {
            1e-6
        }
    }

    /// Integrate `y' = field(y)` from `(t0, y0)` to `t1`, calling `on_step`
    /// for each accepted step. Returns the final state.
    pub fn run<F, S>(&self, mut field: F, t0: f64, y0: State, t1: f64, mut on_step: S) -> Result<State>
    where
        F: FnMut(State) -> State,
        S: FnMut(&DenseStep),
    {
        let mut t = t0;
        let mut y = y0;
        let mut k1 = field(y);
        if !(k1[0].is_finite() && k1[1].is_finite()) {
            return Err(Error::StepFailure { t, h: 0.0 });
        }
        let mut h = self.initial_step(&mut field, y, k1).min(t1 - t0);
        let mut err_prev: f64 = 1e-4;
        let mut rejected = false;

        for _ in 0..self.max_steps {
            if t >= t1 {
                return Ok(y);
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h < h_min {
                return Err(Error::StepFailure { t, h });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }

            let k2 = field(axpy(y, h, &[(A21, &k1)]));
            let k3 = field(axpy(y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = field(axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = field(axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = field(axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = field(y_new);
            let err_vec =
                axpy([0.0, 0.0], h, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
            let mut err = self.error_norm(&y, &y_new, &err_vec);
            if !err.is_finite() || !(y_new[0].is_finite() && y_new[1].is_finite()) {
                err = f64::INFINITY;
            }

            if err <= 1.0 {
                let step = DenseStep { t0: t, h, y0: y, y1: y_new, k: [k1, k2, k3, k4, k5, k6, k7] };
                on_step(&step);
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                let err_c = err.max(1e-10);
                let mut fac = SAFETY * err_c.powf(-EXPO) * err_prev.powf(BETA);
                fac = fac.clamp(FAC_MIN, FAC_MAX);
                if rejected {
                    fac = fac.min(1.0);
                }
                h *= fac;
                err_prev = err_c;
                rejected = false;
            } else {
                let fac = if err.is_finite() {
                    (SAFETY * err.powf(-0.2)).max(FAC_MIN)
                } else {
                    0.1
                };
                h *= fac;
                rejected = true;
            }
        }
        Err(Error::StepFailure { t, h })
    }
}
