//! Acceptance battery: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::f64::consts::TAU;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singular_orbits::companion::{companion_integrate, level_function, solve_branch, LevelBranch};
use singular_orbits::consts::*;
use singular_orbits::energy::{energy_residual, level_bounds};
use singular_orbits::numeric::{fd_equation_residual, integrate, linearize, mean_xdot_quadrature, EquilibriumKind, System};
use singular_orbits::portrait_io::parse_csv;
use singular_orbits::verify::odd_half_pi_gap;
use singular_orbits::series::EventKind;
use singular_orbits::{normalize_initial, OrbitParams};

// Frozen oracles, computed independently at 30 significant digits.
const T_0: f64 = 1.910_633_236_249_018_556;
const T_1: f64 = 4.372_552_070_930_567_921;
/// Amplitude of the closed orbit through (0, 1/4): arccos √(8/9).
const AMP_QUARTER: f64 = 0.339_836_909_454_121_937;
/// Amplitude of the closed orbit through (0, −2/5): arccos √(45/49).
const AMP_TWO_FIFTHS: f64 = 0.289_751_701_436_047_471;

const FIGURE_B: [f64; 4] = [0.25, -0.4, 0.75, 1.5];
const SEED: u64 = 0x5eed_0fb1;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn grid(t0: f64, t1: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn params(b: f64) -> OrbitParams {
    OrbitParams::from_raw(0.0, b).expect("figure data is admissible")
}

fn identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let a: f64 = rng.gen_range(-10.0..10.0);
        let b: f64 = rng.gen_range(-5.0..5.0);
        if a.cos().abs() < 1e-6 || (b - 1.0).abs() < 1e-6 || (b - 0.5).abs() < 1e-6 {
            continue;
        }
        let p = OrbitParams::from_raw(a, b).expect("admissible");
        let a = p.a();
        let (aa, bb) = ((2.0 * a).sin(), 2.0 * b - 1.0 + (2.0 * a).cos());
        let c = (2.0 * b - 1.0) * a.cos().powi(2) / (1.0 - b).powi(2);
        let lhs = aa * aa + bb * bb;
        let rhs = 4.0 * (1.0 - b).powi(2) * (1.0 + c);
        worst = worst.max((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE));
        let own = p.coef_a().powi(2) + p.coef_b().powi(2);
        worst = worst.max((own - lhs).abs() / lhs.max(f64::MIN_POSITIVE));
        count += 1;
    }
    verdict(worst <= IDENTITY_REL, format!("1000 random pairs, worst relative gap {worst:.2e} (tol {IDENTITY_REL:e})"))
}

fn energy_conservation() -> Verdict {
    let mut worst = 0.0f64;
    for b in FIGURE_B {
        let p = params(b);
        let c = (2.0 * b - 1.0) / (1.0 - b).powi(2);
        worst = worst.max(fold_max(grid(0.0, 2.0 * TAU, 2000).map(|t| energy_residual(p.x(t), p.xdot(t), c).abs())));
    }
    verdict(
        worst <= ENERGY_RESIDUAL_CLOSED,
        format!("4 orbits x 2000 samples on [0, 4pi], worst residual {worst:.2e} (tol {ENERGY_RESIDUAL_CLOSED:e})"),
    )
}

fn periodicity() -> Verdict {
    let mut worst_shift = 0.0f64;
    let mut worst_mean = 0.0f64;
    for b in FIGURE_B {
        let p = params(b);
        let drift = if b > 0.5 { TAU } else { 0.0 };
        worst_shift = worst_shift.max(fold_max(grid(-TAU, 2.0 * TAU, 1500).map(|t| (p.x(t + TAU) - p.x(t) - drift).abs())));
        let expected_mean = if b > 0.5 { 1.0 } else { 0.0 };
        let mean = mean_xdot_quadrature(&p).expect("generic orbit");
        worst_mean = worst_mean.max((mean - expected_mean).abs());
    }
    verdict(
        worst_shift <= PERIODICITY && worst_mean <= MEAN_VELOCITY,
        format!(
            "shift gap {worst_shift:.2e} (tol {PERIODICITY:e}), mean-velocity gap {worst_mean:.2e} (tol {MEAN_VELOCITY:e})"
        ),
    )
}

fn crossings() -> Verdict {
    let p = params(0.75);
    let times = p.crossing_times(0, 5).expect("unbounded orbit");
    let t0_gap = (times[0] - T_0).abs();
    let t1_gap = (times[1] - T_1).abs();
    let value_gap = fold_max(times.iter().map(|&t| odd_half_pi_gap(p.x(t))));
    let velocity_gap = fold_max(times.iter().map(|&t| (p.xdot(t) - 1.0).abs()));
    verdict(
        times.len() == 6
            && t0_gap <= CROSSING_TIME
            && t1_gap <= CROSSING_TIME
            && value_gap <= CROSSING_VALUE
            && velocity_gap <= CROSSING_VALUE,
        format!(
            "t_0 gap {t0_gap:.2e}, t_1 gap {t1_gap:.2e} (tol {CROSSING_TIME:e}); j=0..5 position gap {value_gap:.2e}, velocity gap {velocity_gap:.2e} (tol {CROSSING_VALUE:e})"
        ),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut crossings_ok = true;
    for b in FIGURE_B {
        let init = normalize_initial(0.0, b).expect("admissible");
        let p = params(b);
        let ts = integrate(&init, 0.0, 10.0, INTEGRATOR_TOL).expect("integration succeeds");
        worst = worst.max(fold_max(ts.samples().iter().map(|s| (s.x - p.x_raw(s.t)).abs())));
        if b > 0.5 {
            let n = ts.meta.events.iter().filter(|e| e.kind == EventKind::InterfaceCrossing).count();
            crossings_ok &= n >= 2;
        }
    }
    verdict(
        worst <= ORACLE_SUP && crossings_ok,
        format!(
            "tol {INTEGRATOR_TOL:e} on [0, 10], sup gap {worst:.2e} (tol {ORACLE_SUP:e}), crossings traversed: {crossings_ok}"
        ),
    )
}

fn equation_residual() -> Verdict {
    // Bound at the pinned step, away from the crossings.
    let mut worst = 0.0f64;
    for b in FIGURE_B {
        let p = params(b);
        for t in grid(0.05, 2.0 * TAU, 400) {
            if let Ok(r) = fd_equation_residual(&p, t, FD_STEP) {
                worst = worst.max(r);
            }
        }
    }
    // Second-order convergence on halving the step.
    let (mut ratio_lo, mut ratio_hi) = (f64::INFINITY, 0.0f64);
    for b in FIGURE_B {
        let p = params(b);
        for t in [0.7, 2.5, 5.0] {
            let r: Vec<f64> =
                [1e-3, 5e-4, 2.5e-4].iter().map(|&h| fd_equation_residual(&p, t, h).expect("away from crossings")).collect();
            for pair in r.windows(2) {
                let q = pair[0] / pair[1];
                ratio_lo = ratio_lo.min(q);
                ratio_hi = ratio_hi.max(q);
            }
        }
    }
    // Limit sweep into the first crossing with the step shrinking alongside.
    let mut sweep_ok = true;
    let mut sweep_last = 0.0f64;
    for b in [0.75, 1.5] {
        let p = params(b);
        let t0 = p.crossing_times(0, 0).expect("unbounded orbit")[0];
        for side in [-1.0, 1.0] {
            let r: Vec<f64> = [4e-3, 2e-3, 1e-3, 4e-4]
                .iter()
                .map(|&d| fd_equation_residual(&p, t0 + side * d, d / 4.0).expect("outside the guard band"))
                .collect();
            sweep_ok &= r.windows(2).all(|w| w[1] < w[0]) && r[3] < r[0] / 10.0;
            sweep_last = sweep_last.max(r[3]);
        }
    }
    verdict(
        worst <= FD_RESIDUAL && ratio_lo >= FD_RATIO_LO && ratio_hi <= FD_RATIO_HI && sweep_ok,
        format!(
            "worst at h={FD_STEP:e} {worst:.2e} (tol {FD_RESIDUAL:e}); halving ratios in [{ratio_lo:.4}, {ratio_hi:.4}] (need [{FD_RATIO_LO}, {FD_RATIO_HI}]); sweep to t_0 decreasing: {sweep_ok}, final {sweep_last:.2e}"
        ),
    )
}

fn strip_geometry() -> Verdict {
    let spec = singular_orbits::portrait_io::PortraitSpec::figure_two();
    let series = singular_orbits::portrait_io::sample_all(&spec).expect("figure two samples");
    let mut worst = 0.0f64;
    for ts in &series {
        let (lo, hi) = ts.velocity_extent().expect("non-empty");
        worst = worst.max((lo - 0.75).abs()).max((hi - 1.5).abs());
    }
    let level = level_bounds(8.0).expect("c = 8 is a strip level");
    let harmonic = 2.0 / (1.0 / level.xdot_lo + 1.0 / level.xdot_hi);
    verdict(
        worst <= PORTRAIT_EXTREME && harmonic == 1.0,
        format!("velocity extremes gap {worst:.2e} (tol {PORTRAIT_EXTREME:e}); harmonic mean of bounds = {harmonic}"),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_singular-orbits")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn figure_reproduction() -> Verdict {
    // (preset, per-orbit (velocity min, velocity max, amplitude bound))
    let expectations: [(&str, [(f64, f64, Option<f64>); 2]); 2] = [
        ("fig1", [(-0.5, 0.25, Some(AMP_QUARTER)), (-0.4, 2.0 / 9.0, Some(AMP_TWO_FIFTHS))]),
        ("fig2", [(0.75, 1.5, None), (0.75, 1.5, None)]),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (preset, orbits) in expectations {
        let dir = tempfile::tempdir().expect("temp dir");
        let csv_dir = dir.path().to_str().expect("utf-8 path");
        let (code_a, svg_a) = run_cli(&["portrait", "--preset", preset, "--csv-dir", csv_dir]);
        let (code_b, svg_b) = run_cli(&["portrait", "--preset", preset]);
        let text = String::from_utf8_lossy(&svg_a);
        let deterministic = code_a == 0 && code_b == 0 && svg_a == svg_b && text.matches("<polyline").count() == 2;
        ok &= deterministic;
        notes.push(format!("{preset} deterministic: {deterministic}"));
        for (i, (v_lo, v_hi, amp)) in orbits.iter().enumerate() {
            let body = std::fs::read_to_string(dir.path().join(format!("orbit_{i}.csv"))).expect("orbit csv written");
            let samples = parse_csv(&body).expect("well-formed csv");
            let lo = samples.iter().map(|s| s.v).fold(f64::INFINITY, f64::min);
            let hi = samples.iter().map(|s| s.v).fold(f64::NEG_INFINITY, f64::max);
            let residual = fold_max(samples.iter().map(|s| s.residual.abs()));
            worst = worst.max((lo - v_lo).abs()).max((hi - v_hi).abs());
            ok &= residual <= ENERGY_RESIDUAL_CLOSED;
            if let Some(amp) = amp {
                let reach = fold_max(samples.iter().map(|s| s.x.abs()));
                ok &= reach <= amp + PORTRAIT_EXTREME && reach > 0.99 * amp;
            }
        }
    }
    ok &= worst <= PORTRAIT_EXTREME;
    verdict(ok, format!("{}; sampled velocity extremes gap {worst:.2e} (tol {PORTRAIT_EXTREME:e})", notes.join(", ")))
}

fn companion_conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut drift = 0.0f64;
    let mut levels = 0;
    while levels < 5 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(0.1..0.9);
        // Levels with c ≥ 1 reach the lower branch and escape to v = −∞ in
        // finite time; they cannot be followed over [0, 10].
        if level_function(b) / a.cos() >= 0.95 {
            continue;
        }
        levels += 1;
        let ts = companion_integrate(a, b, 0.0, 10.0, INTEGRATOR_TOL).expect("companion integration succeeds");
        drift = drift.max(ts.max_abs_residual());
    }
    let mut round_trip = 0.0f64;
    for _ in 0..1000 {
        let y: f64 = rng.gen_range(1e-6..1.0);
        for branch in [LevelBranch::Lower, LevelBranch::Upper] {
            let v = solve_branch(y, branch).expect("y in range");
            round_trip = round_trip.max((level_function(v) - y).abs());
        }
    }
    let mut eigen_gap = 0.0f64;
    let mut kinds_ok = true;
    for n in -1..=1 {
        let main = linearize(n, System::Main);
        let comp = linearize(n, System::Companion);
        kinds_ok &= main.kind == EquilibriumKind::Center && comp.kind == EquilibriumKind::Saddle;
        let [m1, m2] = main.eigenvalues;
        let [s1, s2] = comp.eigenvalues;
        for gap in [
            m1.re.abs(),
            m2.re.abs(),
            (m1.im.abs() - 1.0).abs(),
            (m2.im.abs() - 1.0).abs(),
            (m1.im + m2.im).abs(),
            (s1.re.abs() - 1.0).abs(),
            (s2.re.abs() - 1.0).abs(),
            (s1.re + s2.re).abs(),
            s1.im.abs(),
            s2.im.abs(),
        ] {
            eigen_gap = eigen_gap.max(gap);
        }
    }
    verdict(
        drift <= ENERGY_DRIFT_INTEGRATED && round_trip <= BRANCH_SOLVE && eigen_gap <= EIGEN && kinds_ok,
        format!(
            "5 random levels on [0, 10], drift {drift:.2e} (tol {ENERGY_DRIFT_INTEGRATED:e}); branch round trip {round_trip:.2e} (tol {BRANCH_SOLVE:e}); eigenvalue gap {eigen_gap:.2e} (tol {EIGEN:e}), center/saddle: {kinds_ok}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("identity", identity),
        ("energy conservation", energy_conservation),
        ("periodicity dichotomy", periodicity),
        ("crossings", crossings),
        ("oracle equivalence", oracle_equivalence),
        ("equation residual", equation_residual),
        ("strip geometry", strip_geometry),
        ("figure reproduction", figure_reproduction),
        ("companion conservation", companion_conservation),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.passed {
            failures += 1;
        }
        println!("criterion {} {:<24} {}  {}", i + 1, name, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
