//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 verification failure,
//! 3 I/O failure. Diagnostics go to the error stream only.

use std::f64::consts::TAU;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::closed_form::{normalize_initial, OrbitClass, OrbitParams};
use crate::companion::{companion_integrate, companion_level, trace_level, CompanionLevel};
use crate::consts;
use crate::energy::energy_residual;
use crate::error::{Error, Result};
use crate::numeric::{linearize, System};
use crate::portrait_io::{
    emit_csv, emit_level_csv, emit_svg, sample_all, Canvas, Guides, OrbitSpec, PortraitSpec,
};
use crate::series::{Sample, SeriesMeta, TimeSeries};
use crate::verify::run_battery;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Parse a real number, accepting exact fractions `p/q`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("non-finite value {s:?}"))
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    Ok((parse_real(a)?, parse_real(b)?))
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI but got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    if hi - lo > 100_000 {
        return Err(format!("range {s:?} too long"));
    }
    Ok((lo, hi))
}

#[derive(Parser, Debug)]
#[command(name = "singular-orbits", version, about = "Orbits of d/dt(cos x/(1-x')) = -sin x")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct InitialArgs {
    /// Initial position x(t0); fractions like 1/4 are exact.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    a: f64,
    /// Initial velocity x'(t0).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Fig1,
    Fig2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Main,
    Companion,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form time series as CSV.
    Solve {
        #[command(flatten)]
        init: InitialArgs,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true, default_value = "0")]
        t0: f64,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true, default_value_t = 2.0 * TAU)]
        t1: f64,
        /// Number of uniformly spaced samples.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase portrait as SVG, with optional per-orbit CSV.
    Portrait {
        #[arg(long, value_enum, conflicts_with = "orbit")]
        preset: Option<Preset>,
        /// Initial pair `a,b`; repeatable.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        orbit: Vec<(f64, f64)>,
        /// Companion level constant to overlay; repeatable.
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        level: Vec<f64>,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        t0: Option<f64>,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        t1: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        /// Drop samples outside the canvas instead of failing.
        #[arg(long)]
        clip: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Times at which the orbit meets x' = 1.
    Crossings {
        #[command(flatten)]
        init: InitialArgs,
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
    /// Run the invariant battery and print a pass/fail table.
    Verify {
        #[command(flatten)]
        init: InitialArgs,
        /// Integrator tolerance; coarser values loosen every threshold.
        #[arg(long, value_parser = parse_real, default_value_t = consts::INTEGRATOR_TOL)]
        tol: f64,
    },
    /// Level constant, level curve or integrated orbit of the companion equation.
    Companion {
        #[command(flatten)]
        init: InitialArgs,
        #[arg(long, conflicts_with = "integrate")]
        trace: bool,
        /// Integrate from t = 0 to this time.
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        integrate: Option<f64>,
        /// Points per branch for --trace.
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[arg(long, value_parser = parse_real, default_value_t = consts::INTEGRATOR_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Linear classification of the rest points (n pi, 0).
    Equilibria {
        #[arg(long, value_enum, default_value = "main")]
        which: Which,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-2..2")]
        n_range: (i64, i64),
    },
}

enum Failure {
    Domain(Error),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Sink(io) => Failure::Io(io.to_string()),
            other => Failure::Domain(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Run with the process streams; `argv[0]` is the program name.
pub fn run(argv: &[String]) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_DOMAIN
                }
            };
        }
    };
    let result = dispatch(cli.command, out, err).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "I/O error: {msg}");
            EXIT_IO
        }
        Err(Failure::Verify) => {
            let _ = writeln!(err, "verification failed");
            EXIT_VERIFY
        }
    }
}

fn dispatch<O: Write, E: Write>(command: Command, out: &mut O, err: &mut E) -> CliResult {
    match command {
        Command::Solve { init, t0, t1, n, out: path } => {
            let series = solve_series(init.a, init.b, t0, t1, n)?;
            write_to(path.as_deref(), out, |w| emit_csv(&series, w))
        }
        Command::Portrait { preset, orbit, level, t0, t1, n, clip, svg, csv_dir } => {
            let spec = portrait_spec(preset, &orbit, &level, t0, t1, n, clip)?;
            let series = sample_all(&spec)?;
            if let Some(dir) = csv_dir {
                fs::create_dir_all(&dir)?;
                for (i, s) in series.iter().enumerate() {
                    let mut w = BufWriter::new(File::create(dir.join(format!("orbit_{i}.csv")))?);
                    emit_csv(s, &mut w)?;
                    w.flush()?;
                }
            }
            // Render to memory first so a failed render writes nothing.
            let mut buf = Vec::new();
            emit_svg(&spec, &series, &mut buf)?;
            write_to(svg.as_deref(), out, |w| Ok(w.write_all(&buf)?))
        }
        Command::Crossings { init, count } => {
            let p = OrbitParams::from_raw(init.a, init.b)?;
            if p.class() != OrbitClass::Unbounded {
                return Err(Error::NotApplicable { op: "crossings (requires b > 1/2, b != 1)", class: p.class() }.into());
            }
            writeln!(out, "j,t,x")?;
            if count > 0 {
                for (j, t) in p.crossing_times(0, count as i64 - 1)?.into_iter().enumerate() {
                    writeln!(out, "{j},{t},{}", p.x_raw(t))?;
                }
            }
            Ok(())
        }
        Command::Verify { init, tol } => {
            let report = run_battery(init.a, init.b, tol)?;
            write!(out, "{}", report.table())?;
            if report.passed() {
                Ok(())
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(err, "failed: {} ({:e} > {:e})", c.name, c.value, c.threshold);
                }
                Err(Failure::Verify)
            }
        }
        Command::Companion { init, trace, integrate, n, tol, out: path } => {
            let level = companion_level(init.a, init.b)?;
            if trace {
                let curve = trace_level(&level, n)?;
                write_to(path.as_deref(), out, |w| emit_level_csv(&curve, w))
            } else if let Some(t1) = integrate {
                let series = companion_integrate(init.a, init.b, 0.0, t1, tol)?;
                write_to(path.as_deref(), out, |w| emit_csv(&series, w))
            } else {
                write_to(path.as_deref(), out, |w| Ok(w.write_all(describe_level(&level).as_bytes())?))
            }
        }
        Command::Equilibria { which, n_range: (lo, hi) } => {
            let system = match which {
                Which::Main => System::Main,
                Which::Companion => System::Companion,
            };
            writeln!(out, "n,x,re1,im1,re2,im2,kind")?;
            for n in lo..=hi {
                let r = linearize(n, system);
                let [l1, l2] = r.eigenvalues;
                writeln!(
                    out,
                    "{n},{},{:.9},{:.9},{:.9},{:.9},{}",
                    r.point.0,
                    l1.re,
                    l1.im,
                    l2.re,
                    l2.im,
                    format!("{:?}", r.kind).to_lowercase()
                )?;
            }
            Ok(())
        }
    }
}

fn write_to<O: Write>(path: Option<&Path>, out: &mut O, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> CliResult {
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => body(out)?,
    }
    Ok(())
}

/// Uniform-grid closed-form samples; rest points give a constant series.
pub fn solve_series(a: f64, b: f64, t0: f64, t1: f64, n: usize) -> Result<TimeSeries> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("--n must be at least 2, got {n}")));
    }
    if !(t0 < t1) {
        return Err(Error::InvalidArgument(format!("empty time span [{t0}, {t1}]")));
    }
    let p = OrbitParams::from_raw(a, b)?;
    let c = p.energy();
    let samples = (0..n)
        .map(|i| {
            let t = if i == n - 1 { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 };
            let v = p.xdot(t);
            Sample { t, x: p.x_raw(t), v, residual: energy_residual(p.x(t), v, c) }
        })
        .collect();
    TimeSeries::new(samples, SeriesMeta::closed_form())
}

fn portrait_spec(
    preset: Option<Preset>,
    orbits: &[(f64, f64)],
    levels: &[f64],
    t0: Option<f64>,
    t1: Option<f64>,
    n: Option<usize>,
    clip: bool,
) -> Result<PortraitSpec> {
    let mut spec = match preset {
        Some(Preset::Fig1) => PortraitSpec::figure_one(),
        Some(Preset::Fig2) => PortraitSpec::figure_two(),
        None => {
            if orbits.is_empty() && levels.is_empty() {
                return Err(Error::InvalidArgument("need --preset, --orbit or --level".into()));
            }
            let mut specs = Vec::new();
            for &(a, b) in orbits {
                specs.push(OrbitSpec::Main(normalize_initial(a, b)?));
            }
            PortraitSpec {
                orbits: specs,
                t_span: (0.0, TAU),
                samples_per_orbit: 1000,
                guides: Guides { half: true, interface: true, strip: true },
                canvas: Canvas { width: 640, height: 480, x_range: (-1.0, 1.0), v_range: (-1.0, 1.0) },
                clip,
            }
        }
    };
    for &c in levels {
        spec.orbits.push(OrbitSpec::Companion(CompanionLevel::from_constant(c)?));
    }
    if let Some(t0) = t0 {
        spec.t_span.0 = t0;
    }
    if let Some(t1) = t1 {
        spec.t_span.1 = t1;
    }
    if let Some(n) = n {
        spec.samples_per_orbit = n;
    }
    spec.clip |= clip;
    spec.validate()?;
    if preset.is_none() || !levels.is_empty() {
        spec.canvas = fit_canvas(&spec)?;
    }
    Ok(spec)
}

/// Bounding box of every curve in the spec, padded by 5%.
fn fit_canvas(spec: &PortraitSpec) -> Result<Canvas> {
    let mut pts: Vec<(f64, f64)> = sample_all(spec)?.iter().flat_map(TimeSeries::phase_points).collect();
    for orbit in &spec.orbits {
        if let OrbitSpec::Companion(level) = orbit {
            let curve = trace_level(level, spec.samples_per_orbit)?;
            pts.extend(curve.points.iter().map(|p| (p.x, p.v)));
        }
    }
    if pts.is_empty() {
        return Ok(spec.canvas);
    }
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * (hi - lo).max(1e-3);
        (lo - pad, hi + pad)
    };
    Ok(Canvas { x_range: span(|p| p.0), v_range: span(|p| p.1), ..spec.canvas })
}

fn describe_level(level: &CompanionLevel) -> String {
    let mut s = format!("c = {}\n", level.c);
    if level.is_degenerate() {
        s.push_str("degenerate level: the invariant line x' = 1\n");
    } else if level.x_domain.is_empty() {
        s.push_str("no admissible positions with cos x > 0; the level lives where c cos x is in (0, 1]\n");
    }
    for comp in &level.x_domain {
        s.push_str(&format!(
            "x in {}{}, {}{} (mod 2 pi)\n",
            if comp.lo_closed { "[" } else { "(" },
            comp.lo,
            comp.hi,
            if comp.hi_closed { "]" } else { ")" }
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("singular-orbits").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with_io(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn fractions_are_exact() {
        assert_eq!(parse_real("3/4"), Ok(0.75));
        assert_eq!(parse_real("-2/5"), Ok(-2.0 / 5.0));
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("inf").is_err());
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3..2"), Ok((-3, 2)));
        assert!(parse_range("2..1").is_err());
        assert!(parse_range("2").is_err());
    }

    #[test]
    fn crossings_example() {
        let (code, out, _) = call(&["crossings", "--a", "0", "--b", "3/4", "--count", "2"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[1].starts_with("0,1.91063"), "{}", rows[1]);
        assert!(rows[2].starts_with("1,4.37255"), "{}", rows[2]);
    }

    #[test]
    fn forbidden_velocity_is_a_domain_error() {
        let (code, out, err) = call(&["solve", "--a", "0", "--b", "1"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("b = 1 forbidden"), "{err}");
    }

    #[test]
    fn malformed_invocations_exit_one() {
        for args in [&[][..], &["solve"], &["frobnicate"], &["solve", "--a", "x", "--b", "0"], &["equilibria", "--n-range", "3"]] {
            let (code, _, err) = call(args);
            assert_eq!(code, 1, "{args:?}");
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, _) = call(&["solve", "--a", "0", "--b", "-2/5", "--t0", "-1", "--t1", "1", "--n", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn equilibria_table() {
        let (code, out, _) = call(&["equilibria", "--which", "companion", "--n-range", "0..1"]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1).unwrap().ends_with("saddle"));
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let (code, _, _) = call(&["solve", "--a", "0", "--b", "1/4", "--out", "/nonexistent/dir/x.csv"]);
        assert_eq!(code, 3);
    }
}
