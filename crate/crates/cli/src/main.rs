use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use opfree_core::cauchy_cf::{cf_eval, grid, stieltjes_density, DEFAULT_DEPTH};
use opfree_core::jacobi::{jacobi_from_discrete, jacobi_from_moments};
use opfree_core::measure::{cauchy_exact, Measure, MeasureSpec};
use opfree_core::opval::{
    covering_decomposition, solve_cauchy_with, ComplexMatrix, SemicircularModel, SolveOptions, State,
};
use opfree_core::{atoms, verify, ErrorKind, JacobiCoefficients};
use serde::Serialize;
use serde_json::json;

mod input;
mod scan;

use input::Source;

#[derive(Parser)]
#[command(name = "opfree", version, about = "Cauchy transforms, Jacobi coefficients and matrix-valued semicircular models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure JSON -> Jacobi coefficients JSON.
    Jacobi {
        #[command(flatten)]
        io: Io,
        /// Levels to compute (moments default to as many as the data supports).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// {"jacobi": {...}, "points": [[re, im], ...]} -> transform values.
    Transform {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// {"model": {...}, "points": [[re, im], ...]} -> G(ξ·1) for each point.
    Solve {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Measure, jacobi or model JSON -> `x,density` CSV.
    Density {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        depth: Option<usize>,
        /// `trace` or a 1-based basis index, for model input.
        #[arg(long, default_value = "trace")]
        state: String,
    },
    /// Measure, jacobi or model JSON -> atom reports.
    Atoms {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "trace")]
        state: String,
        /// Extra locations to test, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Model JSON -> nilpotency report for the variance map.
    Nilpotency {
        #[command(flatten)]
        io: Io,
    },
    /// Discrete measure JSON -> component measures and their average.
    Cover {
        #[command(flatten)]
        io: Io,
    },
    /// Runs the built-in verification suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Io {
    /// Input file (stdin when omitted).
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, default_value_t = 601)]
    steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Input(m) => ("input", m),
            CliError::Numerical(m) => ("numerical", m),
            CliError::Io(m) => ("io", m),
        };
        json!({"error": {"kind": kind, "message": message}})
    }
}

impl From<opfree_core::Error> for CliError {
    fn from(e: opfree_core::Error) -> Self {
        match e.kind() {
            ErrorKind::Input => CliError::Input(e.to_string()),
            ErrorKind::Numerical => CliError::Numerical(e.to_string()),
        }
    }
}

fn init_logging() {
    let level = match std::env::var("OPFREE_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Jacobi { io, depth } => {
            check_depth(depth)?;
            let jc = match input::measure(&input::read_text(io.input.as_deref())?)? {
                Measure::Discrete(mu) => {
                    let jc = jacobi_from_discrete(&mu)?;
                    match depth {
                        Some(d) if d < jc.levels() => jc.truncated(d)?,
                        _ => jc,
                    }
                }
                Measure::Moments(ms) => {
                    let d = depth.unwrap_or((ms.len() / 2).max(1));
                    jacobi_from_moments(&ms, d)?
                }
            };
            write_json(io.output.as_deref(), &jc)?;
        }
        Command::Transform { io, depth } => {
            check_depth(depth)?;
            let (v, points) = input::with_points(&input::read_text(io.input.as_deref())?, "jacobi")?;
            let jc = input::jacobi_value(v)?;
            let d = depth.unwrap_or(DEFAULT_DEPTH.min(jc.levels()));
            let values = points
                .iter()
                .map(|&z| cf_eval(&jc, z, d).map(pair))
                .collect::<opfree_core::Result<Vec<_>>>()?;
            write_json(io.output.as_deref(), &values)?;
        }
        Command::Solve { io, tolerance } => {
            if !(tolerance > 0.0) {
                return Err(CliError::Input(format!("tolerance must be positive, got {tolerance}")));
            }
            let (v, points) = input::with_points(&input::read_text(io.input.as_deref())?, "model")?;
            let model = input::model_value(v)?;
            let opts = SolveOptions {
                tolerance,
                ..SolveOptions::default()
            };
            let mut out = Vec::with_capacity(points.len());
            for z in points {
                let b = ComplexMatrix::scalar(model.dim(), z);
                let sol = solve_cauchy_with(&model, &b, &opts, None)?;
                out.push(json!({
                    "point": pair(z),
                    "g": sol.g,
                    "iterations": sol.iterations,
                    "residual": sol.residual,
                    "method": sol.method,
                }));
            }
            write_json(io.output.as_deref(), &out)?;
        }
        Command::Density { io, grid: ga, depth, state } => {
            check_depth(depth)?;
            check_grid(&ga)?;
            let src = input::source(&input::read_text(io.input.as_deref())?)?;
            let state = parse_state(&state)?;
            let xs = scan_grid(&src, &ga)?;
            let mut g = transform(&src, depth, state)?;
            let dens = stieltjes_density(&mut *g, &xs, ga.epsilon)?;
            log::info!("{} density mass on grid: {}", src.kind(), dens.trapezoid_mass());
            write_text(io.output.as_deref(), &dens.to_csv())?;
        }
        Command::Atoms {
            io,
            grid: ga,
            depth,
            state,
            at,
        } => {
            check_depth(depth)?;
            check_grid(&ga)?;
            let at = match at {
                Some(s) => input::locations(&s)?,
                None => Vec::new(),
            };
            let src = input::source(&input::read_text(io.input.as_deref())?)?;
            let state = parse_state(&state)?;
            let xs = scan_grid(&src, &ga)?;
            let g = transform(&src, depth, state)?;
            let reports = scan::scan(g, &xs, ga.epsilon, &at)?;
            write_json(io.output.as_deref(), &reports)?;
        }
        Command::Nilpotency { io } => {
            let model = input::model(&input::read_text(io.input.as_deref())?)?;
            let report = atoms::kraus_nilpotent_commuting_check(model.variance());
            write_json(io.output.as_deref(), &report)?;
        }
        Command::Cover { io } => {
            let mu = match input::measure(&input::read_text(io.input.as_deref())?)? {
                Measure::Discrete(mu) => mu,
                Measure::Moments(_) => {
                    return Err(CliError::Input("cover needs a discrete measure".into()));
                }
            };
            let cov = covering_decomposition(&jacobi_from_discrete(&mu)?)?;
            let components: Vec<MeasureSpec> = cov.components.iter().map(MeasureSpec::from).collect();
            let out = json!({
                "components": components,
                "mixture": MeasureSpec::from(&cov.mixture),
            });
            write_json(io.output.as_deref(), &out)?;
        }
        Command::Verify { seed, output } => {
            let outcomes = verify::run_all(seed);
            let mut table = String::new();
            for o in &outcomes {
                table.push_str(&o.line());
                table.push('\n');
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            table.push_str(&format!("{} passed, {failed} failed\n", outcomes.len() - failed));
            write_text(output.as_deref(), &table)?;
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

type Transform<'a> = Box<dyn FnMut(Complex64) -> opfree_core::Result<Complex64> + 'a>;

fn transform(src: &Source, depth: Option<usize>, state: State) -> Result<Transform<'_>, CliError> {
    Ok(match src {
        Source::Measure(Measure::Discrete(mu)) => Box::new(move |z| cauchy_exact(mu, z)),
        Source::Measure(Measure::Moments(ms)) => {
            let jc = jacobi_from_moments(ms, depth.unwrap_or((ms.len() / 2).max(1)))?;
            let d = jc.levels();
            Box::new(move |z| cf_eval(&jc, z, d))
        }
        Source::Jacobi(jc) => {
            let d = depth.unwrap_or(DEFAULT_DEPTH.min(jc.levels()));
            Box::new(move |z| cf_eval(jc, z, d))
        }
        Source::Model(model) => {
            state.apply(&ComplexMatrix::zeros(model.dim()))?;
            Box::new(move |z| opfree_core::opval::scalar_transform(model, state, z))
        }
    })
}

/// Grid from the flags, defaulting to a little beyond a bound on the support.
fn scan_grid(src: &Source, ga: &GridArgs) -> Result<Vec<f64>, CliError> {
    let r = match src {
        Source::Measure(Measure::Discrete(mu)) => mu.support_radius(),
        Source::Measure(Measure::Moments(ms)) => ms.support_bound(),
        Source::Jacobi(jc) => jacobi_bound(jc),
        Source::Model(m) => model_bound(m),
    };
    let pad = 0.1 * r + 0.5;
    Ok(grid(ga.xmin.unwrap_or(-r - pad), ga.xmax.unwrap_or(r + pad), ga.steps)?)
}

fn jacobi_bound(jc: &JacobiCoefficients) -> f64 {
    let a = jc.alphas().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let w = jc.omegas().iter().fold(0.0f64, |m, x| m.max(*x));
    a + 2.0 * w.sqrt()
}

fn model_bound(m: &SemicircularModel) -> f64 {
    let n = m.dim();
    m.mean().op_norm() + 2.0 * m.variance().apply(&ComplexMatrix::identity(n)).op_norm().sqrt()
}

fn check_depth(depth: Option<usize>) -> Result<(), CliError> {
    match depth {
        Some(0) => Err(CliError::Input("depth must be at least 1".into())),
        _ => Ok(()),
    }
}

fn check_grid(ga: &GridArgs) -> Result<(), CliError> {
    if ga.steps < 2 {
        return Err(CliError::Input(format!("steps must be at least 2, got {}", ga.steps)));
    }
    if !(ga.epsilon > 0.0 && ga.epsilon.is_finite()) {
        return Err(CliError::Input(format!("epsilon must be positive, got {}", ga.epsilon)));
    }
    Ok(())
}

fn parse_state(s: &str) -> Result<State, CliError> {
    if s == "trace" {
        return Ok(State::Trace);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(State::Vector(k)),
        _ => Err(CliError::Input(format!("--state must be `trace` or a positive index, got {s:?}"))),
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let res = match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    };
    res.map_err(CliError::Io)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}
