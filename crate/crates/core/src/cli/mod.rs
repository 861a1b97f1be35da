//! Argument parsing and validation. Every semantic check happens here so that
//! a bad flag is always a usage error (exit code 2) naming the flag.

mod exec;

use std::path::PathBuf;

use cabello::npa::NpaLevel;
use cabello::optimize::MAX_EPS;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

pub use exec::execute;

#[derive(Debug, Parser)]
#[command(name = "cabello", version, about = "Classical, qubit and NPA bounds for Cabello's nonlocality argument")]
pub struct Cli {
    /// Write data here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ideal,
    Nonideal,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Multistart count.
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// ADMM stopping tolerance on both residuals.
    #[arg(long = "sdp-tol", default_value_t = 1e-8, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
    /// Initial ADMM penalty.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub rho: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Verb {
    /// Compare the closed-form score with the simulated behavior on random draws.
    VerifyFormula {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Best two-qubit score with exact or relaxed constraints.
    Optimize {
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
        /// Constraint tolerance for nonideal mode.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        search: SearchArgs,
        /// Simplex diameter at which each local search stops.
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Local hidden-variable maximum of p − q.
    LocalBound {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Device-independent upper bound from the NPA hierarchy.
    Npa {
        /// One of 1, 1+AB, 2, 3.
        #[arg(long, default_value = "2")]
        level: NpaLevel,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Local, qubit and NPA bounds over a uniform ε grid, as CSV.
    Sweep {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps_min: f64,
        #[arg(long, default_value_t = MAX_EPS)]
        eps_max: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long, default_value = "2")]
        level: NpaLevel,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Extract the optimal state from a direct sum of optimal blocks.
    Selftest {
        /// Block weights: "w1,w2,..." for a diagonal sum, or rows separated by ';'.
        #[arg(long, default_value = "0.5,0.5")]
        weights: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi: f64,
    },
    /// Best Hardy probability (q fixed to zero).
    Hardy {
        #[command(flatten)]
        search: SearchArgs,
    },
}

/// Block weights as typed on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Diagonal(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct Command {
    pub verb: Verb,
    /// Parsed form of `Verb::Selftest::weights`.
    pub weights: Option<Weights>,
    pub out: Option<PathBuf>,
}

fn usage(msg: String) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}

fn check_eps(flag: &str, eps: f64, max: f64) -> Result<(), clap::Error> {
    if !(eps.is_finite() && (0.0..=max).contains(&eps)) {
        return Err(usage(format!("{flag} must lie in [0, {max}], got {eps}")));
    }
    Ok(())
}

fn check_search(s: &SearchArgs) -> Result<(), clap::Error> {
    if s.starts == 0 {
        return Err(usage("--starts must be at least 1".into()));
    }
    Ok(())
}

fn check_solver(s: &SolverArgs) -> Result<(), clap::Error> {
    if !(s.tol.is_finite() && s.tol > 0.0) {
        return Err(usage(format!("--sdp-tol must be positive, got {}", s.tol)));
    }
    if s.max_iter == 0 {
        return Err(usage("--max-iter must be at least 1".into()));
    }
    if !(s.rho.is_finite() && s.rho > 0.0) {
        return Err(usage(format!("--rho must be positive, got {}", s.rho)));
    }
    Ok(())
}

fn check_phase(flag: &str, v: f64) -> Result<(), clap::Error> {
    if !(0.0..std::f64::consts::TAU).contains(&v) {
        return Err(usage(format!("{flag} must lie in [0, 2π), got {v}")));
    }
    Ok(())
}

fn parse_weights(text: &str) -> Result<Weights, clap::Error> {
    let bad = |why: String| usage(format!("--weights {text:?}: {why}"));
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|w| w.trim().parse::<f64>().map_err(|e| bad(format!("{w:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if flat.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(bad("weights must be finite and nonnegative".into()));
    }
    let total: f64 = flat.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(bad(format!("weights sum to {total}, not 1")));
    }
    if rows.len() == 1 {
        return Ok(Weights::Diagonal(rows.into_iter().next().unwrap_or_default()));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(bad("rows have different lengths".into()));
    }
    Ok(Weights::Matrix(rows))
}

fn validate(cli: Cli) -> Result<Command, clap::Error> {
    let mut weights = None;
    match &cli.verb {
        Verb::VerifyFormula { samples, .. } => {
            if *samples == 0 {
                return Err(usage("--samples must be at least 1".into()));
            }
        }
        Verb::Optimize { mode, eps, search, tol } => {
            check_eps("--eps", *eps, MAX_EPS)?;
            if *mode == Mode::Ideal && *eps != 0.0 {
                return Err(usage("--eps applies only to --mode nonideal".into()));
            }
            check_search(search)?;
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(usage(format!("--tol must be positive, got {tol}")));
            }
        }
        Verb::LocalBound { eps } => check_eps("--eps", *eps, 1.0)?,
        Verb::Npa { eps, solver, .. } => {
            check_eps("--eps", *eps, 1.0)?;
            check_solver(solver)?;
        }
        Verb::Sweep { eps_min, eps_max, steps, search, solver, .. } => {
            check_eps("--eps-min", *eps_min, MAX_EPS)?;
            check_eps("--eps-max", *eps_max, MAX_EPS)?;
            if *steps == 0 {
                return Err(usage("--steps must be at least 1".into()));
            }
            if *steps > 1 && eps_min >= eps_max {
                return Err(usage(format!("--eps-min {eps_min} must be below --eps-max {eps_max}")));
            }
            check_search(search)?;
            check_solver(solver)?;
        }
        Verb::Selftest { weights: text, phi, xi } => {
            check_phase("--phi", *phi)?;
            check_phase("--xi", *xi)?;
            weights = Some(parse_weights(text)?);
        }
        Verb::Hardy { search } => check_search(search)?,
    }
    Ok(Command { verb: cli.verb, weights, out: cli.out })
}

/// Parses and validates a full argument vector (program name first).
pub fn parse<I, T>(argv: I) -> Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    validate(Cli::try_parse_from(argv)?)
}
