use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{Context, Result};
use cabello::npa::{npa_upper_bound, SdpOptions, SolveStatus};
use cabello::optimize::{
    optimize_hardy, optimize_ideal, optimize_nonideal, sweep_epsilon, threads_from_env, uniform_grid, OptOptions,
    SweepOptions, SweepStatus,
};
use cabello::qubit::{closed_form_score, constrained_state, sample_constrained_params, simulate_stats};
use cabello::scenario::local_max_score;
use cabello::selftest::{assemble_diagonal, assemble_direct_sum, verify_selftest};
use cabello::table::{format_sig, write_records};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Command, Mode, SearchArgs, SolverArgs, Verb, Weights};

const FORMULA_TOL: f64 = 1e-10;
const CONSTRAINT_TOL: f64 = 1e-12;
const FIDELITY_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct FormulaReport {
    samples: usize,
    seed: u64,
    max_score_deviation: f64,
    max_constraint_probability: f64,
}

#[derive(Serialize)]
struct NpaReport {
    level: String,
    eps: f64,
    upper_bound: f64,
    min_eigenvalue: f64,
    primal_residual: f64,
    dual_residual: f64,
    iterations: usize,
    status: SolveStatus,
}

fn opt_options(s: &SearchArgs) -> OptOptions {
    OptOptions { starts: s.starts, seed: s.seed, ..Default::default() }
}

fn sdp_options(s: &SolverArgs) -> SdpOptions {
    SdpOptions { rho: s.rho, tol: s.tol, max_iter: s.max_iter }
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs a validated command. Data goes to `--out` or `stdout`, diagnostics to
/// `stderr`. Returns the process exit code; `Err` is reserved for failures
/// that prevent producing any result.
pub fn execute(cmd: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    let mut file;
    let out: &mut dyn Write = match &cmd.out {
        Some(path) => {
            file = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
            &mut file
        }
        None => stdout,
    };
    let code = run_verb(cmd, out, stderr)?;
    out.flush()?;
    Ok(code)
}

fn run_verb(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match &cmd.verb {
        Verb::VerifyFormula { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (mut dev, mut constraint) = (0.0f64, 0.0f64);
            for _ in 0..*samples {
                let p = sample_constrained_params(&mut rng);
                let formula = closed_form_score(&p)?;
                let stats = simulate_stats(&constrained_state(&p)?, &p.measurements)?;
                dev = dev.max((formula - stats.score).abs());
                constraint = constraint.max(stats.e10).max(stats.e01);
            }
            let report = FormulaReport {
                samples: *samples,
                seed: *seed,
                max_score_deviation: dev,
                max_constraint_probability: constraint,
            };
            json_line(out, &report)?;
            if dev >= FORMULA_TOL || constraint >= CONSTRAINT_TOL {
                writeln!(err, "formula and simulation disagree: deviation {dev:e}, constraint {constraint:e}")?;
                return Ok(1);
            }
        }
        Verb::Optimize { mode, eps, search, tol } => {
            let opts = OptOptions { tol: *tol, ..opt_options(search) };
            let result = match mode {
                Mode::Ideal => optimize_ideal(&opts)?,
                Mode::Nonideal => optimize_nonideal(*eps, &opts)?,
            };
            json_line(out, &result)?;
            if !result.converged {
                writeln!(err, "warning: best local search hit its evaluation budget")?;
            }
        }
        Verb::LocalBound { eps } => {
            writeln!(out, "{}", format_sig(local_max_score(*eps)?))?;
        }
        Verb::Npa { level, eps, solver } => {
            let sol = npa_upper_bound(*level, *eps, &sdp_options(solver))?;
            let report = NpaReport {
                level: level.to_string(),
                eps: *eps,
                upper_bound: sol.value,
                min_eigenvalue: sol.min_eigenvalue()?,
                primal_residual: sol.primal_residual,
                dual_residual: sol.dual_residual,
                iterations: sol.iterations,
                status: sol.status,
            };
            json_line(out, &report)?;
            if sol.status != SolveStatus::Converged {
                writeln!(err, "SDP did not converge within {} iterations", sol.iterations)?;
                return Ok(1);
            }
        }
        Verb::Sweep { eps_min, eps_max, steps, level, search, solver } => {
            let opts = SweepOptions {
                opt: opt_options(search),
                level: *level,
                sdp: sdp_options(solver),
                threads: threads_from_env(),
            };
            let records = sweep_epsilon(&uniform_grid(*eps_min, *eps_max, *steps), &opts)?;
            write_records(&records, &mut *out)?;
            let bad: Vec<_> = records.iter().filter(|r| r.status != SweepStatus::Ok).collect();
            if !bad.is_empty() {
                for r in &bad {
                    writeln!(err, "eps = {}: {}", r.eps, r.status)?;
                }
                return Ok(1);
            }
        }
        Verb::Selftest { phi, xi, .. } => {
            let state = match cmd.weights.as_ref().context("selftest weights were not validated")? {
                Weights::Diagonal(w) => assemble_diagonal(w, (*phi, *xi))?,
                Weights::Matrix(m) => assemble_direct_sum(m.clone(), (*phi, *xi))?,
            };
            let report = verify_selftest(&state)?;
            json_line(out, &report)?;
            if report.fidelity < 1.0 - FIDELITY_TOL {
                writeln!(err, "extraction fidelity {} below 1 - {FIDELITY_TOL:e}", report.fidelity)?;
                return Ok(1);
            }
        }
        Verb::Hardy { search } => {
            json_line(out, &optimize_hardy(&opt_options(search))?)?;
        }
    }
    Ok(0)
}
