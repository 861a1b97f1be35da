//! Multistart Nelder–Mead maximization of the Cabello score.
//!
//! * ideal: over the constrained family `(α, β, c, δ)` with `φ = ξ = 0`;
//! * nonideal: over the symmetric real ansatz with `e10, e01 ≤ ε`, through a chart
//!   whose image is exactly the feasible set;
//! * Hardy: `q = 0` imposed by putting `c` on the boundary of the normalizable region.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mathcore::{minimize, Complex64, NelderMeadOptions};
use crate::npa::{npa_upper_bound, NpaLevel, SdpOptions, SolveStatus};
use crate::qubit::{self, closed_form_unchecked, AnsatzParams, ConstrainedStateParams, MeasurementParams, QubitError};
use crate::scenario::{local_max_score, CabelloStats};

/// Largest ε accepted by the nonideal optimizer and the sweep.
pub const MAX_EPS: f64 = 0.5;
/// Objective value assigned outside the parameter domain; every feasible value is in `[−1, 1]`.
const PENALTY: f64 = 10.0;
const MAX_RESTARTS: usize = 8;
const RESAMPLE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("eps must lie in [0, {MAX_EPS}], got {0}")]
    InvalidEpsilon(f64),
    #[error("invalid eps grid: {0}")]
    InvalidGrid(String),
    #[error("at least one start is required")]
    NoStarts,
    #[error("optimum left the parameter domain: {0}")]
    Domain(#[from] QubitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptOptions {
    pub starts: usize,
    pub seed: u64,
    /// Simplex diameter at which each local search stops.
    pub tol: f64,
    /// Evaluation budget per local search.
    pub max_evals: usize,
}

impl Default for OptOptions {
    fn default() -> Self {
        Self { starts: 64, seed: 42, tol: 1e-10, max_evals: 20_000 }
    }
}

impl OptOptions {
    fn nelder_mead(&self) -> NelderMeadOptions {
        NelderMeadOptions { tolerance: self.tol, max_evals: self.max_evals, ..Default::default() }
    }
}

/// Ansatz state together with the settings it is measured with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonidealParams {
    #[serde(flatten)]
    pub state: AnsatzParams,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OptParams {
    Constrained(ConstrainedStateParams),
    Ansatz(NonidealParams),
}

impl OptParams {
    pub fn measurements(&self) -> MeasurementParams {
        match self {
            OptParams::Constrained(p) => p.measurements,
            OptParams::Ansatz(p) => {
                MeasurementParams { alpha: p.alpha, beta: p.beta, phi: p.state.phi, xi: p.state.xi }
            }
        }
    }

    pub fn state(&self) -> Result<[Complex64; 4], QubitError> {
        match self {
            OptParams::Constrained(p) => qubit::constrained_state(p),
            OptParams::Ansatz(p) => qubit::ansatz_state(&p.state),
        }
    }

    /// Statistics through the general projector pipeline.
    pub fn simulate(&self) -> Result<CabelloStats, QubitError> {
        qubit::simulate_stats(&self.state()?, &self.measurements())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub score: f64,
    pub params: OptParams,
    pub e10: f64,
    pub e01: f64,
    pub starts_used: usize,
    pub converged: bool,
}

impl OptResult {
    fn from_params(params: OptParams, starts_used: usize, converged: bool) -> Result<Self, OptimizeError> {
        let stats = params.simulate()?;
        Ok(Self { score: stats.score, params, e10: stats.e10, e01: stats.e01, starts_used, converged })
    }
}

/// Independent stream per start: same master seed, stream number = start index.
fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

#[derive(Clone, Debug)]
struct Candidate {
    x: Vec<f64>,
    fx: f64,
    converged: bool,
}

impl Candidate {
    /// Lower objective wins; exact ties go to the lexicographically smaller point.
    fn beats(&self, other: &Candidate) -> bool {
        match self.fx.total_cmp(&other.fx) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                self.x.iter().zip(&other.x).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
                    == Some(std::cmp::Ordering::Less)
            }
        }
    }
}

/// Nelder–Mead followed by restarts from the incumbent until they stop helping.
fn local_search(f: &impl Fn(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Candidate {
    let r = minimize(f, x0, opts);
    let mut best = Candidate { x: r.x, fx: r.fx, converged: r.converged };
    for _ in 0..MAX_RESTARTS {
        let r = minimize(f, &best.x, opts);
        let improved = r.fx < best.fx;
        if r.fx <= best.fx {
            best = Candidate { x: r.x, fx: r.fx, converged: r.converged };
        }
        if !improved {
            break;
        }
    }
    best
}

fn multistart(
    f: impl Fn(&[f64]) -> f64,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> Vec<f64>,
    opts: &OptOptions,
) -> Result<Candidate, OptimizeError> {
    if opts.starts == 0 {
        return Err(OptimizeError::NoStarts);
    }
    let nm = opts.nelder_mead();
    let mut best: Option<Candidate> = None;
    for k in 0..opts.starts {
        let x0 = sample(&mut start_rng(opts.seed, k));
        let cand = local_search(&f, &x0, &nm);
        if best.as_ref().is_none_or(|b| cand.beats(b)) {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one start ran"))
}

fn out_of_open_interval(v: f64, lo: f64, hi: f64) -> Option<f64> {
    if v > lo && v < hi {
        None
    } else {
        Some((lo - v).max(v - hi).max(0.0))
    }
}

// ---------------------------------------------------------------- ideal

fn ideal_objective(x: &[f64]) -> f64 {
    let (a, b, c, d) = (x[0], x[1], x[2], x[3]);
    let mut violation = 0.0;
    let mut bad = false;
    for v in [out_of_open_interval(a, 0.0, PI), out_of_open_interval(b, 0.0, PI)].into_iter().flatten() {
        violation += v;
        bad = true;
    }
    if c < 0.0 {
        violation -= c;
        bad = true;
    }
    if bad {
        return PENALTY + violation;
    }
    let p = ideal_params(x);
    let r = p.radicand();
    if r < 0.0 {
        return PENALTY - r;
    }
    -closed_form_unchecked(a, b, c, d)
}

fn ideal_params(x: &[f64]) -> ConstrainedStateParams {
    ConstrainedStateParams {
        c: x[2],
        delta: qubit::wrap_phase(x[3]),
        measurements: MeasurementParams { alpha: x[0], beta: x[1], phi: 0.0, xi: 0.0 },
    }
}

fn sample_ideal(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let a = rng.gen_range(0.05..PI - 0.05);
    let b = rng.gen_range(0.05..PI - 0.05);
    let cmax = 1.0 / (1.0 + (a / 2.0).tan().powi(2) + (b / 2.0).tan().powi(2)).sqrt();
    let c = rng.gen_range(0.0..1.0) * cmax;
    let d = rng.gen_range(0.0..TAU);
    vec![a, b, c, d]
}

/// Maximizes the closed-form score over `(α, β, c, δ)` with `φ = ξ = 0`.
pub fn optimize_ideal(opts: &OptOptions) -> Result<OptResult, OptimizeError> {
    let best = multistart(ideal_objective, sample_ideal, opts)?;
    OptResult::from_params(OptParams::Constrained(ideal_params(&best.x)), opts.starts, best.converged)
}

/// One local search of the ideal problem started at `start` (phases other than δ are ignored).
pub fn polish_ideal(start: &ConstrainedStateParams, opts: &OptOptions) -> Result<OptResult, OptimizeError> {
    let m = &start.measurements;
    let x0 = [m.alpha, m.beta, start.c, start.delta];
    let best = local_search(&ideal_objective, &x0, &opts.nelder_mead());
    OptResult::from_params(OptParams::Constrained(ideal_params(&best.x)), 1, best.converged)
}

// ---------------------------------------------------------------- nonideal

/// Chart `(θ, ω, τa, τb)` onto the feasible set. Amplitudes:
/// `s00 = cos θ`, `(s01, s11) = r·(cos ω, sin ω)` with `r = sin θ / √(1 + cos²ω)`.
/// Then `e10 = r² cos²(α/2 − ω)`, so writing `α/2 = ω + π/2 + asin(k sin τa)`
/// with `k = min(1, √ε / |r|)` keeps `e10 ≤ ε` identically (likewise for β).
///
/// Both half-angles are defined mod π. When both settings land in `(π, 2π)` the
/// pair is mapped back by `Z ⊗ Z` (`α → 2π − α`, `β → 2π − β`, `s01 → −s01`); the
/// mixed case lies outside the ansatz and is rejected.
fn decode_nonideal(x: &[f64], eps: f64) -> Option<NonidealParams> {
    let (theta, omega, ta, tb) = (x[0], x[1], x[2], x[3]);
    let s00 = theta.cos();
    let r = theta.sin() / (1.0 + omega.cos().powi(2)).sqrt();
    let mut s01 = r * omega.cos();
    let s11 = r * omega.sin();
    let root = eps.sqrt();
    let k = if r.abs() <= root { 1.0 } else { root / r.abs() };
    let setting = |tau: f64| qubit::wrap_phase(2.0 * (omega + FRAC_PI_2 + (k * tau.sin()).asin()));
    let (mut a, mut b) = (setting(ta), setting(tb));
    let lower = |v: f64| v > 0.0 && v < PI;
    let upper = |v: f64| v > PI && v < TAU;
    if upper(a) && upper(b) {
        a = TAU - a;
        b = TAU - b;
        s01 = -s01;
    } else if !(lower(a) && lower(b)) {
        return None;
    }
    Some(NonidealParams { state: AnsatzParams { s00, s01, s11, phi: 0.0, xi: 0.0 }, alpha: a, beta: b })
}

fn nonideal_stats(p: &NonidealParams) -> CabelloStats {
    let state = qubit::ansatz_state_unchecked(&p.state);
    qubit::fast_stats(&state, p.alpha / 2.0, p.beta / 2.0, p.state.phi, p.state.xi)
}

fn sample_nonideal(rng: &mut ChaCha8Rng, eps: f64) -> Vec<f64> {
    let draw = |rng: &mut ChaCha8Rng| {
        vec![
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(-FRAC_PI_2..FRAC_PI_2),
            rng.gen_range(-FRAC_PI_2..FRAC_PI_2),
        ]
    };
    let mut x = draw(rng);
    for _ in 0..RESAMPLE_LIMIT {
        if decode_nonideal(&x, eps).is_some() {
            break;
        }
        x = draw(rng);
    }
    x
}

fn check_eps(eps: f64) -> Result<(), OptimizeError> {
    if !(0.0..=MAX_EPS).contains(&eps) {
        return Err(OptimizeError::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Maximizes the simulated score over the ansatz subject to `e10, e01 ≤ eps`.
/// Every iterate is feasible, so the returned point needs no repair.
pub fn optimize_nonideal(eps: f64, opts: &OptOptions) -> Result<OptResult, OptimizeError> {
    check_eps(eps)?;
    let f = |x: &[f64]| match decode_nonideal(x, eps) {
        Some(p) => -nonideal_stats(&p).score,
        None => PENALTY,
    };
    let best = multistart(f, |rng| sample_nonideal(rng, eps), opts)?;
    let params = decode_nonideal(&best.x, eps).ok_or_else(|| {
        OptimizeError::Domain(QubitError::OutOfRange("no start landed inside the ansatz chart".into()))
    })?;
    OptResult::from_params(OptParams::Ansatz(params), opts.starts, best.converged)
}

// ---------------------------------------------------------------- Hardy

/// `c` at which the `|00⟩` amplitude vanishes, so `q = 0`.
fn hardy_c(alpha: f64, beta: f64) -> f64 {
    1.0 / (1.0 + (alpha / 2.0).tan().powi(2) + (beta / 2.0).tan().powi(2)).sqrt()
}

fn hardy_params(alpha: f64, beta: f64) -> ConstrainedStateParams {
    ConstrainedStateParams {
        c: hardy_c(alpha, beta),
        delta: 0.0,
        measurements: MeasurementParams { alpha, beta, phi: 0.0, xi: 0.0 },
    }
}

/// `p` of the Hardy family at `(α, β)`; `None` outside `(0, π)²`.
pub fn hardy_probability(alpha: f64, beta: f64) -> Option<f64> {
    if out_of_open_interval(alpha, 0.0, PI).is_some() || out_of_open_interval(beta, 0.0, PI).is_some() {
        return None;
    }
    let state = qubit::constrained_state_unchecked(&hardy_params(alpha, beta));
    Some(qubit::fast_stats(&state, alpha / 2.0, beta / 2.0, 0.0, 0.0).p)
}

/// Maximizes `p` subject to `q = 0` and both zero-probability constraints.
pub fn optimize_hardy(opts: &OptOptions) -> Result<OptResult, OptimizeError> {
    let f = |x: &[f64]| match hardy_probability(x[0], x[1]) {
        Some(p) => -p,
        None => {
            PENALTY
                + out_of_open_interval(x[0], 0.0, PI).unwrap_or(0.0)
                + out_of_open_interval(x[1], 0.0, PI).unwrap_or(0.0)
        }
    };
    let sample = |rng: &mut ChaCha8Rng| vec![rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.05..PI - 0.05)];
    let best = multistart(f, sample, opts)?;
    OptResult::from_params(OptParams::Constrained(hardy_params(best.x[0], best.x[1])), opts.starts, best.converged)
}

// ---------------------------------------------------------------- sweep

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStatus {
    Ok,
    /// The SDP stopped at its iteration cap; the upper column is the last iterate.
    MaxIter,
    /// Some column could not be computed and holds NaN.
    Failed,
}

impl fmt::Display for SweepStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepStatus::Ok => "ok",
            SweepStatus::MaxIter => "maxiter",
            SweepStatus::Failed => "failed",
        })
    }
}

impl FromStr for SweepStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(SweepStatus::Ok),
            "maxiter" => Ok(SweepStatus::MaxIter),
            "failed" => Ok(SweepStatus::Failed),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub local_bound: f64,
    pub quantum_lower: f64,
    pub quantum_upper: f64,
    pub level: NpaLevel,
    pub status: SweepStatus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub opt: OptOptions,
    pub level: NpaLevel,
    pub sdp: SdpOptions,
    /// Worker threads; 0 or 1 runs serially.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            opt: OptOptions::default(),
            level: NpaLevel::Two,
            sdp: SdpOptions::default(),
            threads: threads_from_env(),
        }
    }
}

/// `CABELLO_THREADS`, or 0 when unset or unparsable.
pub fn threads_from_env() -> usize {
    std::env::var("CABELLO_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

fn sweep_point(eps: f64, opts: &SweepOptions) -> SweepRecord {
    let mut status = SweepStatus::Ok;
    let local_bound = local_max_score(eps).unwrap_or_else(|_| {
        status = SweepStatus::Failed;
        f64::NAN
    });
    let quantum_lower = optimize_nonideal(eps, &opts.opt).map(|r| r.score).unwrap_or_else(|_| {
        status = SweepStatus::Failed;
        f64::NAN
    });
    let quantum_upper = match npa_upper_bound(opts.level, eps, &opts.sdp) {
        Ok(sol) => {
            if sol.status == SolveStatus::MaxIter && status == SweepStatus::Ok {
                status = SweepStatus::MaxIter;
            }
            sol.value
        }
        Err(_) => {
            status = SweepStatus::Failed;
            f64::NAN
        }
    };
    SweepRecord { eps, local_bound, quantum_lower, quantum_upper, level: opts.level, status }
}

/// Local bound, ansatz lower bound and NPA upper bound at each grid point, in grid order.
pub fn sweep_epsilon(grid: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRecord>, OptimizeError> {
    for &e in grid {
        if !(0.0..=MAX_EPS).contains(&e) {
            return Err(OptimizeError::InvalidGrid(format!("value {e} outside [0, {MAX_EPS}]")));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OptimizeError::InvalidGrid("values must be strictly ascending".into()));
    }
    if opts.opt.starts == 0 {
        return Err(OptimizeError::NoStarts);
    }

    let workers = opts.threads.min(grid.len());
    if workers <= 1 {
        return Ok(grid.iter().map(|&e| sweep_point(e, opts)).collect());
    }
    let mut out: Vec<Option<SweepRecord>> = vec![None; grid.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..grid.len()).step_by(workers).map(|i| (i, sweep_point(grid[i], opts))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, rec) in h.join().expect("sweep worker panicked") {
                out[i] = Some(rec);
            }
        }
    });
    Ok(out.into_iter().map(|r| r.expect("every grid point is assigned to a worker")).collect())
}
