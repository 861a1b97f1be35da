//! C ABI over the `cabello` library.
//!
//! Every fallible entry point returns a [`CabelloStatus`] and writes its result
//! through an out-pointer. On failure a message is stored per thread and can
//! be fetched with [`cabello_last_error`]. Results that own heap data are
//! returned as opaque handles, each with its own `*_free` function; strings
//! returned by the library are released with [`cabello_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cabello::npa::{npa_upper_bound, NpaLevel, SdpOptions, SolveStatus};
use cabello::optimize::{
    optimize_hardy, optimize_ideal, optimize_nonideal, sweep_epsilon, OptOptions, OptResult, SweepOptions, SweepRecord,
    SweepStatus,
};
use cabello::qubit::{closed_form_score, ConstrainedStateParams, MeasurementParams};
use cabello::scenario::local_max_score;
use cabello::selftest::{assemble_diagonal, verify_selftest};
use cabello::table::write_records;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CabelloStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The computation finished but did not meet its convergence criterion;
    /// the out-parameter still holds the last iterate.
    NotConverged = 3,
    NumericalFailure = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CabelloNpaLevel {
    One = 0,
    OneAB = 1,
    Two = 2,
    Three = 3,
}

impl From<CabelloNpaLevel> for NpaLevel {
    fn from(l: CabelloNpaLevel) -> Self {
        match l {
            CabelloNpaLevel::One => NpaLevel::One,
            CabelloNpaLevel::OneAB => NpaLevel::OneAB,
            CabelloNpaLevel::Two => NpaLevel::Two,
            CabelloNpaLevel::Three => NpaLevel::Three,
        }
    }
}

impl From<NpaLevel> for CabelloNpaLevel {
    fn from(l: NpaLevel) -> Self {
        match l {
            NpaLevel::One => CabelloNpaLevel::One,
            NpaLevel::OneAB => CabelloNpaLevel::OneAB,
            NpaLevel::Two => CabelloNpaLevel::Two,
            NpaLevel::Three => CabelloNpaLevel::Three,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloConstrainedParams {
    pub c: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub xi: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloOptOptions {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_evals: usize,
}

impl From<CabelloOptOptions> for OptOptions {
    fn from(o: CabelloOptOptions) -> Self {
        OptOptions { starts: o.starts, seed: o.seed, tol: o.tol, max_evals: o.max_evals }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloSdpOptions {
    pub rho: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl From<CabelloSdpOptions> for SdpOptions {
    fn from(o: CabelloSdpOptions) -> Self {
        SdpOptions { rho: o.rho, tol: o.tol, max_iter: o.max_iter }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloNpaResult {
    pub value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

/// Scalar fields of an optimization result.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloOptSummary {
    pub score: f64,
    pub e10: f64,
    pub e01: f64,
    pub alpha: f64,
    pub beta: f64,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CabelloSweepRecord {
    pub eps: f64,
    pub local_bound: f64,
    pub quantum_lower: f64,
    pub quantum_upper: f64,
    pub level: CabelloNpaLevel,
    /// 0 ok, 1 iteration cap reached, 2 failed.
    pub status: u32,
}

impl From<&SweepRecord> for CabelloSweepRecord {
    fn from(r: &SweepRecord) -> Self {
        Self {
            eps: r.eps,
            local_bound: r.local_bound,
            quantum_lower: r.quantum_lower,
            quantum_upper: r.quantum_upper,
            level: r.level.into(),
            status: match r.status {
                SweepStatus::Ok => 0,
                SweepStatus::MaxIter => 1,
                SweepStatus::Failed => 2,
            },
        }
    }
}

/// Opaque optimization result.
pub struct CabelloOptResult(OptResult);

/// Opaque list of sweep records.
pub struct CabelloSweep(Vec<SweepRecord>);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

struct Failure(CabelloStatus, String);

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure(CabelloStatus::InvalidArgument, e.to_string())
    }

    fn numerical(e: impl std::fmt::Display) -> Self {
        Failure(CabelloStatus::NumericalFailure, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<CabelloStatus, Failure>) -> CabelloStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CabelloStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure(CabelloStatus::NullPointer, format!("{name} is null")));
    }
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cabello_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Free with
/// [`cabello_string_free`].
#[no_mangle]
pub extern "C" fn cabello_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone()).map_or(ptr::null_mut(), into_c_string)
}

/// # Safety
/// `s` must be null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn cabello_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn cabello_opt_options_default() -> CabelloOptOptions {
    let o = OptOptions::default();
    CabelloOptOptions { starts: o.starts, seed: o.seed, tol: o.tol, max_evals: o.max_evals }
}

#[no_mangle]
pub extern "C" fn cabello_sdp_options_default() -> CabelloSdpOptions {
    let o = SdpOptions::default();
    CabelloSdpOptions { rho: o.rho, tol: o.tol, max_iter: o.max_iter }
}

/// Local hidden-variable maximum of `p − q` with both constraints at most `eps`.
///
/// # Safety
/// `out` must be valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn cabello_local_bound(eps: f64, out: *mut f64) -> CabelloStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = local_max_score(eps).map_err(Failure::invalid)?;
        Ok(CabelloStatus::Ok)
    })
}

/// Closed-form score of the constrained two-qubit family.
///
/// # Safety
/// `params` must point to a valid struct and `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_closed_form_score(
    params: *const CabelloConstrainedParams,
    out: *mut f64,
) -> CabelloStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = &*params;
        let p = ConstrainedStateParams {
            c: p.c,
            delta: p.delta,
            measurements: MeasurementParams { alpha: p.alpha, beta: p.beta, phi: p.phi, xi: p.xi },
        };
        *out = closed_form_score(&p).map_err(Failure::invalid)?;
        Ok(CabelloStatus::Ok)
    })
}

unsafe fn optimize_with(
    opts: *const CabelloOptOptions,
    out: *mut *mut CabelloOptResult,
    run: impl FnOnce(&OptOptions) -> Result<OptResult, cabello::optimize::OptimizeError>,
) -> CabelloStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let opts = if opts.is_null() { OptOptions::default() } else { (*opts).into() };
        let r = run(&opts).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(CabelloOptResult(r)));
        Ok(CabelloStatus::Ok)
    })
}

/// Multistart search over the constrained family. `opts` may be null for defaults.
///
/// # Safety
/// `opts` must be null or valid; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_optimize_ideal(
    opts: *const CabelloOptOptions,
    out: *mut *mut CabelloOptResult,
) -> CabelloStatus {
    optimize_with(opts, out, optimize_ideal)
}

/// Best ansatz score with both constraint probabilities at most `eps`.
///
/// # Safety
/// As for [`cabello_optimize_ideal`].
#[no_mangle]
pub unsafe extern "C" fn cabello_optimize_nonideal(
    eps: f64,
    opts: *const CabelloOptOptions,
    out: *mut *mut CabelloOptResult,
) -> CabelloStatus {
    optimize_with(opts, out, |o| optimize_nonideal(eps, o))
}

/// Best Hardy probability; the summary's score is `p` since `q = 0`.
///
/// # Safety
/// As for [`cabello_optimize_ideal`].
#[no_mangle]
pub unsafe extern "C" fn cabello_optimize_hardy(
    opts: *const CabelloOptOptions,
    out: *mut *mut CabelloOptResult,
) -> CabelloStatus {
    optimize_with(opts, out, optimize_hardy)
}

/// # Safety
/// `h` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_opt_result_summary(
    h: *const CabelloOptResult,
    out: *mut CabelloOptSummary,
) -> CabelloStatus {
    guard(|| {
        non_null(h, "handle")?;
        non_null(out, "out")?;
        let r = &(*h).0;
        let m = r.params.measurements();
        *out = CabelloOptSummary {
            score: r.score,
            e10: r.e10,
            e01: r.e01,
            alpha: m.alpha,
            beta: m.beta,
            converged: r.converged,
        };
        Ok(CabelloStatus::Ok)
    })
}

/// Full result as JSON, or null on a null handle. Free with [`cabello_string_free`].
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cabello_opt_result_to_json(h: *const CabelloOptResult) -> *mut c_char {
    if h.is_null() {
        set_error("handle is null");
        return ptr::null_mut();
    }
    serde_json::to_string(&(*h).0).map_or(ptr::null_mut(), into_c_string)
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cabello_opt_result_free(h: *mut CabelloOptResult) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// NPA upper bound. Returns `NotConverged` with `out` filled when the solver
/// stops at its iteration cap. `opts` may be null for defaults.
///
/// # Safety
/// `opts` must be null or valid; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_npa_upper_bound(
    level: CabelloNpaLevel,
    eps: f64,
    opts: *const CabelloSdpOptions,
    out: *mut CabelloNpaResult,
) -> CabelloStatus {
    guard(|| {
        non_null(out, "out")?;
        let opts = if opts.is_null() { SdpOptions::default() } else { (*opts).into() };
        let sol = npa_upper_bound(level.into(), eps, &opts).map_err(Failure::invalid)?;
        *out = CabelloNpaResult {
            value: sol.value,
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
            iterations: sol.iterations,
        };
        Ok(match sol.status {
            SolveStatus::Converged => CabelloStatus::Ok,
            SolveStatus::MaxIter => CabelloStatus::NotConverged,
        })
    })
}

/// Sweep over `len` ascending values in `grid`. Null option pointers select defaults;
/// `threads` = 0 runs serially.
///
/// # Safety
/// `grid` must be valid for `len` reads; the option pointers must be null or valid;
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_sweep(
    grid: *const f64,
    len: usize,
    level: CabelloNpaLevel,
    opt: *const CabelloOptOptions,
    sdp: *const CabelloSdpOptions,
    threads: usize,
    out: *mut *mut CabelloSweep,
) -> CabelloStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let grid: &[f64] = if len == 0 {
            &[]
        } else {
            non_null(grid, "grid")?;
            std::slice::from_raw_parts(grid, len)
        };
        let opts = SweepOptions {
            opt: if opt.is_null() { OptOptions::default() } else { (*opt).into() },
            level: level.into(),
            sdp: if sdp.is_null() { SdpOptions::default() } else { (*sdp).into() },
            threads,
        };
        let records = sweep_epsilon(grid, &opts).map_err(Failure::invalid)?;
        let status = if records.iter().all(|r| r.status == SweepStatus::Ok) {
            CabelloStatus::Ok
        } else {
            CabelloStatus::NotConverged
        };
        *out = Box::into_raw(Box::new(CabelloSweep(records)));
        Ok(status)
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cabello_sweep_len(h: *const CabelloSweep) -> usize {
    if h.is_null() {
        0
    } else {
        (*h).0.len()
    }
}

/// # Safety
/// `h` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_sweep_record(
    h: *const CabelloSweep,
    index: usize,
    out: *mut CabelloSweepRecord,
) -> CabelloStatus {
    guard(|| {
        non_null(h, "handle")?;
        non_null(out, "out")?;
        let records = &(*h).0;
        let r = records
            .get(index)
            .ok_or_else(|| Failure::invalid(format!("index {index} out of range for {} records", records.len())))?;
        *out = r.into();
        Ok(CabelloStatus::Ok)
    })
}

/// Records as CSV text. Free with [`cabello_string_free`].
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cabello_sweep_to_csv(h: *const CabelloSweep) -> *mut c_char {
    if h.is_null() {
        set_error("handle is null");
        return ptr::null_mut();
    }
    let mut buf = Vec::new();
    match write_records(&(*h).0, &mut buf) {
        Ok(()) => String::from_utf8(buf).map_or(ptr::null_mut(), into_c_string),
        Err(e) => {
            set_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cabello_sweep_free(h: *mut CabelloSweep) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Extraction fidelity for a diagonal direct sum of optimal blocks with the
/// given `n` weights and measurement phases.
///
/// # Safety
/// `weights` must be valid for `n` reads and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn cabello_selftest_fidelity(
    weights: *const f64,
    n: usize,
    phi: f64,
    xi: f64,
    out: *mut f64,
) -> CabelloStatus {
    guard(|| {
        non_null(weights, "weights")?;
        non_null(out, "out")?;
        let w = std::slice::from_raw_parts(weights, n);
        let state = assemble_diagonal(w, (phi, xi)).map_err(Failure::invalid)?;
        *out = verify_selftest(&state).map_err(Failure::numerical)?.fidelity;
        Ok(CabelloStatus::Ok)
    })
}
