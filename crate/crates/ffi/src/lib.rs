//! C ABI over `icsim`: build instances, query their oracles, run the
//! simulator and the verification suite.
//!
//! Every fallible function returns an [`IcsimStatus`]; on failure a message
//! is kept per thread and read back with [`icsim_last_error`]. Objects are
//! opaque handles released with the matching `_free` function.

use icsim::algorithms::AlgorithmKind;
use icsim::cli::{verify_reports, ExperimentConfig};
use icsim::instances::{InstanceDescriptor, InstanceKind, Problem};
use icsim::simulator::{run_spec, SimConfig};
use icsim::verify::write_json_lines;
use icsim::{Error, Outcome, ProblemParams, RngKey, RunResult};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Config = 4,
    BudgetExceeded = 5,
    Io = 6,
    Panic = 7,
    Internal = 8,
}

/// Values accepted by `icsim_problem_new`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcsimInstanceKind {
    Chain = 0,
    ChainTwoPoint = 1,
    ClippedChain = 2,
    QuadraticPlus = 3,
    QuadraticMinus = 4,
    NoisyQuadratic = 5,
}

/// Values accepted by `icsim_run`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcsimAlgorithm {
    MinibatchAcsa = 0,
    SingleMachineAcsa = 1,
    LocalSgd = 2,
    MinibatchSgd = 3,
}

/// Outcome tag written by `icsim_problem_draw`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcsimOutcome {
    Z0 = 0,
    Z1 = 1,
    Z2 = 2,
    Noise = 3,
}

/// Problem class and communication budget.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcsimParams {
    pub h: f64,
    pub b: f64,
    pub sigma: f64,
    pub m: usize,
    pub k: usize,
    pub r: usize,
}

/// Opaque instance handle.
pub struct IcsimProblem {
    inner: Problem,
}

/// Opaque run result handle.
pub struct IcsimRunResult {
    inner: RunResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IcsimStatus {
    match e {
        Error::DimensionMismatch { .. } => IcsimStatus::DimensionMismatch,
        Error::InvalidParameter(_) => IcsimStatus::InvalidArgument,
        Error::QueryBudgetExceeded { .. } => IcsimStatus::BudgetExceeded,
        Error::Config(_) | Error::Json(_) => IcsimStatus::Config,
        Error::Io(_) => IcsimStatus::Io,
        _ => IcsimStatus::Internal,
    }
}

struct Failure(IcsimStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(IcsimStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording its error message and converting panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IcsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IcsimStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            IcsimStatus::Panic
        }
    }
}

fn read_params(p: *const IcsimParams) -> Result<ProblemParams, Failure> {
    // SAFETY: callers of the public functions promise `p` is null or valid.
    let p = unsafe { p.as_ref() }.ok_or_else(|| null("params"))?;
    Ok(ProblemParams::new(p.h, p.b, p.sigma, p.m, p.k, p.r)?)
}

fn kind_of(v: i32) -> Result<InstanceKind, Failure> {
    Ok(match v {
        0 => InstanceKind::Chain,
        1 => InstanceKind::ChainTwoPoint,
        2 => InstanceKind::ClippedChain,
        3 => InstanceKind::QuadraticPlus,
        4 => InstanceKind::QuadraticMinus,
        5 => InstanceKind::NoisyQuadratic,
        _ => {
            return Err(Failure(
                IcsimStatus::InvalidArgument,
                format!("unknown instance kind {v}"),
            ))
        }
    })
}

fn algorithm_of(v: i32) -> Result<AlgorithmKind, Failure> {
    Ok(match v {
        0 => AlgorithmKind::MinibatchAcsa,
        1 => AlgorithmKind::SingleMachineAcsa,
        2 => AlgorithmKind::LocalSgd,
        3 => AlgorithmKind::MinibatchSgd,
        _ => {
            return Err(Failure(
                IcsimStatus::InvalidArgument,
                format!("unknown algorithm {v}"),
            ))
        }
    })
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(IcsimStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(x: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if x.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(x, len))
}

unsafe fn slice_out<'a>(x: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if x.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(x, len))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn icsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds an instance of `kind` (an `IcsimInstanceKind` value) with all
/// parameters derived from `params`.
///
/// # Safety
/// `params` must point to a valid `IcsimParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_new(
    kind: i32,
    params: *const IcsimParams,
    out: *mut *mut IcsimProblem,
) -> IcsimStatus {
    guard(|| {
        let pp = read_params(params)?;
        let problem = InstanceDescriptor::of_kind(kind_of(kind)?).build(&pp)?;
        write(
            out,
            Box::into_raw(Box::new(IcsimProblem { inner: problem })),
            "out",
        )
    })
}

/// Builds an instance from a JSON instance descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string; other pointers as for
/// `icsim_problem_new`.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_from_json(
    json: *const c_char,
    params: *const IcsimParams,
    out: *mut *mut IcsimProblem,
) -> IcsimStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let pp = read_params(params)?;
        let desc: InstanceDescriptor = serde_json::from_str(text).map_err(Error::from)?;
        let problem = desc.build(&pp)?;
        write(
            out,
            Box::into_raw(Box::new(IcsimProblem { inner: problem })),
            "out",
        )
    })
}

/// # Safety
/// `problem` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_free(problem: *mut IcsimProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_dim(
    problem: *const IcsimProblem,
    out: *mut usize,
) -> IcsimStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        write(out, p.inner.dim(), "out")
    })
}

/// Optimal value `F*`.
///
/// # Safety
/// `problem` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_f_star(
    problem: *const IcsimProblem,
    out: *mut f64,
) -> IcsimStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        write(out, p.inner.f_star, "out")
    })
}

/// Exact value and gradient at `x`. `grad` may be null.
///
/// # Safety
/// `x` must hold `len` doubles, `grad` (if not null) room for `len`.
#[no_mangle]
pub unsafe extern "C" fn icsim_problem_eval(
    problem: *const IcsimProblem,
    x: *const f64,
    len: usize,
    value: *mut f64,
    grad: *mut f64,
) -> IcsimStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let x = slice_arg(x, len, "x")?;
        let (f, g) = p.inner.objective.value_grad(x)?;
        write(value, f, "value")?;
        if !grad.is_null() {
            slice_out(grad, len, "grad")?.copy_from_slice(&g);
        }
        Ok(())
    })
}

/// One stochastic oracle draw, a pure function of `x` and the key
/// `(seed, machine, round, k)`. `value` receives NaN when the oracle is
/// first-order only.
///
/// # Safety
/// `x` and `grad` must hold `len` doubles; `value` and `outcome` writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn icsim_problem_draw(
    problem: *const IcsimProblem,
    x: *const f64,
    len: usize,
    seed: u64,
    machine: u64,
    round: u64,
    k: u64,
    grad: *mut f64,
    value: *mut f64,
    outcome: *mut IcsimOutcome,
) -> IcsimStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let x = slice_arg(x, len, "x")?;
        let d = p
            .inner
            .oracle
            .draw(x, RngKey::new(seed, machine, round, k))?;
        slice_out(grad, len, "grad")?.copy_from_slice(&d.gradient);
        write(value, d.value.unwrap_or(f64::NAN), "value")?;
        let z = match d.z {
            Outcome::Z0 => IcsimOutcome::Z0,
            Outcome::Z1 => IcsimOutcome::Z1,
            Outcome::Z2 => IcsimOutcome::Z2,
            Outcome::Noise => IcsimOutcome::Noise,
        };
        write(outcome, z, "outcome")
    })
}

/// Runs `algorithm` (an `IcsimAlgorithm` value) for `params.r` rounds.
///
/// # Safety
/// `problem` must be a live handle, `params` valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_run(
    problem: *const IcsimProblem,
    algorithm: i32,
    params: *const IcsimParams,
    seed: u64,
    out: *mut *mut IcsimRunResult,
) -> IcsimStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let pp = read_params(params)?;
        let res = run_spec(
            &algorithm_of(algorithm)?.into(),
            &p.inner,
            &SimConfig::new(pp, seed),
        )?;
        write(
            out,
            Box::into_raw(Box::new(IcsimRunResult { inner: res })),
            "out",
        )
    })
}

/// # Safety
/// `result` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn icsim_run_result_free(result: *mut IcsimRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of rounds recorded.
///
/// # Safety
/// `result` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_run_result_rounds(
    result: *const IcsimRunResult,
    out: *mut usize,
) -> IcsimStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        write(out, r.inner.per_round_subopt.len(), "out")
    })
}

/// Copies the per-round suboptimality into `buf`, which must have room for
/// exactly the number of rounds.
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn icsim_run_result_suboptimality(
    result: *const IcsimRunResult,
    buf: *mut f64,
    len: usize,
) -> IcsimStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let s = &r.inner.per_round_subopt;
        if len != s.len() {
            return Err(Error::DimensionMismatch {
                expected: s.len(),
                got: len,
            }
            .into());
        }
        slice_out(buf, len, "buf")?.copy_from_slice(s);
        Ok(())
    })
}

/// Largest progress reached by any query.
///
/// # Safety
/// `result` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_run_result_max_prog(
    result: *const IcsimRunResult,
    out: *mut usize,
) -> IcsimStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        write(out, r.inner.max_prog, "out")
    })
}

/// Runs the verification suite for a JSON experiment config. `out_json`
/// receives one report per line (free with `icsim_string_free`), and
/// `all_passed` 1 or 0.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_verify(
    config_json: *const c_char,
    out_json: *mut *mut c_char,
    all_passed: *mut i32,
) -> IcsimStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json(str_arg(config_json, "config_json")?)?;
        let reports = verify_reports(&cfg)?;
        let mut buf = Vec::new();
        write_json_lines(&reports, &mut buf)?;
        let text = CString::new(buf).map_err(|e| Failure(IcsimStatus::Internal, e.to_string()))?;
        write(
            all_passed,
            i32::from(reports.iter().all(|r| r.passed)),
            "all_passed",
        )?;
        write(out_json, text.into_raw(), "out_json")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn icsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Ambient dimension needed for the rotated lower-bound instance; saturates
/// at `UINT64_MAX`.
///
/// # Safety
/// `params` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_required_dimension(
    params: *const IcsimParams,
    out: *mut u64,
) -> IcsimStatus {
    guard(|| {
        let pp = read_params(params)?;
        write(out, icsim::instances::required_dimension(&pp)?, "out")
    })
}

/// Analytic cap on the progress of any zero-respecting method.
///
/// # Safety
/// `params` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icsim_progress_budget(
    params: *const IcsimParams,
    p: f64,
    out: *mut usize,
) -> IcsimStatus {
    guard(|| {
        let pp = read_params(params)?;
        write(out, icsim::instances::progress_budget(&pp, p)?, "out")
    })
}
