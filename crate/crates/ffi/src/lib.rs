//! C interface to `netsup`.
//!
//! Models are opaque handles. Every fallible call returns a [`NetsupStatus`];
//! on any status other than `Ok` and `Negative` the message is available
//! from [`netsup_last_error_message`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and must be released with
//! [`netsup_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use netsup::comm::{build_comm_automaton, BuildOptions};
use netsup::report::{self, SPEC_VERSION};
use netsup::simulate::{simulate, trace_json_lines};
use netsup::synthesis::{closed_loop, solve_dnnscp, synthesize_all, SolveOptions};
use netsup::verify::check_all;
use netsup::{dot, Error, Model};
use serde_json::json;

/// A validated model.
pub struct NetsupModel {
    model: Model,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetsupStatus {
    /// The call succeeded and its verdict is positive.
    Ok = 0,
    /// The call succeeded and its verdict is negative (unsolvable, a
    /// condition fails, a run left the specification).
    Negative = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    Io = 4,
    Json = 5,
    Schema = 6,
    InvalidModel = 7,
    StateCap = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetsupDotTarget {
    Plant = 0,
    Spec = 1,
    Comm = 2,
    Observer = 3,
    ClosedLoop = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NetsupStatus {
    match e {
        Error::Io(_) => NetsupStatus::Io,
        Error::Json(_) => NetsupStatus::Json,
        Error::Schema(_) => NetsupStatus::Schema,
        Error::StateCap { .. } | Error::QueueCap { .. } => NetsupStatus::StateCap,
        _ => NetsupStatus::InvalidModel,
    }
}

/// Runs `f`, translating errors and panics into statuses.
fn guard(f: impl FnOnce() -> Result<NetsupStatus, (NetsupStatus, String)>) -> NetsupStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            NetsupStatus::Panic
        }
    }
}

fn fail(e: Error) -> (NetsupStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (NetsupStatus, String)> {
    if s.is_null() {
        return Err((NetsupStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (NetsupStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn model_ref<'a>(m: *const NetsupModel) -> Result<&'a Model, (NetsupStatus, String)> {
    m.as_ref()
        .map(|h| &h.model)
        .ok_or_else(|| (NetsupStatus::NullArgument, "model is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (NetsupStatus, String)> {
    if out.is_null() {
        return Err((NetsupStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (NetsupStatus, String)> {
    let c = CString::new(s).map_err(|e| (NetsupStatus::Panic, e.to_string()))?;
    write_out(out, c.into_raw())
}

fn verdict(positive: bool) -> NetsupStatus {
    if positive {
        NetsupStatus::Ok
    } else {
        NetsupStatus::Negative
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn netsup_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn netsup_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn netsup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a model document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_model_from_json(json: *const c_char, out: *mut *mut NetsupModel) -> NetsupStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let model = Model::from_json(text).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(NetsupModel { model })))?;
        Ok(NetsupStatus::Ok)
    })
}

/// Reads, parses and validates a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_model_from_file(path: *const c_char, out: *mut *mut NetsupModel) -> NetsupStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        let model = Model::from_file(Path::new(path)).map_err(|e| match e {
            Error::Io(io) => (NetsupStatus::Io, format!("{path}: {io}")),
            e => fail(e),
        })?;
        write_out(out, Box::into_raw(Box::new(NetsupModel { model })))?;
        Ok(NetsupStatus::Ok)
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn netsup_model_free(model: *mut NetsupModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Full solve report as JSON. Returns `Ok` if solvable, `Negative` otherwise.
///
/// # Safety
/// `model` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_solve(model: *const NetsupModel, diagnostic: bool, out_json: *mut *mut c_char) -> NetsupStatus {
    guard(|| {
        let m = model_ref(model)?;
        let opts = SolveOptions {
            diagnostic,
            ..SolveOptions::default()
        };
        let r = solve_dnnscp(&m.plant, &m.spec, &m.network, opts).map_err(fail)?;
        write_string(out_json, report::solve_json(&r).to_string())?;
        Ok(verdict(r.solvable))
    })
}

/// Existence-condition verdicts as JSON. Returns `Ok` if all hold.
///
/// # Safety
/// `model` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_check(model: *const NetsupModel, out_json: *mut *mut c_char) -> NetsupStatus {
    guard(|| {
        let m = model_ref(model)?;
        let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).map_err(fail)?;
        let verdicts = check_all(&gt, &m.network);
        let holds = verdicts.iter().all(|v| v.holds);
        let doc = json!({
            "spec_version": SPEC_VERSION,
            "holds": holds,
            "verdicts": verdicts.iter().map(report::verdict_json).collect::<Vec<_>>(),
        });
        write_string(out_json, doc.to_string())?;
        Ok(verdict(holds))
    })
}

/// Synthesized supervisors as JSON. Without `diagnostic`, an unsolvable
/// model yields `Negative` and leaves `out_json` untouched.
///
/// # Safety
/// `model` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_synthesize(
    model: *const NetsupModel,
    diagnostic: bool,
    out_json: *mut *mut c_char,
) -> NetsupStatus {
    guard(|| {
        let m = model_ref(model)?;
        let opts = SolveOptions {
            diagnostic,
            ..SolveOptions::default()
        };
        let r = solve_dnnscp(&m.plant, &m.spec, &m.network, opts).map_err(fail)?;
        let Some(syn) = &r.synthesis else {
            return Ok(NetsupStatus::Negative);
        };
        let doc = json!({
            "spec_version": SPEC_VERSION,
            "solvable": r.solvable,
            "supervisors": syn.supervisors.iter().map(report::supervisor_json).collect::<Vec<_>>(),
        });
        write_string(out_json, doc.to_string())?;
        Ok(verdict(r.solvable))
    })
}

/// One seeded closed-loop run as JSON lines. Returns `Negative` if the run
/// leaves the specification.
///
/// # Safety
/// `model` must be a live handle; `out_jsonl` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_simulate(
    model: *const NetsupModel,
    seed: u64,
    steps: usize,
    out_jsonl: *mut *mut c_char,
) -> NetsupStatus {
    guard(|| {
        let m = model_ref(model)?;
        let gt = build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).map_err(fail)?;
        let gamma = synthesize_all(&gt, &m.network, BuildOptions::default().max_states).map_err(fail)?;
        let trace = simulate(&gt, &gamma, &m.network, seed, steps);
        let safe = trace.states().all(|x| gt.spec_flag(x));
        write_string(out_jsonl, trace_json_lines(&gt, &trace))?;
        Ok(verdict(safe))
    })
}

/// Graphviz rendering. `supervisor` (1-based) selects the observer for
/// `NetsupDotTarget::Observer` and is ignored otherwise.
///
/// # Safety
/// `model` must be a live handle; `out_dot` must be writable.
#[no_mangle]
pub unsafe extern "C" fn netsup_export_dot(
    model: *const NetsupModel,
    target: NetsupDotTarget,
    supervisor: usize,
    out_dot: *mut *mut c_char,
) -> NetsupStatus {
    guard(|| {
        let m = model_ref(model)?;
        let cap = BuildOptions::default().max_states;
        let comm = || build_comm_automaton(&m.plant, &m.spec, &m.network, BuildOptions::default()).map_err(fail);
        let text = match target {
            NetsupDotTarget::Plant => dot::automaton_to_dot(&m.plant),
            NetsupDotTarget::Spec => dot::automaton_to_dot(&m.spec),
            NetsupDotTarget::Comm => dot::comm_to_dot(&comm()?),
            NetsupDotTarget::Observer => {
                let gt = comm()?;
                let gamma = synthesize_all(&gt, &m.network, cap).map_err(fail)?;
                let s = gamma
                    .get(supervisor.wrapping_sub(1))
                    .ok_or_else(|| (NetsupStatus::Schema, format!("supervisor {supervisor} does not exist")))?;
                dot::supervisor_to_dot(s)
            }
            NetsupDotTarget::ClosedLoop => {
                let gt = comm()?;
                let gamma = synthesize_all(&gt, &m.network, cap).map_err(fail)?;
                let cl = closed_loop(&gt, &gamma, &m.network, cap).map_err(fail)?;
                dot::closed_loop_to_dot(&cl, &gt)
            }
        };
        write_string(out_dot, text)?;
        Ok(NetsupStatus::Ok)
    })
}
