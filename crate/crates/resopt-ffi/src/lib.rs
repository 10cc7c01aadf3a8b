//! C ABI for the resopt pipeline: parse → validate → lower → solve →
//! report, exposed through opaque handles and status codes.
//!
//! Conventions:
//! - Every fallible function returns a [`ResoptStatus`] and writes its
//!   result through an out-pointer, which is left untouched on failure.
//! - Failures record a human-readable message retrievable with
//!   [`resopt_last_error`]; the message stays valid until the next failing
//!   call on the same thread.
//! - Strings returned through out-pointers are owned by the caller and must
//!   be released with [`resopt_string_free`]; handles with their matching
//!   `*_free` function. All free functions accept `NULL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use resopt::milp::TagSet;
use resopt::model::EnergySystem;
use resopt::solver::lp_file;
use resopt::{
    export_graph, export_yaml, flows, lower, parse, solve_milp, to_csv, GraphFormat, LowerError,
    LowerOptions, MilpModel, Solution, SolveOptions, SolveStatus,
};

/// Result of a call into this library.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResoptStatus {
    /// The call succeeded.
    Ok = 0,
    /// A pointer was null, a string was not UTF-8, or the request does not
    /// apply to the given object.
    InvalidArgument = 1,
    /// The document is not parseable into a system.
    ParseError = 2,
    /// The system violates validation rules.
    ValidationError = 3,
    /// The system cannot be lowered into a solvable model.
    LoweringError = 4,
    /// The model admits no feasible point.
    Infeasible = 5,
    /// The objective is unbounded below.
    Unbounded = 6,
    /// The solver failed numerically or an internal error occurred.
    SolverError = 7,
}

/// Graph document flavour for [`resopt_model_graph`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResoptGraphFormat {
    Dot = 0,
    Graphml = 1,
}

/// Opaque parsed energy system.
pub struct ResoptSystem(EnergySystem);
/// Opaque lowered optimisation model.
pub struct ResoptModel(MilpModel);
/// Opaque solver result.
pub struct ResoptSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: ResoptStatus, message: impl Into<String>) -> ResoptStatus {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(message).expect("NUL bytes were stripped"));
    });
    status
}

/// Runs `f`, translating panics into `SolverError` instead of unwinding
/// across the ABI boundary.
fn guarded(f: impl FnOnce() -> ResoptStatus) -> ResoptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(ResoptStatus::SolverError, "internal panic"),
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn utf8<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, ResoptStatus> {
    if ptr.is_null() {
        return Err(fail(ResoptStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(ResoptStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn give_string(text: String, out: *mut *mut c_char) -> ResoptStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            ResoptStatus::Ok
        }
        Err(_) => fail(ResoptStatus::InvalidArgument, "produced text contains a NUL byte"),
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, ResoptStatus> {
    ptr.as_ref().ok_or_else(|| fail(ResoptStatus::InvalidArgument, format!("{what} is null")))
}

fn need_out<T>(out: *mut T, what: &str) -> Result<(), ResoptStatus> {
    if out.is_null() {
        return Err(fail(ResoptStatus::InvalidArgument, format!("{what} is null")));
    }
    Ok(())
}

/// Message describing the most recent failure on this thread, or null when
/// no call has failed yet. The pointer is invalidated by the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn resopt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(s) => s.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Parses a YAML document into an energy system. `base_dir` resolves
/// relative `file=` series references; pass null for the current directory.
///
/// # Safety
/// `yaml` must be a valid NUL-terminated string; `base_dir` must be null or
/// a valid NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resopt_parse(
    yaml: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut ResoptSystem,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let text = match utf8(yaml, "yaml") {
            Ok(t) => t,
            Err(status) => return status,
        };
        let base = if base_dir.is_null() {
            "."
        } else {
            match utf8(base_dir, "base_dir") {
                Ok(b) => b,
                Err(status) => return status,
            }
        };
        match parse(text, Path::new(base)) {
            Ok(system) => {
                *out = Box::into_raw(Box::new(ResoptSystem(system)));
                ResoptStatus::Ok
            }
            Err(e) => fail(ResoptStatus::ParseError, e.to_string()),
        }
    })
}

/// Validates a system. Returns `Ok` for a clean system; otherwise
/// `ValidationError` with one issue per line in the error message.
///
/// # Safety
/// `system` must be a handle returned by [`resopt_parse`].
#[no_mangle]
pub unsafe extern "C" fn resopt_system_validate(system: *const ResoptSystem) -> ResoptStatus {
    guarded(|| {
        let system = match deref(system, "system") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let report = system.0.validate();
        if report.is_empty() {
            ResoptStatus::Ok
        } else {
            let lines: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
            fail(ResoptStatus::ValidationError, lines.join("\n"))
        }
    })
}

/// Renders the canonical, self-contained YAML form of a system.
///
/// # Safety
/// `system` must be a handle returned by [`resopt_parse`]; `out` must be a
/// valid pointer. The returned string is released with
/// [`resopt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn resopt_system_export_yaml(
    system: *const ResoptSystem,
    out: *mut *mut c_char,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        match deref(system, "system") {
            Ok(system) => give_string(export_yaml(&system.0), out),
            Err(status) => status,
        }
    })
}

/// Lowers a validated system into an optimisation model.
///
/// # Safety
/// `system` must be a handle returned by [`resopt_parse`]; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resopt_system_lower(
    system: *const ResoptSystem,
    time_discrete: bool,
    strict_levels: bool,
    cyclic_storage: bool,
    out: *mut *mut ResoptModel,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let system = match deref(system, "system") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let options = LowerOptions { time_discrete, strict_levels, cyclic_storage };
        match lower(&system.0, &options) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(ResoptModel(model)));
                ResoptStatus::Ok
            }
            Err(e @ LowerError::UnvalidatedSystem(_)) => {
                fail(ResoptStatus::ValidationError, e.to_string())
            }
            Err(e) => fail(ResoptStatus::LoweringError, e.to_string()),
        }
    })
}

/// Solves a model to the given absolute optimality gap (1e-6 is the
/// default elsewhere). On `Ok`, `Infeasible`, and `Unbounded` a solution
/// handle carrying solver statistics is written to `out`; on `SolverError`
/// the handle is left untouched.
///
/// # Safety
/// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resopt_model_solve(
    model: *const ResoptModel,
    abs_gap: f64,
    out: *mut *mut ResoptSolution,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let model = match deref(model, "model") {
            Ok(m) => m,
            Err(status) => return status,
        };
        match solve_milp(&model.0, &SolveOptions { abs_gap }) {
            Ok(solution) => {
                let status = match solution.status {
                    SolveStatus::Optimal => ResoptStatus::Ok,
                    SolveStatus::Infeasible => fail(ResoptStatus::Infeasible, "model is infeasible"),
                    SolveStatus::Unbounded => fail(ResoptStatus::Unbounded, "model is unbounded"),
                };
                *out = Box::into_raw(Box::new(ResoptSolution(solution)));
                status
            }
            Err(e) => fail(ResoptStatus::SolverError, e.to_string()),
        }
    })
}

/// Reads the objective value of an optimal solution.
///
/// # Safety
/// `solution` must be a handle returned by [`resopt_model_solve`]; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn resopt_solution_objective(
    solution: *const ResoptSolution,
    out: *mut f64,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let solution = match deref(solution, "solution") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match solution.0.objective {
            Some(objective) => {
                *out = objective;
                ResoptStatus::Ok
            }
            None => fail(ResoptStatus::InvalidArgument, "solution carries no objective"),
        }
    })
}

/// Reads branch-and-bound node and simplex iteration counts.
///
/// # Safety
/// `solution` must be a handle returned by [`resopt_model_solve`]; `nodes`
/// and `iterations` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn resopt_solution_stats(
    solution: *const ResoptSolution,
    nodes: *mut u64,
    iterations: *mut u64,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(nodes, "nodes") {
            return status;
        }
        if let Err(status) = need_out(iterations, "iterations") {
            return status;
        }
        match deref(solution, "solution") {
            Ok(solution) => {
                *nodes = solution.0.stats.nodes;
                *iterations = solution.0.stats.iterations;
                ResoptStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Renders every flow of an optimal solution as CSV
/// (`time,source,target,value,tags`).
///
/// # Safety
/// `model` and `solution` must be handles from this library belonging to
/// the same pipeline run; `out` must be a valid pointer. The returned
/// string is released with [`resopt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn resopt_flows_csv(
    model: *const ResoptModel,
    solution: *const ResoptSolution,
    out: *mut *mut c_char,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let model = match deref(model, "model") {
            Ok(m) => m,
            Err(status) => return status,
        };
        let solution = match deref(solution, "solution") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match flows(&model.0, &solution.0, &TagSet::new()) {
            Ok(records) => give_string(to_csv(&records), out),
            Err(e) => fail(ResoptStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Renders the model as LP-format text.
///
/// # Safety
/// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
/// be a valid pointer. The returned string is released with
/// [`resopt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn resopt_model_export_lp(
    model: *const ResoptModel,
    out: *mut *mut c_char,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        match deref(model, "model") {
            Ok(model) => give_string(lp_file::export_lp(&model.0).text, out),
            Err(status) => status,
        }
    })
}

/// Renders the `kind,sanitized,original` name table accompanying the LP
/// export, mapping sanitised LP names back to model names.
///
/// # Safety
/// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
/// be a valid pointer. The returned string is released with
/// [`resopt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn resopt_model_lp_names(
    model: *const ResoptModel,
    out: *mut *mut c_char,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        match deref(model, "model") {
            Ok(model) => give_string(lp_file::export_lp(&model.0).name_map_text(), out),
            Err(status) => status,
        }
    })
}

/// Renders the model's node graph as DOT or GraphML text.
///
/// # Safety
/// `model` must be a handle returned by [`resopt_system_lower`]; `out` must
/// be a valid pointer. The returned string is released with
/// [`resopt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn resopt_model_graph(
    model: *const ResoptModel,
    format: ResoptGraphFormat,
    out: *mut *mut c_char,
) -> ResoptStatus {
    guarded(|| {
        if let Err(status) = need_out(out, "out") {
            return status;
        }
        let format = match format {
            ResoptGraphFormat::Dot => GraphFormat::Dot,
            ResoptGraphFormat::Graphml => GraphFormat::GraphMl,
        };
        match deref(model, "model") {
            Ok(model) => give_string(export_graph(&model.0, format), out),
            Err(status) => status,
        }
    })
}

/// Releases a string returned by this library. Accepts null.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn resopt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a system handle. Accepts null.
///
/// # Safety
/// `system` must be null or an unfreed handle from [`resopt_parse`].
#[no_mangle]
pub unsafe extern "C" fn resopt_system_free(system: *mut ResoptSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Releases a model handle. Accepts null.
///
/// # Safety
/// `model` must be null or an unfreed handle from [`resopt_system_lower`].
#[no_mangle]
pub unsafe extern "C" fn resopt_model_free(model: *mut ResoptModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a solution handle. Accepts null.
///
/// # Safety
/// `solution` must be null or an unfreed handle from
/// [`resopt_model_solve`].
#[no_mangle]
pub unsafe extern "C" fn resopt_solution_free(solution: *mut ResoptSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
