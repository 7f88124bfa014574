//! C interface to `plumbing-core`.
//!
//! Graphs and compiled fibrations are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`PlumbingStatus`]; on a
//! non-`OK` status the message is available from [`plumbing_last_error`] on
//! the same thread. Strings returned through `char **` out-parameters are
//! owned by the caller and must be released with [`plumbing_string_free`].

use plumbing_core::fiber::CompiledFibration as CoreCompiled;
use plumbing_core::graph::{GraphError, PlumbingGraph as CoreGraph};
use plumbing_core::invariants::{self, SubstitutionRelation};
use plumbing_core::rational::parse_rational;
use plumbing_core::symplectic::{self, DiskBundleModel, VerifyParams};
use plumbing_core::validate::{validate, ValidatedGraph};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes. The first four match the exit codes of the `plumbing` binary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlumbingStatus {
    Ok = 0,
    /// The graph violates the plumbing hypotheses.
    Rejected = 1,
    /// A numerical or homological check failed.
    CheckFailed = 2,
    InputError = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Opaque parsed graph.
pub struct PlumbingGraph {
    inner: CoreGraph,
}

/// Opaque compiled Lefschetz fibration / open book.
pub struct PlumbingCompiled {
    inner: CoreCompiled,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Ffi<T> = Result<T, (PlumbingStatus, String)>;

fn fail<T>(status: PlumbingStatus, message: impl std::fmt::Display) -> Ffi<T> {
    Err((status, message.to_string()))
}

fn guard(f: impl FnOnce() -> Ffi<PlumbingStatus>) -> PlumbingStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PlumbingStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Ffi<&'a str> {
    if p.is_null() {
        return fail(PlumbingStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(PlumbingStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Ffi<&'a T> {
    p.as_ref()
        .map_or_else(|| fail(PlumbingStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Ffi<()> {
    if out.is_null() {
        return fail(PlumbingStatus::NullPointer, "output pointer is null");
    }
    *out = value;
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Ffi<()> {
    let c = CString::new(text).or_else(|_| fail(PlumbingStatus::Panic, "output contains NUL"))?;
    write_out(out, c.into_raw())
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn validated(graph: &PlumbingGraph) -> Ffi<ValidatedGraph> {
    ValidatedGraph::new(graph.inner.clone()).or_else(|e| fail(PlumbingStatus::Rejected, e))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn plumbing_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn plumbing_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn plumbing_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a graph document. Loops give `REJECTED`; other parse errors give
/// `INPUT_ERROR`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_graph_from_json(json: *const c_char, out: *mut *mut PlumbingGraph) -> PlumbingStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let inner = CoreGraph::from_json_str(text).or_else(|e| match e {
            GraphError::Loop { .. } => fail(PlumbingStatus::Rejected, e),
            e => fail(PlumbingStatus::InputError, e),
        })?;
        write_out(out, Box::into_raw(Box::new(PlumbingGraph { inner })))?;
        Ok(PlumbingStatus::Ok)
    })
}

/// # Safety
/// `graph` must come from [`plumbing_graph_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn plumbing_graph_free(graph: *mut PlumbingGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn plumbing_graph_vertex_count(graph: *const PlumbingGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.vertex_count())
}

/// Writes the validation report as JSON. Returns `OK` when every hypothesis
/// holds and `REJECTED` otherwise; the report is written in both cases.
///
/// # Safety
/// `graph` must be a live handle and `report_json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_graph_validate(
    graph: *const PlumbingGraph,
    report_json: *mut *mut c_char,
) -> PlumbingStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let report = validate(&g.inner);
        write_string(report_json, pretty(&report))?;
        if report.passes() {
            Ok(PlumbingStatus::Ok)
        } else {
            set_error(report.summary());
            Ok(PlumbingStatus::Rejected)
        }
    })
}

/// Compiles the fibration. With `force` nonzero a graph failing the
/// hypotheses is compiled and marked as such.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_compile(
    graph: *const PlumbingGraph,
    force: bool,
    out: *mut *mut PlumbingCompiled,
) -> PlumbingStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let v = if force {
            ValidatedGraph::forced(g.inner.clone()).or_else(|e| fail(PlumbingStatus::Rejected, e))?
        } else {
            validated(g)?
        };
        let inner = plumbing_core::compile(&v);
        write_out(out, Box::into_raw(Box::new(PlumbingCompiled { inner })))?;
        Ok(PlumbingStatus::Ok)
    })
}

/// # Safety
/// `compiled` must come from [`plumbing_compile`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn plumbing_compiled_free(compiled: *mut PlumbingCompiled) {
    if !compiled.is_null() {
        drop(Box::from_raw(compiled));
    }
}

/// Page genus, boundary count and number of vanishing cycles.
///
/// # Safety
/// `compiled` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_compiled_page(
    compiled: *const PlumbingCompiled,
    genus: *mut u64,
    boundary: *mut u64,
    vanishing_cycles: *mut usize,
) -> PlumbingStatus {
    guard(|| {
        let c = deref(compiled, "compiled")?;
        let fiber = c.inner.fiber();
        write_out(genus, fiber.genus)?;
        write_out(boundary, fiber.boundary_count)?;
        write_out(vanishing_cycles, c.inner.monodromy.len())?;
        Ok(PlumbingStatus::Ok)
    })
}

/// The interchange document.
///
/// # Safety
/// `compiled` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_compiled_to_json(compiled: *const PlumbingCompiled, json: *mut *mut c_char) -> PlumbingStatus {
    guard(|| {
        let c = deref(compiled, "compiled")?;
        write_string(json, c.inner.to_json())?;
        Ok(PlumbingStatus::Ok)
    })
}

/// Solves the area system. `areas` is a comma-separated list of B_v/π in
/// vertex order, e.g. `"1,3/2"`.
///
/// # Safety
/// `graph` must be a live handle, `areas` NUL-terminated, `json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_area_system(
    graph: *const PlumbingGraph,
    areas: *const c_char,
    json: *mut *mut c_char,
) -> PlumbingStatus {
    guard(|| {
        let g = validated(deref(graph, "graph")?)?;
        let targets = read_str(areas, "areas")?
            .split(',')
            .map(|s| parse_rational(s.trim()))
            .collect::<Result<Vec<_>, _>>()
            .or_else(|e| fail(PlumbingStatus::InputError, e))?;
        let assignment =
            symplectic::solve_area_system(&g, &targets).or_else(|e| fail(PlumbingStatus::InputError, e))?;
        write_string(json, pretty(&assignment))?;
        Ok(if assignment.verify(&g) {
            PlumbingStatus::Ok
        } else {
            PlumbingStatus::CheckFailed
        })
    })
}

/// Boundary homology of the plumbing as JSON.
///
/// # Safety
/// `graph` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_boundary_homology(graph: *const PlumbingGraph, json: *mut *mut c_char) -> PlumbingStatus {
    guard(|| {
        let g = validated(deref(graph, "graph")?)?;
        write_string(json, pretty(&invariants::boundary_homology(&g)))?;
        Ok(PlumbingStatus::Ok)
    })
}

/// Substitution report against a built-in relation (`builtin` non-NULL) or
/// a relation document (`relation_json` non-NULL). Exactly one must be given.
///
/// # Safety
/// `graph` must be a live handle, the strings NULL or NUL-terminated, `json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_substitute(
    graph: *const PlumbingGraph,
    builtin: *const c_char,
    relation_json: *const c_char,
    json: *mut *mut c_char,
) -> PlumbingStatus {
    guard(|| {
        let g = validated(deref(graph, "graph")?)?;
        let relation = match (builtin.is_null(), relation_json.is_null()) {
            (false, true) => {
                let name = read_str(builtin, "builtin")?;
                invariants::find_relation(name).map_or_else(
                    || fail(PlumbingStatus::InputError, format!("no built-in relation {name:?}")),
                    Ok,
                )?
            }
            (true, false) => SubstitutionRelation::from_json_str(read_str(relation_json, "relation_json")?)
                .or_else(|e| fail(PlumbingStatus::InputError, e))?,
            _ => return fail(PlumbingStatus::InputError, "give exactly one of builtin and relation_json"),
        };
        let report = invariants::substitute(&g, &relation).or_else(|e| fail(PlumbingStatus::CheckFailed, e))?;
        write_string(json, pretty(&report))?;
        Ok(if report.homology.equal {
            PlumbingStatus::Ok
        } else {
            PlumbingStatus::CheckFailed
        })
    })
}

/// Runs the numerical battery on a constants document (NULL for the built-in
/// reference model) and writes the reports. `tolerance <= 0` keeps the
/// default tolerances.
///
/// # Safety
/// `constants_json` must be NULL or NUL-terminated and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn plumbing_verify_model(
    constants_json: *const c_char,
    step: f64,
    samples: usize,
    seed: u64,
    tolerance: f64,
    json: *mut *mut c_char,
) -> PlumbingStatus {
    guard(|| {
        let model = if constants_json.is_null() {
            DiskBundleModel::reference()
        } else {
            DiskBundleModel::from_json_str(read_str(constants_json, "constants_json")?)
                .or_else(|e| fail(PlumbingStatus::InputError, e))?
        };
        if !(step > 0.0 && step.is_finite()) || samples == 0 {
            return fail(PlumbingStatus::InputError, "step and samples must be positive");
        }
        let params = VerifyParams {
            step,
            samples,
            seed,
            tolerance: (tolerance > 0.0).then_some(tolerance),
        };
        let reports = symplectic::verify_model(&model, &params);
        write_string(json, pretty(&reports))?;
        if reports.iter().all(|r| r.certified()) {
            Ok(PlumbingStatus::Ok)
        } else {
            set_error("a numerical check failed");
            Ok(PlumbingStatus::CheckFailed)
        }
    })
}
