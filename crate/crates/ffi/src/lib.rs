//! C ABI over `forestpack`.
//!
//! Every function returns an [`FpStatus`]; on failure the message is kept per
//! thread and read with [`fp_last_error`]. Reports come back as JSON strings
//! owned by the caller and released with [`fp_string_free`]. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use forestpack::connectivity::steiner_connectivity;
use forestpack::counterexample::{bottleneck_certificate, build_lau_counterexample, CounterexampleParams};
use forestpack::io::parse_graph;
use forestpack::packing::{
    decompose_and_pack, exact_pack, pack_spanning_trees, verify_packing, DecomposeConfig, PackOptions, Packing,
};
use forestpack::{Error, MultiGraph, TerminalSystem};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Precondition = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpMode {
    Exact = 0,
    Spanning = 1,
    Decompose = 2,
}

/// A parsed graph together with its terminal groups.
pub struct FpInstance {
    graph: MultiGraph,
    terminals: TerminalSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FpStatus, msg: impl Into<String>) -> FpStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> FpStatus {
    let status = match &e {
        Error::Parse { .. } => FpStatus::Parse,
        Error::Io(_) => FpStatus::Io,
        Error::Invalid(_) | Error::UnknownVertex(_) | Error::UnknownEdge(_) | Error::SizeMismatch(_) => {
            FpStatus::InvalidArgument
        }
        _ => FpStatus::Precondition,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FpStatus) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(FpStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FpStatus> {
    if s.is_null() {
        return Err(fail(FpStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FpStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn put_json(out: *mut *mut c_char, value: &serde_json::Value) -> FpStatus {
    match serde_json::to_string(value) {
        Ok(s) => {
            *out = CString::new(s).expect("JSON has no NUL").into_raw();
            FpStatus::Ok
        }
        Err(e) => fail(FpStatus::InvalidArgument, e.to_string()),
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the text graph format into a new instance.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_instance_parse(text: *const c_char, out: *mut *mut FpInstance) -> FpStatus {
    guard(|| {
        if out.is_null() {
            return fail(FpStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_graph(text) {
            Ok((graph, terminals)) => {
                *out = Box::into_raw(Box::new(FpInstance { graph, terminals }));
                FpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from [`fp_instance_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_instance_free(inst: *mut FpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Vertex, edge and group counts.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_instance_sizes(
    inst: *const FpInstance,
    vertices: *mut usize,
    edges: *mut usize,
    groups: *mut usize,
) -> FpStatus {
    guard(|| {
        if inst.is_null() || vertices.is_null() || edges.is_null() || groups.is_null() {
            return fail(FpStatus::NullPointer, "null argument");
        }
        let inst = &*inst;
        *vertices = inst.graph.vertex_count();
        *edges = inst.graph.edge_count();
        *groups = inst.terminals.groups.len();
        FpStatus::Ok
    })
}

/// Steiner edge-connectivity of one terminal group.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_steiner_connectivity(inst: *const FpInstance, group: usize, out: *mut u64) -> FpStatus {
    guard(|| {
        if inst.is_null() || out.is_null() {
            return fail(FpStatus::NullPointer, "null argument");
        }
        let inst = &*inst;
        let Some(grp) = inst.terminals.groups.get(group) else {
            return fail(FpStatus::InvalidArgument, format!("no group {group}"));
        };
        match steiner_connectivity(&inst.graph, grp) {
            Ok((c, _)) => {
                *out = c;
                FpStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Packs `k` classes and writes a JSON report with `verdict`, `packing`
/// and `passed`. A budget of 0 means unlimited.
///
/// # Safety
/// All pointers must be valid; free `*out_json` with [`fp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fp_pack(
    inst: *const FpInstance,
    k: usize,
    mode: FpMode,
    budget: u64,
    out_json: *mut *mut c_char,
) -> FpStatus {
    guard(|| {
        if inst.is_null() || out_json.is_null() {
            return fail(FpStatus::NullPointer, "null argument");
        }
        if k == 0 {
            return fail(FpStatus::InvalidArgument, "k must be positive");
        }
        let inst = &*inst;
        let (g, ts) = (&inst.graph, &inst.terminals);
        let res: Result<(String, Option<Packing>), Error> = match mode {
            FpMode::Exact => exact_pack(g, ts, k, &PackOptions::with_budget(budget))
                .map(|(o, _)| (o.verdict().to_string(), o.packing().cloned())),
            FpMode::Spanning => pack_spanning_trees(g, k).map(|o| match o.packing() {
                Some(p) => ("FEASIBLE".to_string(), Some(p.clone())),
                None => ("INFEASIBLE".to_string(), None),
            }),
            FpMode::Decompose => {
                let cfg = DecomposeConfig { budget, ..DecomposeConfig::default() };
                decompose_and_pack(g, ts, k, &cfg).map(|o| match o.packing() {
                    Some(p) => ("FEASIBLE".to_string(), Some(p.clone())),
                    None => ("FAIL".to_string(), None),
                })
            }
        };
        match res {
            Ok((verdict, packing)) => {
                let passed = packing.as_ref().map(|p| verify_packing(g, ts, p, &PackOptions::default()).passed());
                let report = serde_json::json!({ "verdict": verdict, "packing": packing, "passed": passed });
                put_json(out_json, &report)
            }
            Err(e) => from_error(e),
        }
    })
}

/// Checks a packing given as JSON (the `packing` field of an [`fp_pack`]
/// report) against the instance.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_verify(inst: *const FpInstance, packing_json: *const c_char, passed: *mut bool) -> FpStatus {
    guard(|| {
        if inst.is_null() || passed.is_null() {
            return fail(FpStatus::NullPointer, "null argument");
        }
        let text = match read_str(packing_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let p: Packing = match serde_json::from_str(text) {
            Ok(p) => p,
            Err(e) => return fail(FpStatus::Parse, e.to_string()),
        };
        let inst = &*inst;
        *passed = verify_packing(&inst.graph, &inst.terminals, &p, &PackOptions::default()).passed();
        FpStatus::Ok
    })
}

/// Builds the extension counterexample and writes its bottleneck report.
///
/// # Safety
/// `out_json` must be valid; free `*out_json` with [`fp_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fp_counterexample(q: usize, k: usize, seed: u64, out_json: *mut *mut c_char) -> FpStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(FpStatus::NullPointer, "null argument");
        }
        let res = build_lau_counterexample(CounterexampleParams::new(q, k, seed)).and_then(|inst| bottleneck_certificate(&inst));
        match res {
            Ok(rep) => match serde_json::to_value(rep) {
                Ok(v) => put_json(out_json, &v),
                Err(e) => fail(FpStatus::InvalidArgument, e.to_string()),
            },
            Err(e) => from_error(e),
        }
    })
}
