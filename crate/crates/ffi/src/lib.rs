//! C interface to the lslab local-search laboratory.
//!
//! Handles (`LsGraph`, `LsModel`, `LsCnf`) are opaque; create them through
//! the constructors here, pass them by pointer, release them with the
//! matching `*_free`. Every fallible call returns an [`LsStatus`]; on any
//! non-`Ok` status, [`ls_last_error`] holds a message for the calling
//! thread until the next failing call. Panics never unwind across the
//! boundary; they are reported as `LsStatus_Internal`.

// The pointer contract is the module-level one above; per-function Safety
// sections would repeat it verbatim.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::fmt::Display;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use lslab::graphs::{GenSpec, Graph, GraphError, GraphFamily, WeightScheme};
use lslab::maxcut::{brute_force_optimum, BRUTE_FORCE_CAP};
use lslab::qlearn::{self, LinearQ, TrainError};
use lslab::sat::{dpll_sat_capped, CnfDist, CnfError, CnfFormula, DEFAULT_VAR_CAP};
use lslab::satsearch::{softtabu_sat_solve, walksat, WalksatConfig};
use lslab::search::{self, TabuConfig};
use lslab::softtabu::{self, FeatureSpec};
use lslab::{seeds, TieBreak};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    /// A pointer was null or an argument was out of range.
    InvalidArgument = 1,
    /// Input text (instance file, model file, distribution spec) was malformed.
    ParseError = 2,
    IoError = 3,
    /// Unexpected failure; a bug if it ever surfaces.
    Internal = 4,
}

/// Opaque weighted-graph handle.
pub struct LsGraph {
    _private: [u8; 0],
}

/// Opaque linear-policy handle.
pub struct LsModel {
    _private: [u8; 0],
}

/// Opaque CNF formula handle.
pub struct LsCnf {
    _private: [u8; 0],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: LsStatus, msg: impl Display) -> LsStatus {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn guard(f: impl FnOnce() -> LsStatus) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LsStatus::Internal, "panic inside library call"),
    }
}

unsafe fn arg_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, LsStatus> {
    if ptr.is_null() {
        return Err(fail(LsStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(LsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_ptr<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, LsStatus> {
    if ptr.is_null() {
        return Err(fail(LsStatus::InvalidArgument, format!("{what} is null")));
    }
    Ok(&mut *ptr)
}

unsafe fn graph_ref<'a>(g: *const LsGraph) -> Result<&'a Graph, LsStatus> {
    if g.is_null() {
        return Err(fail(LsStatus::InvalidArgument, "graph handle is null"));
    }
    Ok(&*(g as *const Graph))
}

unsafe fn model_ref<'a>(m: *const LsModel) -> Result<&'a LinearQ, LsStatus> {
    if m.is_null() {
        return Err(fail(LsStatus::InvalidArgument, "model handle is null"));
    }
    Ok(&*(m as *const LinearQ))
}

unsafe fn cnf_ref<'a>(f: *const LsCnf) -> Result<&'a CnfFormula, LsStatus> {
    if f.is_null() {
        return Err(fail(LsStatus::InvalidArgument, "formula handle is null"));
    }
    Ok(&*(f as *const CnfFormula))
}

fn graph_err(e: GraphError) -> LsStatus {
    let status = match &e {
        GraphError::InvalidSpec(_) | GraphError::InvalidGraph(_) => LsStatus::InvalidArgument,
        GraphError::Parse { .. } => LsStatus::ParseError,
        GraphError::Io(_) => LsStatus::IoError,
    };
    fail(status, e)
}

fn cnf_err(e: CnfError) -> LsStatus {
    let status = match &e {
        CnfError::Parse { .. } => LsStatus::ParseError,
        CnfError::Invalid(_) | CnfError::InvalidSpec(_) | CnfError::VarCap(..) => {
            LsStatus::InvalidArgument
        }
        CnfError::RejectionBudget { .. } => LsStatus::Internal,
        CnfError::Io(_) => LsStatus::IoError,
    };
    fail(status, e)
}

fn model_err(e: TrainError) -> LsStatus {
    let status = match &e {
        TrainError::ModelFormat { .. } => LsStatus::ParseError,
        TrainError::Io(_) => LsStatus::IoError,
        _ => LsStatus::Internal,
    };
    fail(status, e)
}

/// Draws a random graph. `family` is "er" or "ba", `weights` is "unit" or
/// "signed_unit". On success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ls_graph_generate(
    family: *const c_char,
    n: usize,
    param: f64,
    weights: *const c_char,
    seed: u64,
    out: *mut *mut LsGraph,
) -> LsStatus {
    guard(|| {
        let out = match out_ptr(out, "out") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let family = match arg_str(family, "family") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let weights = match arg_str(weights, "weights") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let Some(family) = GraphFamily::parse(family) else {
            return fail(LsStatus::InvalidArgument, format!("unknown family '{family}'"));
        };
        let Some(weights) = WeightScheme::parse(weights) else {
            return fail(LsStatus::InvalidArgument, format!("unknown weights '{weights}'"));
        };
        match Graph::generate(&GenSpec { family, n, param, weights, seed }) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(g)) as *mut LsGraph;
                LsStatus::Ok
            }
            Err(e) => graph_err(e),
        }
    })
}

/// Loads an edge-list instance file. On success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ls_graph_load_gset_file(
    path: *const c_char,
    out: *mut *mut LsGraph,
) -> LsStatus {
    guard(|| {
        let out = match out_ptr(out, "out") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match Graph::load_gset(Path::new(path)) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(g)) as *mut LsGraph;
                LsStatus::Ok
            }
            Err(e) => graph_err(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ls_graph_save_gset_file(
    g: *const LsGraph,
    path: *const c_char,
) -> LsStatus {
    guard(|| {
        let g = match graph_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match g.save_gset(Path::new(path)) {
            Ok(()) => LsStatus::Ok,
            Err(e) => graph_err(e),
        }
    })
}

/// Vertex count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ls_graph_vertex_count(g: *const LsGraph) -> usize {
    if g.is_null() {
        0
    } else {
        (*(g as *const Graph)).n()
    }
}

/// Edge count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ls_graph_edge_count(g: *const LsGraph) -> usize {
    if g.is_null() {
        0
    } else {
        (*(g as *const Graph)).edge_count()
    }
}

/// Releases a graph handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ls_graph_free(g: *mut LsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g as *mut Graph));
    }
}

/// Exact optimum by enumeration. Rejects graphs with more than 24 vertices.
#[no_mangle]
pub unsafe extern "C" fn ls_maxcut_brute_force(
    g: *const LsGraph,
    best_value: *mut f64,
) -> LsStatus {
    guard(|| {
        let g = match graph_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let out = match out_ptr(best_value, "best_value") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if g.n() > BRUTE_FORCE_CAP {
            return fail(
                LsStatus::InvalidArgument,
                format!("{} vertices exceeds the enumeration cap of {BRUTE_FORCE_CAP}", g.n()),
            );
        }
        *out = brute_force_optimum(g).0;
        LsStatus::Ok
    })
}

/// Greedy ascent from a seeded random start; writes the best cut found.
#[no_mangle]
pub unsafe extern "C" fn ls_maxcut_mca(
    g: *const LsGraph,
    seed: u64,
    best_value: *mut f64,
) -> LsStatus {
    guard(|| {
        let g = match graph_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let out = match out_ptr(best_value, "best_value") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let mut rng = seeds::rng(seed, "start", 0);
        let start = (0..g.n()).map(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect();
        *out = search::mca(g, start).best_value;
        LsStatus::Ok
    })
}

/// Tabu search from a seeded random start; writes the best cut found.
#[no_mangle]
pub unsafe extern "C" fn ls_maxcut_tabu(
    g: *const LsGraph,
    tenure: u64,
    max_steps: u64,
    aspiration: bool,
    seed: u64,
    best_value: *mut f64,
) -> LsStatus {
    guard(|| {
        let g = match graph_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let out = match out_ptr(best_value, "best_value") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let mut rng = seeds::rng(seed, "start", 0);
        let start = (0..g.n()).map(|_| rand::Rng::random_bool(&mut rng, 0.5)).collect();
        let cfg = TabuConfig {
            tenure,
            max_steps,
            aspiration,
            tie_break: TieBreak::LowestIndex,
        };
        *out = search::tabu(g, start, &cfg, seeds::derive(seed, "tabu", 0)).best_value;
        LsStatus::Ok
    })
}

/// Loads a saved linear policy. On success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ls_model_load_file(
    path: *const c_char,
    out: *mut *mut LsModel,
) -> LsStatus {
    guard(|| {
        let out = match out_ptr(out, "out") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match qlearn::load_model(Path::new(path)) {
            Ok(q) => {
                *out = Box::into_raw(Box::new(q)) as *mut LsModel;
                LsStatus::Ok
            }
            Err(e) => model_err(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn ls_model_save_file(
    m: *const LsModel,
    path: *const c_char,
) -> LsStatus {
    guard(|| {
        let q = match model_ref(m) {
            Ok(q) => q,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match qlearn::save_model(q, Path::new(path)) {
            Ok(()) => LsStatus::Ok,
            Err(e) => model_err(e),
        }
    })
}

/// Releases a model handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ls_model_free(m: *mut LsModel) {
    if !m.is_null() {
        drop(Box::from_raw(m as *mut LinearQ));
    }
}

/// Greedy policy rollouts on one graph; writes the best cut over
/// `episodes` episodes of `horizon_mult * n` flips each.
#[no_mangle]
pub unsafe extern "C" fn ls_softtabu_evaluate(
    m: *const LsModel,
    g: *const LsGraph,
    episodes: u32,
    horizon_mult: u32,
    seed: u64,
    best_value: *mut f64,
) -> LsStatus {
    guard(|| {
        let q = match model_ref(m) {
            Ok(q) => q,
            Err(s) => return s,
        };
        let g = match graph_ref(g) {
            Ok(g) => g,
            Err(s) => return s,
        };
        let out = match out_ptr(best_value, "best_value") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if q.n_features() != softtabu::N_FEATURES {
            return fail(
                LsStatus::InvalidArgument,
                format!("model has {} features, expected {}", q.n_features(), softtabu::N_FEATURES),
            );
        }
        let spec = FeatureSpec::default();
        *out = softtabu::evaluate(q, g, episodes, horizon_mult, &spec, seed).best_value;
        LsStatus::Ok
    })
}

/// Parses a DIMACS CNF file. On success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ls_cnf_parse_dimacs_file(
    path: *const c_char,
    out: *mut *mut LsCnf,
) -> LsStatus {
    guard(|| {
        let out = match out_ptr(out, "out") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match CnfFormula::load_dimacs(Path::new(path)) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(f)) as *mut LsCnf;
                LsStatus::Ok
            }
            Err(e) => cnf_err(e),
        }
    })
}

/// Draws a formula from a distribution spec like "rand3:50:213" or
/// "color5:20:0.5". On success `*out` owns the new handle.
#[no_mangle]
pub unsafe extern "C" fn ls_cnf_generate(
    dist: *const c_char,
    seed: u64,
    out: *mut *mut LsCnf,
) -> LsStatus {
    guard(|| {
        let out = match out_ptr(out, "out") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let dist = match arg_str(dist, "dist") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let dist = match CnfDist::parse(dist) {
            Ok(d) => d,
            Err(e) => return cnf_err(e),
        };
        match dist.generate(seed) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(f)) as *mut LsCnf;
                LsStatus::Ok
            }
            Err(e) => cnf_err(e),
        }
    })
}

/// Variable count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ls_cnf_var_count(f: *const LsCnf) -> usize {
    if f.is_null() {
        0
    } else {
        (*(f as *const CnfFormula)).n_vars()
    }
}

/// Clause count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ls_cnf_clause_count(f: *const LsCnf) -> usize {
    if f.is_null() {
        0
    } else {
        (*(f as *const CnfFormula)).n_clauses()
    }
}

/// Releases a formula handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn ls_cnf_free(f: *mut LsCnf) {
    if !f.is_null() {
        drop(Box::from_raw(f as *mut CnfFormula));
    }
}

/// Complete satisfiability decision. `var_cap` bounds the accepted
/// variable count; pass 0 for the default cap of 200.
#[no_mangle]
pub unsafe extern "C" fn ls_dpll_sat(
    f: *const LsCnf,
    var_cap: usize,
    is_sat: *mut bool,
) -> LsStatus {
    guard(|| {
        let f = match cnf_ref(f) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let out = match out_ptr(is_sat, "is_sat") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let cap = if var_cap == 0 { DEFAULT_VAR_CAP } else { var_cap };
        match dpll_sat_capped(f, cap) {
            Ok(model) => {
                *out = model.is_some();
                LsStatus::Ok
            }
            Err(e) => cnf_err(e),
        }
    })
}

/// One WalkSAT trial from a seeded random assignment.
#[no_mangle]
pub unsafe extern "C" fn ls_walksat(
    f: *const LsCnf,
    p: f64,
    max_steps: u64,
    freebie: bool,
    seed: u64,
    solved: *mut bool,
    steps: *mut u64,
) -> LsStatus {
    guard(|| {
        let f = match cnf_ref(f) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let solved = match out_ptr(solved, "solved") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let steps = match out_ptr(steps, "steps") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if !(0.0..=1.0).contains(&p) {
            return fail(LsStatus::InvalidArgument, format!("walk probability {p} outside [0, 1]"));
        }
        let cfg = WalksatConfig { p, max_steps, freebie };
        let outcome = walksat(f, &cfg, seed);
        *solved = outcome.solved;
        *steps = outcome.steps;
        LsStatus::Ok
    })
}

/// One greedy policy trial on a SAT formula.
#[no_mangle]
pub unsafe extern "C" fn ls_softtabu_sat_solve(
    m: *const LsModel,
    f: *const LsCnf,
    max_steps: u64,
    seed: u64,
    solved: *mut bool,
    steps: *mut u64,
) -> LsStatus {
    guard(|| {
        let q = match model_ref(m) {
            Ok(q) => q,
            Err(s) => return s,
        };
        let f = match cnf_ref(f) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let solved = match out_ptr(solved, "solved") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let steps = match out_ptr(steps, "steps") {
            Ok(p) => p,
            Err(s) => return s,
        };
        if q.n_features() != softtabu::N_FEATURES {
            return fail(
                LsStatus::InvalidArgument,
                format!("model has {} features, expected {}", q.n_features(), softtabu::N_FEATURES),
            );
        }
        let spec = FeatureSpec::default();
        let outcome = softtabu_sat_solve(q, f, 1, max_steps, &spec, seed)
            .into_iter()
            .next()
            .expect("one trial requested");
        *solved = outcome.solved;
        *steps = outcome.steps;
        LsStatus::Ok
    })
}
