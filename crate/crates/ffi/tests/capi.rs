//! Exercises the C entry points the way a foreign caller would: through
//! raw pointers, checking status codes and the thread-local error text.

use std::ffi::{CStr, CString};
use std::ptr;

use lslab_ffi::*;

fn path_cstr(p: &std::path::Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ls_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(ls_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn graph_round_trip_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edge.txt");
    std::fs::write(&path, "2 1\n1 2 5\n").unwrap();
    let cpath = path_cstr(&path);

    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ls_graph_load_gset_file(cpath.as_ptr(), &mut g) },
        LsStatus::Ok
    );
    assert_eq!(unsafe { ls_graph_vertex_count(g) }, 2);
    assert_eq!(unsafe { ls_graph_edge_count(g) }, 1);

    let mut best = 0.0f64;
    assert_eq!(unsafe { ls_maxcut_brute_force(g, &mut best) }, LsStatus::Ok);
    assert_eq!(best, 5.0);
    assert_eq!(unsafe { ls_maxcut_mca(g, 7, &mut best) }, LsStatus::Ok);
    assert_eq!(best, 5.0);
    assert_eq!(
        unsafe { ls_maxcut_tabu(g, 2, 10, true, 7, &mut best) },
        LsStatus::Ok
    );
    assert_eq!(best, 5.0);

    let out = dir.path().join("copy.txt");
    let cout = path_cstr(&out);
    assert_eq!(
        unsafe { ls_graph_save_gset_file(g, cout.as_ptr()) },
        LsStatus::Ok
    );
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        std::fs::read_to_string(&path).unwrap()
    );
    unsafe { ls_graph_free(g) };
}

#[test]
fn generate_rejects_bad_family_with_message() {
    let family = CString::new("grid").unwrap();
    let weights = CString::new("unit").unwrap();
    let mut g: *mut LsGraph = ptr::null_mut();
    let status = unsafe {
        ls_graph_generate(family.as_ptr(), 10, 0.3, weights.as_ptr(), 0, &mut g)
    };
    assert_eq!(status, LsStatus::InvalidArgument);
    assert!(last_error().contains("grid"), "got: {}", last_error());
    assert!(g.is_null());
}

#[test]
fn generate_and_count() {
    let family = CString::new("er").unwrap();
    let weights = CString::new("signed_unit").unwrap();
    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ls_graph_generate(family.as_ptr(), 20, 0.3, weights.as_ptr(), 11, &mut g) },
        LsStatus::Ok
    );
    assert_eq!(unsafe { ls_graph_vertex_count(g) }, 20);
    assert!(unsafe { ls_graph_edge_count(g) } > 0);
    unsafe { ls_graph_free(g) };
}

#[test]
fn null_arguments_are_invalid_not_fatal() {
    let mut best = 0.0f64;
    assert_eq!(
        unsafe { ls_maxcut_brute_force(ptr::null(), &mut best) },
        LsStatus::InvalidArgument
    );
    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ls_graph_load_gset_file(ptr::null(), &mut g) },
        LsStatus::InvalidArgument
    );
    assert_eq!(unsafe { ls_graph_vertex_count(ptr::null()) }, 0);
    assert_eq!(unsafe { ls_cnf_clause_count(ptr::null()) }, 0);
    unsafe {
        ls_graph_free(ptr::null_mut());
        ls_model_free(ptr::null_mut());
        ls_cnf_free(ptr::null_mut());
    }
}

#[test]
fn missing_file_reports_io_error() {
    let path = CString::new("/nonexistent/never.txt").unwrap();
    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ls_graph_load_gset_file(path.as_ptr(), &mut g) },
        LsStatus::IoError
    );
}

#[test]
fn model_load_save_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let mpath = dir.path().join("model.txt");
    std::fs::write(&mpath, "linq v1 2\n1 0\n0\n").unwrap();
    let cmpath = path_cstr(&mpath);

    let mut m: *mut LsModel = ptr::null_mut();
    assert_eq!(unsafe { ls_model_load_file(cmpath.as_ptr(), &mut m) }, LsStatus::Ok);

    let gpath = dir.path().join("edge.txt");
    std::fs::write(&gpath, "2 1\n1 2 5\n").unwrap();
    let cgpath = path_cstr(&gpath);
    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(unsafe { ls_graph_load_gset_file(cgpath.as_ptr(), &mut g) }, LsStatus::Ok);

    let mut best = 0.0f64;
    assert_eq!(
        unsafe { ls_softtabu_evaluate(m, g, 3, 2, 5, &mut best) },
        LsStatus::Ok
    );
    assert_eq!(best, 5.0);

    let saved = dir.path().join("saved.txt");
    let csaved = path_cstr(&saved);
    assert_eq!(unsafe { ls_model_save_file(m, csaved.as_ptr()) }, LsStatus::Ok);
    assert_eq!(std::fs::read_to_string(&saved).unwrap(), "linq v1 2\n1 0\n0\n");

    unsafe {
        ls_model_free(m);
        ls_graph_free(g);
    }
}

#[test]
fn malformed_model_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let mpath = dir.path().join("bad.txt");
    std::fs::write(&mpath, "not a model\n").unwrap();
    let cmpath = path_cstr(&mpath);
    let mut m: *mut LsModel = ptr::null_mut();
    assert_eq!(
        unsafe { ls_model_load_file(cmpath.as_ptr(), &mut m) },
        LsStatus::ParseError
    );
}

#[test]
fn cnf_parse_decide_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let fpath = dir.path().join("f.cnf");
    std::fs::write(&fpath, "p cnf 2 2\n1 0\n-1 2 0\n").unwrap();
    let cfpath = path_cstr(&fpath);

    let mut f: *mut LsCnf = ptr::null_mut();
    assert_eq!(unsafe { ls_cnf_parse_dimacs_file(cfpath.as_ptr(), &mut f) }, LsStatus::Ok);
    assert_eq!(unsafe { ls_cnf_var_count(f) }, 2);
    assert_eq!(unsafe { ls_cnf_clause_count(f) }, 2);

    let mut is_sat = false;
    assert_eq!(unsafe { ls_dpll_sat(f, 0, &mut is_sat) }, LsStatus::Ok);
    assert!(is_sat);

    let mut solved = false;
    let mut steps = u64::MAX;
    assert_eq!(
        unsafe { ls_walksat(f, 0.5, 1000, true, 3, &mut solved, &mut steps) },
        LsStatus::Ok
    );
    assert!(solved);
    assert!(steps < 1000);

    let mpath = dir.path().join("model.txt");
    std::fs::write(&mpath, "linq v1 2\n1 0\n0\n").unwrap();
    let cmpath = path_cstr(&mpath);
    let mut m: *mut LsModel = ptr::null_mut();
    assert_eq!(unsafe { ls_model_load_file(cmpath.as_ptr(), &mut m) }, LsStatus::Ok);
    assert_eq!(
        unsafe { ls_softtabu_sat_solve(m, f, 1000, 4, &mut solved, &mut steps) },
        LsStatus::Ok
    );
    assert!(solved);

    unsafe {
        ls_model_free(m);
        ls_cnf_free(f);
    }
}

#[test]
fn unsat_formula_is_decided() {
    let dir = tempfile::tempdir().unwrap();
    let fpath = dir.path().join("u.cnf");
    std::fs::write(&fpath, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let cfpath = path_cstr(&fpath);
    let mut f: *mut LsCnf = ptr::null_mut();
    assert_eq!(unsafe { ls_cnf_parse_dimacs_file(cfpath.as_ptr(), &mut f) }, LsStatus::Ok);
    let mut is_sat = true;
    assert_eq!(unsafe { ls_dpll_sat(f, 0, &mut is_sat) }, LsStatus::Ok);
    assert!(!is_sat);
    unsafe { ls_cnf_free(f) };
}

#[test]
fn dimacs_syntax_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let fpath = dir.path().join("bad.cnf");
    std::fs::write(&fpath, "p cnf 2 1\n1 5 0\n").unwrap();
    let cfpath = path_cstr(&fpath);
    let mut f: *mut LsCnf = ptr::null_mut();
    assert_eq!(
        unsafe { ls_cnf_parse_dimacs_file(cfpath.as_ptr(), &mut f) },
        LsStatus::ParseError
    );
    assert!(last_error().contains("2"), "got: {}", last_error());
}

#[test]
fn cnf_generate_from_spec() {
    let dist = CString::new("rand3:10:30").unwrap();
    let mut f: *mut LsCnf = ptr::null_mut();
    assert_eq!(unsafe { ls_cnf_generate(dist.as_ptr(), 9, &mut f) }, LsStatus::Ok);
    assert_eq!(unsafe { ls_cnf_var_count(f) }, 10);
    assert_eq!(unsafe { ls_cnf_clause_count(f) }, 30);
    unsafe { ls_cnf_free(f) };

    let bad = CString::new("rand3:oops").unwrap();
    assert_eq!(
        unsafe { ls_cnf_generate(bad.as_ptr(), 9, &mut f) },
        LsStatus::InvalidArgument
    );
}

#[test]
fn walksat_validates_probability() {
    let dist = CString::new("rand3:5:10").unwrap();
    let mut f: *mut LsCnf = ptr::null_mut();
    assert_eq!(unsafe { ls_cnf_generate(dist.as_ptr(), 1, &mut f) }, LsStatus::Ok);
    let mut solved = false;
    let mut steps = 0u64;
    assert_eq!(
        unsafe { ls_walksat(f, 1.5, 100, true, 0, &mut solved, &mut steps) },
        LsStatus::InvalidArgument
    );
    unsafe { ls_cnf_free(f) };
}

#[test]
fn brute_force_cap_is_enforced() {
    let family = CString::new("er").unwrap();
    let weights = CString::new("unit").unwrap();
    let mut g: *mut LsGraph = ptr::null_mut();
    assert_eq!(
        unsafe { ls_graph_generate(family.as_ptr(), 30, 0.2, weights.as_ptr(), 0, &mut g) },
        LsStatus::Ok
    );
    let mut best = 0.0f64;
    assert_eq!(
        unsafe { ls_maxcut_brute_force(g, &mut best) },
        LsStatus::InvalidArgument
    );
    assert!(last_error().contains("24"), "got: {}", last_error());
    unsafe { ls_graph_free(g) };
}
