use std::ffi::{CStr, CString};
use std::ptr;

use maple_ffi::*;

const WORKED: &str = r#"{"name": "worked", "n": 2, "m": 1, "A": [[1, 1]], "b": [4],
    "l": [0, 0], "u": [3, 3],
    "objective": {"type": "quadratic", "Q": [[2, 0], [0, 2]], "c": [-4, -4], "c0": 8}}"#;

fn problem(json: &str) -> *mut MapleProblem {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { maple_problem_from_json(text.as_ptr(), &mut out) }, MapleStatus::Ok);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(maple_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn solve_round_trip() {
    let p = problem(WORKED);
    assert_eq!(unsafe { maple_problem_num_vars(p) }, 2);

    let mut params = maple_solve_params_default();
    params.extraction.num_starts = 200;
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { maple_solve(p, ptr::null(), &params, &mut report) }, MapleStatus::Ok);

    let mut x = [0i64; 2];
    let mut objective = f64::NAN;
    let status = unsafe { maple_report_best(report, x.as_mut_ptr(), x.len(), &mut objective) };
    assert_eq!(status, MapleStatus::Ok);
    assert_eq!(x, [2, 2]);
    assert_eq!(objective, 0.0);

    let mut small = [0i64; 1];
    let status = unsafe { maple_report_best(report, small.as_mut_ptr(), 1, ptr::null_mut()) };
    assert_eq!(status, MapleStatus::BufferTooSmall);
    assert!(last_error().contains("need 2"));

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { maple_report_to_json(report, &mut json) }, MapleStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"status\": \"ok\""));

    unsafe {
        maple_string_free(json);
        maple_report_free(report);
        maple_problem_free(p);
    }
}

#[test]
fn oracle_pool_json_round_trip_and_reuse() {
    let p = problem(WORKED);
    let mut pool = ptr::null_mut();
    assert_eq!(unsafe { maple_oracle(p, &mut pool) }, MapleStatus::Ok);
    assert_eq!(unsafe { maple_pool_len(pool) }, 2);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { maple_pool_to_json(pool, &mut json) }, MapleStatus::Ok);
    let mut reread = ptr::null_mut();
    assert_eq!(unsafe { maple_pool_from_json(json, &mut reread) }, MapleStatus::Ok);
    assert_eq!(unsafe { maple_pool_len(reread) }, 2);

    let shifted = problem(&WORKED.replace(r#""b": [4]"#, r#""b": [2]"#));
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { maple_solve(shifted, reread, ptr::null(), &mut report) }, MapleStatus::Ok);
    let mut x = [0i64; 2];
    assert_eq!(unsafe { maple_report_best(report, x.as_mut_ptr(), 2, ptr::null_mut()) }, MapleStatus::Ok);
    assert_eq!(x, [1, 1]);

    unsafe {
        maple_report_free(report);
        maple_problem_free(shifted);
        maple_pool_free(reread);
        maple_string_free(json);
        maple_pool_free(pool);
        maple_problem_free(p);
    }
}

#[test]
fn extract_respects_parameters() {
    let p = problem(WORKED);
    let mut params = maple_extraction_params_default();
    params.num_starts = 100;
    params.seed = 3;
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { maple_extract(p, &params, &mut a) }, MapleStatus::Ok);
    assert_eq!(unsafe { maple_extract(p, &params, &mut b) }, MapleStatus::Ok);
    assert!(unsafe { maple_pool_len(a) } > 0);
    let (mut ja, mut jb) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        maple_pool_to_json(a, &mut ja);
        maple_pool_to_json(b, &mut jb);
        assert_eq!(CStr::from_ptr(ja), CStr::from_ptr(jb));
    }

    params.num_starts = 0;
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { maple_extract(p, &params, &mut c) }, MapleStatus::InvalidConfig);
    assert!(c.is_null());

    unsafe {
        maple_string_free(ja);
        maple_string_free(jb);
        maple_pool_free(a);
        maple_pool_free(b);
        maple_problem_free(p);
    }
}

#[test]
fn infeasible_instance_has_no_solution() {
    let p = problem(
        r#"{"name": "parity", "n": 2, "m": 1, "A": [[2, 2]], "b": [3], "l": [0, 0], "u": [3, 3],
            "objective": {"type": "separable", "terms": [{"poly": [0, 1]}, {"poly": [0, 1]}]}}"#,
    );
    let mut params = maple_solve_params_default();
    params.extraction.num_starts = 50;
    params.feasible_starts = 10;
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { maple_solve(p, ptr::null(), &params, &mut report) }, MapleStatus::Ok);
    let status = unsafe { maple_report_best(report, ptr::null_mut(), 0, ptr::null_mut()) };
    assert_eq!(status, MapleStatus::NoSolution);
    unsafe {
        maple_report_free(report);
        maple_problem_free(p);
    }
}

#[test]
fn errors_are_classified() {
    let bad = CString::new("{ nope").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { maple_problem_from_json(bad.as_ptr(), &mut out) }, MapleStatus::Parse);
    assert!(!last_error().is_empty());

    let bytes = [0xffu8, 0xfe, 0];
    let status = unsafe { maple_problem_from_json(bytes.as_ptr().cast(), &mut out) };
    assert_eq!(status, MapleStatus::InvalidUtf8);

    let p = problem(WORKED);
    let wrong = CString::new(r#"{"n": 3, "m": 1, "box": {"lo": [-1, -1, -1], "hi": [1, 1, 1]}, "directions": []}"#).unwrap();
    let mut pool = ptr::null_mut();
    assert_eq!(unsafe { maple_pool_from_json(wrong.as_ptr(), &mut pool) }, MapleStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { maple_solve(p, pool, ptr::null(), &mut report) }, MapleStatus::PoolMismatch);
    assert!(report.is_null());

    let wide = format!(
        r#"{{"name": "w", "n": 30, "m": 1, "A": [[{}]], "b": [1], "l": [{}], "u": [{}],
            "objective": {{"type": "separable", "terms": [{}]}}}}"#,
        vec!["1"; 30].join(","),
        vec!["0"; 30].join(","),
        vec!["1"; 30].join(","),
        vec![r#"{"poly": [0, 1]}"#; 30].join(",")
    );
    let w = problem(&wide);
    let mut oracle = ptr::null_mut();
    assert_eq!(unsafe { maple_oracle(w, &mut oracle) }, MapleStatus::TooLarge);

    assert_eq!(unsafe { maple_problem_num_vars(ptr::null()) }, 0);
    unsafe {
        maple_problem_free(ptr::null_mut());
        maple_problem_free(w);
        maple_pool_free(pool);
        maple_problem_free(p);
    }
}
