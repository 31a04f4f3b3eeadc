//! C ABI over `maple-core`.
//!
//! Every fallible function returns a `MapleStatus` and writes its result
//! through an out-pointer. On failure a human-readable message is available
//! from `maple_last_error_message` on the same thread. Handles are opaque
//! and must be released with the matching `*_free` function; strings handed
//! out by the library are released with `maple_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use maple::augmentation::{maple_solve_with_pool, AugmentError, SolveConfig, SolveReport};
use maple::extraction::{extract_directions, DirectionPool, ExtractionConfig, ExtractionError};
use maple::graver::{graver_oracle, EnumerationLimits, GraverError};
use maple::model::{import_qplib, parse_instance_json, write_report, ModelError, Problem};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapleStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidConfig = 4,
    Lattice = 5,
    PoolMismatch = 6,
    TooLarge = 7,
    NoSolution = 8,
    BufferTooSmall = 9,
    Internal = 10,
}

/// Validated problem instance.
pub struct MapleProblem(Problem);

/// Set of kernel directions usable by `maple_solve`.
pub struct MaplePool(DirectionPool);

/// Outcome of `maple_solve`.
pub struct MapleReport(SolveReport);

/// Extraction parameters; obtain defaults from `maple_extraction_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MapleExtractionParams {
    pub num_starts: u64,
    pub epochs: u64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub step_size: f64,
    pub seed: u64,
    pub max_pool_size: u64,
}

/// Solve parameters; obtain defaults from `maple_solve_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MapleSolveParams {
    pub extraction: MapleExtractionParams,
    pub feasible_starts: u64,
    pub lambda3: f64,
    pub feasibility_epochs: u64,
    pub feasibility_step_size: f64,
    pub step_cap: i64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(MapleStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Self(MapleStatus::NullArgument, format!("{what} is null"))
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Self(MapleStatus::Parse, e.to_string())
    }
}

impl From<ExtractionError> for Failure {
    fn from(e: ExtractionError) -> Self {
        let status = match e {
            ExtractionError::InvalidConfig(_) | ExtractionError::BadBounds { .. } => MapleStatus::InvalidConfig,
            ExtractionError::PoolMismatch(_) => MapleStatus::PoolMismatch,
            ExtractionError::PoolFormat(_) => MapleStatus::Parse,
            _ => MapleStatus::Lattice,
        };
        Self(status, e.to_string())
    }
}

impl From<AugmentError> for Failure {
    fn from(e: AugmentError) -> Self {
        match e {
            AugmentError::Extraction(inner) => inner.into(),
            AugmentError::InvalidConfig(_) => Self(MapleStatus::InvalidConfig, e.to_string()),
            other => Self(MapleStatus::Internal, other.to_string()),
        }
    }
}

impl From<GraverError> for Failure {
    fn from(e: GraverError) -> Self {
        let status = match e {
            GraverError::TooLarge(_) => MapleStatus::TooLarge,
            _ => MapleStatus::Lattice,
        };
        Self(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MapleStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            MapleStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MapleStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(MapleStatus::InvalidUtf8, e.to_string()))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    let c = CString::new(s).map_err(|e| Failure(MapleStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn to_usize(v: u64, name: &str) -> Result<usize, Failure> {
    usize::try_from(v).map_err(|_| Failure(MapleStatus::InvalidConfig, format!("{name} out of range")))
}

impl MapleExtractionParams {
    fn config(&self) -> Result<ExtractionConfig, Failure> {
        Ok(ExtractionConfig {
            num_starts: to_usize(self.num_starts, "num_starts")?,
            epochs: to_usize(self.epochs, "epochs")?,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            step_size: self.step_size,
            seed: self.seed,
            max_pool_size: to_usize(self.max_pool_size, "max_pool_size")?,
            ..ExtractionConfig::default()
        })
    }
}

impl MapleSolveParams {
    fn config(&self) -> Result<SolveConfig, Failure> {
        Ok(SolveConfig {
            num_feasible_starts: to_usize(self.feasible_starts, "feasible_starts")?,
            lambda3: self.lambda3,
            feasibility_epochs: to_usize(self.feasibility_epochs, "feasibility_epochs")?,
            feasibility_step_size: self.feasibility_step_size,
            step_cap: self.step_cap,
            seed: self.seed,
            extraction: self.extraction.config()?,
        })
    }
}

/// Message describing the most recent failure on this thread, or "" after a
/// success. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn maple_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn maple_extraction_params_default() -> MapleExtractionParams {
    let d = ExtractionConfig::default();
    MapleExtractionParams {
        num_starts: d.num_starts as u64,
        epochs: d.epochs as u64,
        lambda1: d.lambda1,
        lambda2: d.lambda2,
        step_size: d.step_size,
        seed: d.seed,
        max_pool_size: d.max_pool_size as u64,
    }
}

#[no_mangle]
pub extern "C" fn maple_solve_params_default() -> MapleSolveParams {
    let d = SolveConfig::default();
    MapleSolveParams {
        extraction: maple_extraction_params_default(),
        feasible_starts: d.num_feasible_starts as u64,
        lambda3: d.lambda3,
        feasibility_epochs: d.feasibility_epochs as u64,
        feasibility_step_size: d.feasibility_step_size,
        step_cap: d.step_cap,
        seed: d.seed,
    }
}

/// Parses a problem in the native JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_problem_from_json(json: *const c_char, out: *mut *mut MapleProblem) -> MapleStatus {
    guard(|| {
        let problem = parse_instance_json(text(json, "json")?)?;
        emit(out, MapleProblem(problem))
    })
}

/// Parses a problem in QPLIB format.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_problem_from_qplib(source: *const c_char, out: *mut *mut MapleProblem) -> MapleStatus {
    guard(|| {
        let problem = import_qplib(text(source, "source")?)?;
        emit(out, MapleProblem(problem))
    })
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn maple_problem_num_vars(problem: *const MapleProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.n())
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn maple_problem_free(problem: *mut MapleProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Harvests a direction pool for `problem`. `params` may be null for defaults.
///
/// # Safety
/// Pointers must be null or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_extract(
    problem: *const MapleProblem,
    params: *const MapleExtractionParams,
    out: *mut *mut MaplePool,
) -> MapleStatus {
    guard(|| {
        let p = &borrow(problem, "problem")?.0;
        let cfg = params
            .as_ref()
            .map_or_else(|| Ok(ExtractionConfig::default()), MapleExtractionParams::config)?;
        let pool = extract_directions(p.matrix(), p.lower(), p.upper(), &cfg)?;
        emit(out, MaplePool(pool))
    })
}

/// Exact Graver elements of `problem` inside its difference box.
///
/// # Safety
/// `problem` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_oracle(problem: *const MapleProblem, out: *mut *mut MaplePool) -> MapleStatus {
    guard(|| {
        let p = &borrow(problem, "problem")?.0;
        let elements = graver_oracle(p.matrix(), &p.difference_box(), &EnumerationLimits::default())?;
        let mut pool = DirectionPool::for_problem(p);
        for g in &elements {
            pool.insert_pair(g);
        }
        emit(out, MaplePool(pool))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_pool_from_json(json: *const c_char, out: *mut *mut MaplePool) -> MapleStatus {
    guard(|| {
        let pool = DirectionPool::from_json(text(json, "json")?)?;
        emit(out, MaplePool(pool))
    })
}

/// Serialises the pool; release the string with `maple_string_free`.
///
/// # Safety
/// `pool` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_pool_to_json(pool: *const MaplePool, out: *mut *mut c_char) -> MapleStatus {
    guard(|| emit_string(out, borrow(pool, "pool")?.0.to_json()))
}

/// Number of directions, or 0 for a null handle.
///
/// # Safety
/// `pool` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn maple_pool_len(pool: *const MaplePool) -> usize {
    pool.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `pool` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn maple_pool_free(pool: *mut MaplePool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// Runs the full pipeline. A null `pool` triggers extraction; a null
/// `params` uses defaults. Finding no feasible point is not an error: the
/// report is produced and `maple_report_best` returns `NoSolution`.
///
/// # Safety
/// Pointers must be null or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_solve(
    problem: *const MapleProblem,
    pool: *const MaplePool,
    params: *const MapleSolveParams,
    out: *mut *mut MapleReport,
) -> MapleStatus {
    guard(|| {
        let p = &borrow(problem, "problem")?.0;
        let cfg = params
            .as_ref()
            .map_or_else(|| Ok(SolveConfig::default()), MapleSolveParams::config)?;
        let pool = pool.as_ref().map(|h| &h.0);
        let report = maple_solve_with_pool(p, pool, &cfg)?;
        emit(out, MapleReport(report))
    })
}

/// Copies the best point into `x` (capacity `len`) and its value into
/// `objective`. Either output may be null to skip it.
///
/// # Safety
/// `report` must be a live handle; `x` must hold `len` values when non-null.
#[no_mangle]
pub unsafe extern "C" fn maple_report_best(
    report: *const MapleReport,
    x: *mut i64,
    len: usize,
    objective: *mut f64,
) -> MapleStatus {
    guard(|| {
        let r = &borrow(report, "report")?.0;
        let best = r
            .best
            .as_ref()
            .ok_or_else(|| Failure(MapleStatus::NoSolution, "no feasible point found".into()))?;
        if !x.is_null() {
            if len < best.x.len() {
                return Err(Failure(
                    MapleStatus::BufferTooSmall,
                    format!("need {} slots, got {len}", best.x.len()),
                ));
            }
            ptr::copy_nonoverlapping(best.x.as_ptr(), x, best.x.len());
        }
        if let Some(slot) = objective.as_mut() {
            *slot = best.objective;
        }
        Ok(())
    })
}

/// Serialises the full report; release the string with `maple_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maple_report_to_json(report: *const MapleReport, out: *mut *mut c_char) -> MapleStatus {
    guard(|| emit_string(out, write_report(&borrow(report, "report")?.0)))
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn maple_report_free(report: *mut MapleReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn maple_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
