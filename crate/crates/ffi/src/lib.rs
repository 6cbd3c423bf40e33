//! C interface to the covertool analyzer.
//!
//! Scenarios and deployments live behind opaque handles created by the
//! `*_load`/`*_parse` functions and released with the matching `*_free`.
//! Every fallible call returns a [`CtStatus`]; on failure the message is kept
//! per thread and can be read with [`ct_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use covertool::coverage::{cover_jq, eval_constraints};
use covertool::estimator::{estimate_objective, EstimatorConfig};
use covertool::geom::Vec3;
use covertool::scenario::{deployment_from_str, load_deployment, load_scenario, scenario_from_str, Deployment, Scenario};
use covertool::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validation = 5,
    Domain = 6,
    BufferTooSmall = 7,
    Internal = 99,
}

/// Opaque scenario handle.
pub struct CtScenario(Scenario);

/// Opaque deployment handle.
pub struct CtDeployment(Deployment);

/// Result of [`ct_evaluate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CtEstimate {
    /// Whether every constraint holds and each sensor sits in a cost zone.
    pub feasible: bool,
    /// Largest constraint value; positive means violated.
    pub max_violation: f64,
    /// The following fields are NaN when a sensor lies outside its cost zones.
    pub placement: f64,
    pub uncov_estimate: f64,
    pub total: f64,
    pub samples_used: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CtStatus {
    match e {
        Error::Io { .. } => CtStatus::Io,
        Error::Json(_) | Error::Schema(_) => CtStatus::Parse,
        Error::Validation { .. } => CtStatus::Validation,
        _ => CtStatus::Domain,
    }
}

struct Fail(CtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            CtStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CtStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the NUL, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ct_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_load(path: *const c_char, out: *mut *mut CtScenario) -> CtStatus {
    guard(|| {
        let sc = load_scenario(str_arg(path, "path")?)?;
        put(out, CtScenario(sc))
    })
}

/// Parses a scenario from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_parse(json: *const c_char, out: *mut *mut CtScenario) -> CtStatus {
    guard(|| {
        let sc = scenario_from_str(str_arg(json, "json")?)?;
        put(out, CtScenario(sc))
    })
}

/// # Safety
/// `sc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_free(sc: *mut CtScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Number of sensors, or 0 for a null handle.
///
/// # Safety
/// `sc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_sensor_count(sc: *const CtScenario) -> usize {
    sc.as_ref().map_or(0, |s| s.0.sensors.len())
}

/// Number of quality levels, or 0 for a null handle.
///
/// # Safety
/// `sc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_quality_count(sc: *const CtScenario) -> usize {
    sc.as_ref().map_or(0, |s| s.0.qualities.len())
}

/// RoI volume, or NaN for a null handle.
///
/// # Safety
/// `sc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ct_scenario_roi_volume(sc: *const CtScenario) -> f64 {
    sc.as_ref().map_or(f64::NAN, |s| s.0.roi_volume())
}

/// Loads a deployment file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_deployment_load(path: *const c_char, out: *mut *mut CtDeployment) -> CtStatus {
    guard(|| {
        let d = load_deployment(str_arg(path, "path")?)?;
        put(out, CtDeployment(d))
    })
}

/// Parses a deployment from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_deployment_parse(json: *const c_char, out: *mut *mut CtDeployment) -> CtStatus {
    guard(|| {
        let d = deployment_from_str(str_arg(json, "json")?)?;
        put(out, CtDeployment(d))
    })
}

/// Creates an empty deployment.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ct_deployment_new(out: *mut *mut CtDeployment) -> CtStatus {
    guard(|| put(out, CtDeployment(Deployment::new())))
}

/// Places (or moves) sensor `id`.
///
/// # Safety
/// `d` must be a live handle and `id` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ct_deployment_set(d: *mut CtDeployment, id: *const c_char, x: f64, y: f64, z: f64) -> CtStatus {
    guard(|| {
        let d = d.as_mut().ok_or_else(|| null("deployment"))?;
        let id = str_arg(id, "id")?;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Fail(CtStatus::Validation, format!("invalid deployment.{id}: non-finite coordinate")));
        }
        d.0.positions.insert(id.to_string(), Vec3::new(x, y, z));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ct_deployment_free(d: *mut CtDeployment) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Writes the constraint values `[obstacle, admissible, isolation]` of each
/// placed sensor, in scenario order, into `values`. `count` receives the
/// number of values; when it exceeds `len`, nothing is written and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// Handles must be live, `values` must hold `len` doubles, `count` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_constraints(
    sc: *const CtScenario,
    d: *const CtDeployment,
    values: *mut f64,
    len: usize,
    count: *mut usize,
) -> CtStatus {
    guard(|| {
        let (sc, d) = (ref_arg(sc, "scenario")?, ref_arg(d, "deployment")?);
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let v = eval_constraints(&d.0, &sc.0)?.values();
        *count = v.len();
        if v.len() > len {
            return Err(Fail(CtStatus::BufferTooSmall, format!("need {} values, got room for {len}", v.len())));
        }
        if !v.is_empty() {
            if values.is_null() {
                return Err(null("values"));
            }
            std::ptr::copy_nonoverlapping(v.as_ptr(), values, v.len());
        }
        Ok(())
    })
}

/// Checks constraints and estimates the objective to within relative error
/// `eps` with confidence `1 - delta`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_evaluate(
    sc: *const CtScenario,
    d: *const CtDeployment,
    eps: f64,
    delta: f64,
    seed: u64,
    out: *mut CtEstimate,
) -> CtStatus {
    guard(|| {
        let (sc, d) = (ref_arg(sc, "scenario")?, ref_arg(d, "deployment")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let cfg = EstimatorConfig {
            eps,
            delta,
            seed,
            ..Default::default()
        };
        cfg.validate()?;
        let c = eval_constraints(&d.0, &sc.0)?;
        let mut r = CtEstimate {
            feasible: false,
            max_violation: c.values().into_iter().fold(f64::NEG_INFINITY, f64::max),
            placement: f64::NAN,
            uncov_estimate: f64::NAN,
            total: f64::NAN,
            samples_used: 0,
        };
        if sc.0.placement_cost(&d.0).is_ok() {
            let e = estimate_objective(&d.0, &sc.0, &cfg)?;
            r.feasible = c.feasible();
            r.placement = e.placement;
            r.uncov_estimate = e.uncov_estimate;
            r.total = e.total;
            r.samples_used = e.samples_used;
        }
        *out = r;
        Ok(())
    })
}

/// Whether point `(x, y, z)` stays covered at quality index `q` under every
/// failure of `j` placed sensors.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ct_point_covered(
    sc: *const CtScenario,
    d: *const CtDeployment,
    j: usize,
    q: usize,
    x: f64,
    y: f64,
    z: f64,
    out: *mut bool,
) -> CtStatus {
    guard(|| {
        let (sc, d) = (ref_arg(sc, "scenario")?, ref_arg(d, "deployment")?);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if q >= sc.0.qualities.len() {
            return Err(Fail(CtStatus::Validation, format!("invalid q: index {q} out of range")));
        }
        if j > sc.0.k {
            return Err(Fail(CtStatus::Validation, format!("invalid j: {j} exceeds k = {}", sc.0.k)));
        }
        let placed = sc.0.placed(&d.0)?;
        *out = cover_jq(Vec3::new(x, y, z), j, q, &placed, &sc.0);
        Ok(())
    })
}
