//! C interface. Tensors are opaque handles owned by the caller and released
//! with [`mpsp_mps_free`]; strings returned by the library are released with
//! [`mpsp_string_free`]. Every function returns an [`MpspStatus`]; on failure
//! [`mpsp_last_error_message`] describes the error raised on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mps_parent::error::Error;
use mps_parent::intersect::{self, IntersectOptions};
use mps_parent::models::{self, AkltSpec};
use mps_parent::mps::{self, MpsTensor};
use mps_parent::spinalg::{self, HalfInt};
use mps_parent::{budget, parent};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Resource = 4,
    Precondition = 5,
    ChargeInconsistent = 6,
    Consistency = 7,
    Numerical = 8,
    Config = 9,
    Io = 10,
    Json = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// Opaque MPS tensor handle.
pub struct MpspTensor(MpsTensor);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MpspStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) => MpspStatus::Domain,
            Error::Resource { .. } => MpspStatus::Resource,
            Error::Precondition(_) => MpspStatus::Precondition,
            Error::ChargeInconsistent(_) => MpspStatus::ChargeInconsistent,
            Error::Consistency(_) => MpspStatus::Consistency,
            Error::Numerical(_) => MpspStatus::Numerical,
            Error::Config(_) => MpspStatus::Config,
            Error::Io(_) => MpspStatus::Io,
            Error::Json(_) => MpspStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(MpspStatus::Json, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MpspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            MpspStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(_) => {
            set_error(Some("panic inside the library".into()));
            MpspStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MpspStatus::NullPointer, format!("{what} is null"))
}

unsafe fn tensor<'a>(t: *const MpspTensor) -> Result<&'a MpsTensor, Failure> {
    t.as_ref().map(|t| &t.0).ok_or_else(|| null("tensor"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(MpspStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit_tensor(out: *mut *mut MpspTensor, t: MpsTensor) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(MpspTensor(t))), "out")
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(MpspStatus::Json, "string contains NUL".into()))?;
    write(out, c.into_raw(), "out")
}

fn options(rank_tol: f64, angle_tol: f64) -> IntersectOptions {
    IntersectOptions { rank_tol, angle_tol, ..IntersectOptions::default() }
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mpsp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Sets the process-wide memory budget in bytes for dense allocations.
#[no_mangle]
pub extern "C" fn mpsp_set_memory_budget(bytes: u64) -> MpspStatus {
    guard(|| {
        budget::set_limit(bytes);
        Ok(())
    })
}

/// Gaussian random tensor with `d` physical and `bond` virtual dimensions.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn mpsp_random_mps(d: usize, bond: usize, seed: u64, out: *mut *mut MpspTensor) -> MpspStatus {
    guard(|| emit_tensor(out, mps::random_mps(d, bond, seed)?))
}

/// The spin-1 AKLT tensor.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn mpsp_aklt_tensor(out: *mut *mut MpspTensor) -> MpspStatus {
    guard(|| emit_tensor(out, models::aklt_tensor()))
}

/// Generalized AKLT tensor for a spec such as `"j=3/2 J=2 Q=0"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_generalized_aklt(spec: *const c_char, out: *mut *mut MpspTensor) -> MpspStatus {
    guard(|| {
        let spec: AkltSpec = text(spec, "spec")?.parse()?;
        emit_tensor(out, models::generalized_aklt(&spec)?)
    })
}

/// Tensor from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_mps_from_json(json: *const c_char, out: *mut *mut MpspTensor) -> MpspStatus {
    guard(|| emit_tensor(out, MpsTensor::from_json(text(json, "json")?)?))
}

/// JSON form of a tensor; free the result with [`mpsp_string_free`].
///
/// # Safety
/// `t` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_mps_to_json(t: *const MpspTensor, out: *mut *mut c_char) -> MpspStatus {
    guard(|| emit_string(out, tensor(t)?.to_json()?))
}

/// Physical and bond dimension of a tensor.
///
/// # Safety
/// `t` must be a live handle; the output pointers must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_mps_dims(t: *const MpspTensor, d: *mut usize, bond: *mut usize) -> MpspStatus {
    guard(|| {
        let t = tensor(t)?;
        write(d, t.phys_dim(), "d")?;
        write(bond, t.bond_dim(), "bond")
    })
}

/// Releases a tensor handle. Null is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mpsp_mps_free(t: *mut MpspTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mpsp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Smallest `ℓ <= ell_max` at which the blocking map is injective, or 0.
///
/// # Safety
/// `t` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_injectivity_length(t: *const MpspTensor, ell_max: usize, rank_tol: f64, out: *mut usize) -> MpspStatus {
    guard(|| write(out, mps::injectivity_length(tensor(t)?, ell_max, rank_tol)?.unwrap_or(0), "out"))
}

/// Dimension of the span of the MPS states on `ell` sites.
///
/// # Safety
/// `t` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_mps_space_dim(t: *const MpspTensor, ell: usize, rank_tol: f64, out: *mut usize) -> MpspStatus {
    guard(|| write(out, mps::mps_space_dim(tensor(t)?, ell, rank_tol)?, "out"))
}

/// Intersection dimensions for `L = ell, ..., l` written to `dims`, which
/// holds `capacity` entries. `written` receives the number of lengths; if
/// the buffer is too small it still receives the required count.
///
/// # Safety
/// `t` must be a live handle, `dims` valid for `capacity` writes and
/// `written` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_intersection_dims(
    t: *const MpspTensor,
    ell: usize,
    l: usize,
    rank_tol: f64,
    angle_tol: f64,
    dims: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> MpspStatus {
    guard(|| {
        let (_, report) = intersect::intersection_space(tensor(t)?, ell, l, &options(rank_tol, angle_tol))?;
        write(written, report.dims.len(), "written")?;
        if report.dims.len() > capacity {
            return Err(Failure(MpspStatus::BufferTooSmall, format!("need {} entries, got {capacity}", report.dims.len())));
        }
        if dims.is_null() {
            return Err(null("dims"));
        }
        for (k, &(_, dim)) in report.dims.iter().enumerate() {
            dims.add(k).write(dim);
        }
        Ok(())
    })
}

/// Full intersection report as JSON; free with [`mpsp_string_free`].
///
/// # Safety
/// `t` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_intersection_report(
    t: *const MpspTensor,
    ell: usize,
    l: usize,
    rank_tol: f64,
    angle_tol: f64,
    out: *mut *mut c_char,
) -> MpspStatus {
    guard(|| {
        let (_, report) = intersect::intersection_space(tensor(t)?, ell, l, &options(rank_tol, angle_tol))?;
        emit_string(out, serde_json::to_string(&report)?)
    })
}

/// Whether the intersection on `l` sites has dimension `D²`.
///
/// # Safety
/// `t` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_int_holds(
    t: *const MpspTensor,
    ell: usize,
    l: usize,
    rank_tol: f64,
    angle_tol: f64,
    out: *mut bool,
) -> MpspStatus {
    guard(|| write(out, intersect::int_holds(tensor(t)?, ell, l, &options(rank_tol, angle_tol))?, "out"))
}

/// Determinant witness: `is_zero` tells whether it vanishes; otherwise
/// `log_abs` receives its natural logarithm (NaN when zero).
///
/// # Safety
/// `t` must be a live handle; the output pointers must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_f_det(
    t: *const MpspTensor,
    ell: usize,
    l: usize,
    rank_tol: f64,
    is_zero: *mut bool,
    log_abs: *mut f64,
) -> MpspStatus {
    guard(|| {
        let w = parent::f_det(tensor(t)?, ell, l, rank_tol)?;
        write(is_zero, w.zero, "is_zero")?;
        write(log_abs, w.log_abs.unwrap_or(f64::NAN), "log_abs")
    })
}

/// Parameter-counting lower bound on the intersection dimension.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_dim_lower_bound(d: usize, bond: usize, ell: usize, l: usize, out: *mut i64) -> MpspStatus {
    guard(|| {
        let b = intersect::dim_lower_bound(d, bond, ell, l)?;
        let b = i64::try_from(b).map_err(|_| Failure(MpspStatus::Domain, format!("bound {b} does not fit in 64 bits")))?;
        write(out, b, "out")
    })
}

/// Clebsch-Gordan coefficient; all arguments are twice the spin values.
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mpsp_cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32, out: *mut f64) -> MpspStatus {
    let h = HalfInt::from_twice;
    guard(|| write(out, spinalg::cg(h(j1), h(m1), h(j2), h(m2), h(j), h(m))?, "out"))
}
