//! C ABI for `doa-core`.
//!
//! Every fallible function returns a [`DoaStatus`]; on failure the message
//! is kept per thread and can be fetched with [`doa_last_error_message`].
//! Complex arrays are passed as interleaved `double` pairs (re, im) in
//! column-major order, the same layout as the `DOA1` snapshot file body.
//!
//! The header `include/doa_ffi.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use doa_core::array::sample_covariance;
use doa_core::baselines::stochastic_crb;
use doa_core::harness::{run_estimator, run_sweep, write_csv, Algorithm, ExperimentConfig};
use doa_core::wlslp::WlsConfig;
use doa_core::{
    CMatrix, DoaError, HermitianCovariance, SnapshotMatrix, SourceScenario, UlaGeometry, C64,
};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Estimation = 4,
    SingularFisher = 5,
    Config = 6,
    Format = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

pub const DOA_ALGORITHM_WLSLP: u32 = 0;
pub const DOA_ALGORITHM_ROOT_MUSIC: u32 = 1;
pub const DOA_ALGORITHM_UNITARY_ESPRIT: u32 = 2;

/// Opaque estimator handle: array geometry, algorithm and solver settings.
pub struct DoaEstimator {
    geometry: UlaGeometry,
    algorithm: Algorithm,
    wls: WlsConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DoaStatus, String);

impl From<DoaError> for Failure {
    fn from(e: DoaError) -> Self {
        let status = match &e {
            DoaError::Domain(_) => DoaStatus::Domain,
            DoaError::Precondition(_) => DoaStatus::InvalidArgument,
            DoaError::Estimation(_) => DoaStatus::Estimation,
            DoaError::SingularFisher { .. } => DoaStatus::SingularFisher,
            DoaError::Config(_) => DoaStatus::Config,
            DoaError::Format(_) => DoaStatus::Format,
            DoaError::Io(_) => DoaStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: DoaStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DoaStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DoaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            DoaStatus::Panic
        }
    }
}

fn algorithm_from_code(code: u32) -> Result<Algorithm, Failure> {
    match code {
        DOA_ALGORITHM_WLSLP => Ok(Algorithm::WlsLp),
        DOA_ALGORITHM_ROOT_MUSIC => Ok(Algorithm::RootMusic),
        DOA_ALGORITHM_UNITARY_ESPRIT => Ok(Algorithm::UnitaryEsprit),
        other => fail(
            DoaStatus::InvalidArgument,
            format!("unknown algorithm code {other}"),
        ),
    }
}

unsafe fn complex_matrix(data: *const f64, rows: usize, cols: usize) -> Result<CMatrix, Failure> {
    if data.is_null() {
        return fail(DoaStatus::NullPointer, "data pointer is null");
    }
    let len = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| Failure(DoaStatus::InvalidArgument, "dimensions overflow".into()))?;
    let raw = slice::from_raw_parts(data, len);
    let values: Vec<C64> = raw.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    Ok(CMatrix::from_vec(rows, cols, values))
}

unsafe fn write_angles(angles: &[f64], out: *mut f64, out_len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return fail(DoaStatus::NullPointer, "output pointer is null");
    }
    if out_len < angles.len() {
        return fail(
            DoaStatus::BufferTooSmall,
            format!("need {} output slots, got {out_len}", angles.len()),
        );
    }
    ptr::copy_nonoverlapping(angles.as_ptr(), out, angles.len());
    Ok(())
}

/// Creates an estimator for a ULA with `sensors` elements.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn doa_estimator_new(
    sensors: u32,
    spacing_ratio: f64,
    algorithm: u32,
    out: *mut *mut DoaEstimator,
) -> DoaStatus {
    guard(|| {
        if out.is_null() {
            return fail(DoaStatus::NullPointer, "out is null");
        }
        let algorithm = algorithm_from_code(algorithm)?;
        let geometry = UlaGeometry::new(sensors as usize, spacing_ratio)?;
        let handle = Box::new(DoaEstimator {
            geometry,
            algorithm,
            wls: WlsConfig::default(),
        });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// Releases an estimator. Null is ignored.
///
/// # Safety
/// `handle` must come from [`doa_estimator_new`] and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn doa_estimator_free(handle: *mut DoaEstimator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Overrides the WLS iteration cap and relative tolerance.
///
/// # Safety
/// `handle` must be a live estimator handle.
#[no_mangle]
pub unsafe extern "C" fn doa_estimator_set_wls(
    handle: *mut DoaEstimator,
    max_iter: u32,
    tol: f64,
) -> DoaStatus {
    guard(|| {
        let est = handle
            .as_mut()
            .ok_or_else(|| Failure(DoaStatus::NullPointer, "handle is null".into()))?;
        if !(tol >= 0.0 && tol.is_finite()) {
            return fail(
                DoaStatus::InvalidArgument,
                "tolerance must be finite and non-negative",
            );
        }
        est.wls = WlsConfig {
            max_iter: max_iter as usize,
            tol,
        };
        Ok(())
    })
}

/// Number of sensors of an estimator, 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live estimator handle.
#[no_mangle]
pub unsafe extern "C" fn doa_estimator_sensor_count(handle: *const DoaEstimator) -> u32 {
    handle
        .as_ref()
        .map_or(0, |h| h.geometry.sensor_count() as u32)
}

unsafe fn estimate(
    handle: *const DoaEstimator,
    r: &HermitianCovariance,
    k: usize,
    angles_out: *mut f64,
    angles_len: usize,
    warning_count: *mut u32,
) -> Result<(), Failure> {
    let est = handle
        .as_ref()
        .ok_or_else(|| Failure(DoaStatus::NullPointer, "handle is null".into()))?;
    let result = run_estimator(est.algorithm, r, k, &est.geometry, &est.wls)?;
    write_angles(result.angles_deg(), angles_out, angles_len)?;
    if let Some(w) = warning_count.as_mut() {
        *w = result.warnings().len() as u32;
    }
    Ok(())
}

/// Estimates `k` angles (degrees, ascending) from M×N snapshots.
///
/// `snapshots` holds `2·M·n_snapshots` doubles. `warning_count` may be null.
///
/// # Safety
/// All non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn doa_estimate_snapshots(
    handle: *const DoaEstimator,
    snapshots: *const f64,
    n_snapshots: usize,
    k: usize,
    angles_out: *mut f64,
    angles_len: usize,
    warning_count: *mut u32,
) -> DoaStatus {
    guard(|| {
        let est = handle
            .as_ref()
            .ok_or_else(|| Failure(DoaStatus::NullPointer, "handle is null".into()))?;
        let data = complex_matrix(snapshots, est.geometry.sensor_count(), n_snapshots)?;
        let x = SnapshotMatrix::new(data, est.geometry)?;
        let r = sample_covariance(&x);
        estimate(handle, &r, k, angles_out, angles_len, warning_count)
    })
}

/// Estimates `k` angles from an M×M Hermitian covariance (`2·M·M` doubles).
///
/// # Safety
/// All non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn doa_estimate_covariance(
    handle: *const DoaEstimator,
    covariance: *const f64,
    k: usize,
    angles_out: *mut f64,
    angles_len: usize,
    warning_count: *mut u32,
) -> DoaStatus {
    guard(|| {
        let est = handle
            .as_ref()
            .ok_or_else(|| Failure(DoaStatus::NullPointer, "handle is null".into()))?;
        let m = est.geometry.sensor_count();
        let r = HermitianCovariance::new(complex_matrix(covariance, m, m)?)?;
        estimate(handle, &r, k, angles_out, angles_len, warning_count)
    })
}

/// Stochastic CRB standard deviations (degrees) for unit-power sources at
/// `snr_db`, one per angle.
///
/// # Safety
/// `angles` must hold `k` doubles and `bounds_out` `bounds_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn doa_stochastic_crb(
    sensors: u32,
    spacing_ratio: f64,
    angles: *const f64,
    k: usize,
    snr_db: f64,
    n_snapshots: usize,
    bounds_out: *mut f64,
    bounds_len: usize,
) -> DoaStatus {
    guard(|| {
        if angles.is_null() {
            return fail(DoaStatus::NullPointer, "angles is null");
        }
        let angles = slice::from_raw_parts(angles, k).to_vec();
        let geometry = UlaGeometry::new(sensors as usize, spacing_ratio)?;
        let scenario = SourceScenario::from_snr(angles, snr_db)?;
        let crb = stochastic_crb(&scenario, &geometry, n_snapshots)?;
        write_angles(&crb.per_angle_bound_deg, bounds_out, bounds_len)
    })
}

/// Runs a sweep described by config text and returns the CSV table in a
/// newly allocated string to be released with [`doa_string_free`].
///
/// # Safety
/// `config_text` must be a NUL-terminated string; `csv_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn doa_sweep_csv(
    config_text: *const c_char,
    jobs: usize,
    csv_out: *mut *mut c_char,
) -> DoaStatus {
    guard(|| {
        if config_text.is_null() || csv_out.is_null() {
            return fail(DoaStatus::NullPointer, "null argument");
        }
        let text = CStr::from_ptr(config_text)
            .to_str()
            .map_err(|_| Failure(DoaStatus::Config, "config is not UTF-8".into()))?;
        let config = ExperimentConfig::parse(text)?;
        let curve = run_sweep(&config, jobs)?;
        let csv = CString::new(write_csv(&curve))
            .map_err(|_| Failure(DoaStatus::Format, "CSV contains NUL".into()))?;
        *csv_out = csv.into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn doa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies the calling thread's last error message into `buf` (truncating,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn doa_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn doa_status_name(status: DoaStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        DoaStatus::Ok => b"ok\0",
        DoaStatus::NullPointer => b"null pointer\0",
        DoaStatus::InvalidArgument => b"invalid argument\0",
        DoaStatus::Domain => b"domain error\0",
        DoaStatus::Estimation => b"estimation failed\0",
        DoaStatus::SingularFisher => b"singular Fisher information\0",
        DoaStatus::Config => b"config error\0",
        DoaStatus::Format => b"format error\0",
        DoaStatus::Io => b"I/O error\0",
        DoaStatus::BufferTooSmall => b"buffer too small\0",
        DoaStatus::Panic => b"internal panic\0",
    };
    s.as_ptr() as *const c_char
}
