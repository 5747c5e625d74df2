use std::ffi::{CStr, CString};
use std::ptr;

use doa_core::array::{sample_covariance, synthesize_snapshots};
use doa_core::harness::{presets, run_sweep, write_csv};
use doa_core::{SourceScenario, UlaGeometry};
use doa_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { doa_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned();
    assert_eq!(n, s.len());
    s
}

fn interleave(m: &doa_core::CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn new_estimator(m: u32, alg: u32) -> *mut DoaEstimator {
    let mut h = ptr::null_mut();
    let st = unsafe { doa_estimator_new(m, 0.5, alg, &mut h) };
    assert_eq!(st, DoaStatus::Ok, "{}", last_error());
    h
}

#[test]
fn snapshot_estimate_matches_core() {
    let geom = UlaGeometry::half_wavelength(10).unwrap();
    let sc = SourceScenario::from_snr(vec![-20.0, 15.0], 10.0).unwrap();
    let x = synthesize_snapshots(&sc, &geom, 200, 7).unwrap();
    let expected =
        doa_core::wlslp::estimate_doa_wlslp(&sample_covariance(&x), 2, &geom, &Default::default())
            .unwrap();

    let h = new_estimator(10, DOA_ALGORITHM_WLSLP);
    assert_eq!(unsafe { doa_estimator_sensor_count(h) }, 10);
    let data = interleave(x.data());
    let mut out = [0.0; 2];
    let mut warnings = 0u32;
    let st = unsafe {
        doa_estimate_snapshots(h, data.as_ptr(), 200, 2, out.as_mut_ptr(), 2, &mut warnings)
    };
    assert_eq!(st, DoaStatus::Ok, "{}", last_error());
    assert_eq!(out.as_slice(), expected.angles_deg());
    assert_eq!(warnings as usize, expected.warnings().len());
    unsafe { doa_estimator_free(h) };
}

#[test]
fn error_codes_and_messages() {
    let mut h = ptr::null_mut();
    let st = unsafe { doa_estimator_new(8, 0.5, 42, &mut h) };
    assert_eq!(st, DoaStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("42"));

    let st = unsafe { doa_estimator_new(8, 0.0, DOA_ALGORITHM_WLSLP, &mut h) };
    assert_eq!(st, DoaStatus::InvalidArgument);

    let st = unsafe { doa_estimator_new(8, 0.5, DOA_ALGORITHM_WLSLP, ptr::null_mut()) };
    assert_eq!(st, DoaStatus::NullPointer);

    let h = new_estimator(8, DOA_ALGORITHM_UNITARY_ESPRIT);
    let geom = UlaGeometry::half_wavelength(8).unwrap();
    let sc = SourceScenario::from_snr(vec![0.0, 30.0], 20.0).unwrap();
    let x = synthesize_snapshots(&sc, &geom, 50, 1).unwrap();
    let data = interleave(x.data());
    let mut out = [0.0; 1];
    let st = unsafe {
        doa_estimate_snapshots(
            h,
            data.as_ptr(),
            50,
            2,
            out.as_mut_ptr(),
            1,
            ptr::null_mut(),
        )
    };
    assert_eq!(st, DoaStatus::BufferTooSmall);
    let st = unsafe {
        doa_estimate_snapshots(
            h,
            data.as_ptr(),
            50,
            8,
            out.as_mut_ptr(),
            1,
            ptr::null_mut(),
        )
    };
    assert_eq!(st, DoaStatus::InvalidArgument);
    let st = unsafe {
        doa_estimate_snapshots(h, ptr::null(), 50, 2, out.as_mut_ptr(), 1, ptr::null_mut())
    };
    assert_eq!(st, DoaStatus::NullPointer);
    let st = unsafe { doa_estimator_set_wls(h, 5, f64::NAN) };
    assert_eq!(st, DoaStatus::InvalidArgument);
    assert_eq!(unsafe { doa_estimator_set_wls(h, 5, 1e-6) }, DoaStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { doa_estimator_free(h) };
    unsafe { doa_estimator_free(ptr::null_mut()) };
}

#[test]
fn non_hermitian_covariance_rejected() {
    let h = new_estimator(3, DOA_ALGORITHM_ROOT_MUSIC);
    let mut r = [0.0; 18];
    for i in 0..3 {
        r[2 * (i * 3 + i)] = 1.0;
    }
    r[2] = 0.5; // (1,0) without the matching (0,1)
    let mut out = [0.0; 1];
    let st =
        unsafe { doa_estimate_covariance(h, r.as_ptr(), 1, out.as_mut_ptr(), 1, ptr::null_mut()) };
    assert_ne!(st, DoaStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe { doa_estimator_free(h) };
}

#[test]
fn crb_matches_core() {
    let angles = [10.0, 20.0];
    let mut out = [0.0; 2];
    let st =
        unsafe { doa_stochastic_crb(12, 0.5, angles.as_ptr(), 2, 0.0, 100, out.as_mut_ptr(), 2) };
    assert_eq!(st, DoaStatus::Ok, "{}", last_error());
    let geom = UlaGeometry::half_wavelength(12).unwrap();
    let sc = SourceScenario::from_snr(angles.to_vec(), 0.0).unwrap();
    let crb = doa_core::baselines::stochastic_crb(&sc, &geom, 100).unwrap();
    assert_eq!(out.to_vec(), crb.per_angle_bound_deg);

    let st =
        unsafe { doa_stochastic_crb(12, 0.5, angles.as_ptr(), 2, 0.0, 0, out.as_mut_ptr(), 2) };
    assert_ne!(st, DoaStatus::Ok);
}

#[test]
fn sweep_csv_matches_core() {
    let mut config = presets::by_name("fig4").unwrap();
    config.n_trials = 5;
    let text = CString::new(config.to_config_text()).unwrap();
    let mut csv = ptr::null_mut();
    let st = unsafe { doa_sweep_csv(text.as_ptr(), 2, &mut csv) };
    assert_eq!(st, DoaStatus::Ok, "{}", last_error());
    let got = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { doa_string_free(csv) };
    assert_eq!(got, write_csv(&run_sweep(&config, 1).unwrap()));

    let bad = CString::new("sensor_count = 8\nbogus = 1\n").unwrap();
    let mut csv = ptr::null_mut();
    assert_eq!(
        unsafe { doa_sweep_csv(bad.as_ptr(), 1, &mut csv) },
        DoaStatus::Config
    );
    assert!(csv.is_null());
}

#[test]
fn status_names_are_distinct() {
    let all = [
        DoaStatus::Ok,
        DoaStatus::NullPointer,
        DoaStatus::InvalidArgument,
        DoaStatus::Domain,
        DoaStatus::Estimation,
        DoaStatus::SingularFisher,
        DoaStatus::Config,
        DoaStatus::Format,
        DoaStatus::Io,
        DoaStatus::BufferTooSmall,
        DoaStatus::Panic,
    ];
    let names: std::collections::HashSet<String> = all
        .iter()
        .map(|&s| {
            unsafe { CStr::from_ptr(doa_status_name(s)) }
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    assert_eq!(names.len(), all.len());
}
