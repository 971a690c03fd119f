use std::ffi::{CStr, CString};
use std::ptr;

use mps_parent_ffi::*;

fn last_error() -> String {
    let p = mpsp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn aklt_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(mpsp_aklt_tensor(&mut t), MpspStatus::Ok);
        assert!(mpsp_last_error_message().is_null());
        let (mut d, mut bond) = (0, 0);
        assert_eq!(mpsp_mps_dims(t, &mut d, &mut bond), MpspStatus::Ok);
        assert_eq!((d, bond), (3, 2));

        let mut l0 = 0;
        assert_eq!(mpsp_injectivity_length(t, 4, 1e-10, &mut l0), MpspStatus::Ok);
        assert_eq!(l0, 2);

        let mut dims = [0usize; 4];
        let mut written = 0;
        assert_eq!(mpsp_intersection_dims(t, 2, 4, 1e-10, 1e-8, dims.as_mut_ptr(), dims.len(), &mut written), MpspStatus::Ok);
        assert_eq!(&dims[..written], &[4, 4, 4]);

        let mut holds = false;
        assert_eq!(mpsp_int_holds(t, 2, 3, 1e-10, 1e-8, &mut holds), MpspStatus::Ok);
        assert!(holds);

        let (mut zero, mut log_abs) = (true, 0.0);
        assert_eq!(mpsp_f_det(t, 2, 4, 1e-10, &mut zero, &mut log_abs), MpspStatus::Ok);
        assert!(!zero && log_abs.is_finite());

        let mut json = ptr::null_mut();
        assert_eq!(mpsp_mps_to_json(t, &mut json), MpspStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(mpsp_mps_from_json(json, &mut back), MpspStatus::Ok);
        let mut s2 = 0;
        assert_eq!(mpsp_mps_space_dim(back, 2, 1e-10, &mut s2), MpspStatus::Ok);
        assert_eq!(s2, 4);

        let mut report = ptr::null_mut();
        assert_eq!(mpsp_intersection_report(t, 2, 3, 1e-10, 1e-8, &mut report), MpspStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        assert_eq!(v["D"], 2);

        mpsp_string_free(report);
        mpsp_string_free(json);
        mpsp_mps_free(back);
        mpsp_mps_free(t);
    }
}

#[test]
fn generalized_model_from_spec() {
    let spec = CString::new("j=3/2 J=2 Q=0").unwrap();
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(mpsp_generalized_aklt(spec.as_ptr(), &mut t), MpspStatus::Ok);
        let mut s2 = 0;
        assert_eq!(mpsp_mps_space_dim(t, 2, 1e-10, &mut s2), MpspStatus::Ok);
        assert_eq!(s2, 11);
        mpsp_mps_free(t);

        let bad = CString::new("j=1 J=7").unwrap();
        assert_eq!(mpsp_generalized_aklt(bad.as_ptr(), &mut t), MpspStatus::Domain);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn error_codes() {
    unsafe {
        assert_eq!(mpsp_aklt_tensor(ptr::null_mut()), MpspStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(mpsp_injectivity_length(ptr::null(), 3, 1e-10, &mut 0), MpspStatus::NullPointer);

        let mut t = ptr::null_mut();
        assert_eq!(mpsp_random_mps(4, 3, 1, &mut t), MpspStatus::Ok);
        let mut dims = [0usize; 1];
        let mut written = 0;
        assert_eq!(mpsp_intersection_dims(t, 2, 4, 1e-10, 1e-8, dims.as_mut_ptr(), 1, &mut written), MpspStatus::BufferTooSmall);
        assert_eq!(written, 3);

        let mut bound = 0i64;
        assert_eq!(mpsp_dim_lower_bound(5, 4, 2, 3, &mut bound), MpspStatus::Ok);
        assert_eq!(bound, 35);
        assert_eq!(mpsp_dim_lower_bound(5, 4, 3, 2, &mut bound), MpspStatus::Domain);

        let mut c = 0.0;
        assert_eq!(mpsp_cg(1, 1, 1, -1, 0, 0, &mut c), MpspStatus::Ok);
        assert!((c - 0.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(mpsp_cg(2, 4, 2, 0, 2, 4, &mut c), MpspStatus::Domain);

        mpsp_mps_free(t);
        mpsp_mps_free(ptr::null_mut());
        mpsp_string_free(ptr::null_mut());
    }
}
