//! Kept in its own binary: the budget is process-wide.

use std::ffi::CStr;
use std::ptr;

use mps_parent_ffi::*;

#[test]
fn budget_violation_is_reported() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(mpsp_random_mps(4, 3, 1, &mut t), MpspStatus::Ok);
        assert_eq!(mpsp_set_memory_budget(1 << 10), MpspStatus::Ok);
        assert_eq!(mpsp_int_holds(t, 2, 4, 1e-10, 1e-8, &mut false), MpspStatus::Resource);
        let msg = CStr::from_ptr(mpsp_last_error_message()).to_string_lossy().into_owned();
        assert!(msg.contains("memory budget"), "{msg}");
        assert_eq!(mpsp_set_memory_budget(4 << 30), MpspStatus::Ok);
        let mut holds = false;
        assert_eq!(mpsp_int_holds(t, 2, 4, 1e-10, 1e-8, &mut holds), MpspStatus::Ok);
        assert!(holds);
        mpsp_mps_free(t);
    }
}
