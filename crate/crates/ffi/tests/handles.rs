use std::ffi::{CStr, CString};
use std::ptr;

use hecke_ffi::*;

fn alg(group: &str) -> *mut HkAlgebra {
    let name = CString::new(group).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { hk_algebra_new(name.as_ptr(), 5, 1, &mut a) }, HkStatus::Ok);
    a
}

#[test]
fn characters_and_duals() {
    let a = alg("GL2");
    unsafe {
        let mut triv = ptr::null_mut();
        assert_eq!(hk_module_character(a, HkCharacter::Triv, &mut triv), HkStatus::Ok);
        let mut d = ptr::null_mut();
        assert_eq!(hk_module_dual(triv, &mut d), HkStatus::Ok);
        let mut iso = HkIso::No;
        assert_eq!(hk_module_is_isomorphic(triv, d, &mut iso), HkStatus::Ok);
        assert_eq!(iso, HkIso::Yes);

        let mut sign = ptr::null_mut();
        assert_eq!(hk_module_character(a, HkCharacter::Sign, &mut sign), HkStatus::Ok);
        let mut hom = usize::MAX;
        assert_eq!(hk_hom_dim(triv, sign, &mut hom), HkStatus::Ok);
        assert_eq!(hom, 0);

        let mut sum = ptr::null_mut();
        assert_eq!(hk_module_direct_sum(triv, sign, &mut sum), HkStatus::Ok);
        assert_eq!(hk_module_dim(sum), 2);
        assert_eq!(hk_hom_dim(sum, sign, &mut hom), HkStatus::Ok);
        assert_eq!(hom, 1);

        for m in [triv, d, sign, sum] {
            hk_module_free(m);
        }
        hk_algebra_free(a);
    }
}

#[test]
fn induction_and_right_adjoint() {
    let a = alg("SL2");
    unsafe {
        let (exps, unram) = ([2i64], [1u32]);
        let mut ind = ptr::null_mut();
        assert_eq!(hk_module_induced(a, exps.as_ptr(), unram.as_ptr(), 1, &mut ind), HkStatus::Ok);
        assert_eq!(hk_module_dim(ind), 2);
        let mut r = ptr::null_mut();
        assert_eq!(hk_module_right_adjoint(a, ind, &mut r), HkStatus::Ok);
        assert_eq!(hk_module_dim(r), 1);
        hk_module_free(r);
        hk_module_free(ind);
        hk_algebra_free(a);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let bad = CString::new("GL9").unwrap();
        let mut a = ptr::null_mut();
        assert_eq!(hk_algebra_new(bad.as_ptr(), 5, 1, &mut a), HkStatus::InvalidArgument);
        assert!(a.is_null());
        let msg = CStr::from_ptr(hk_last_error()).to_str().unwrap();
        assert!(msg.contains("GL9"), "{msg}");

        assert_eq!(hk_module_dual(ptr::null(), &mut ptr::null_mut()), HkStatus::NullPointer);

        let a = alg("GL2");
        let mut m = ptr::null_mut();
        assert_eq!(hk_module_supersingular(a, 5, &mut m), HkStatus::InvalidArgument);
        assert_eq!(hk_module_supersingular(a, 1, &mut m), HkStatus::Ok);
        assert!(hk_last_error().is_null());
        assert_eq!(hk_module_dim(m), 2);
        hk_module_free(m);

        let t = alg("Torus(2)");
        let mut s = ptr::null_mut();
        assert_eq!(hk_module_supersingular(t, 0, &mut s), HkStatus::InvalidArgument);
        hk_algebra_free(t);
        hk_algebra_free(a);
    }
}

#[test]
fn fixtures_and_pages() {
    unsafe {
        let id = CString::new("gl3.steinberg").unwrap();
        let mut json = ptr::null_mut();
        let mut passed = false;
        assert_eq!(hk_run_fixture(id.as_ptr(), 5, 1, 7, false, &mut json, &mut passed), HkStatus::Ok);
        assert!(passed);
        hk_string_free(json);
        assert_eq!(hk_run_fixture(id.as_ptr(), 5, 1, 7, true, &mut json, &mut passed), HkStatus::Ok);
        assert!(!passed);
        let report = CStr::from_ptr(json).to_str().unwrap();
        assert!(report.contains("assume split"), "{report}");
        hk_string_free(json);

        let unknown = CString::new("gl2.nothing").unwrap();
        assert_eq!(hk_run_fixture(unknown.as_ptr(), 5, 1, 7, false, &mut json, &mut passed), HkStatus::UnknownFixture);

        let page = CString::new("cd = 2\nrows = 0 1\ncols = 0..2\nE2 0 0 = triv\n").unwrap();
        assert_eq!(hk_ss_solve(page.as_ptr(), false, &mut json), HkStatus::Ok);
        let out = CStr::from_ptr(json).to_str().unwrap();
        assert!(out.contains("facts"), "{out}");
        hk_string_free(json);

        let broken = CString::new("cd = x\n").unwrap();
        assert_eq!(hk_ss_solve(broken.as_ptr(), false, &mut json), HkStatus::Parse);
    }
}
