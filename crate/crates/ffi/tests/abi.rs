use std::ffi::{CStr, CString};
use std::ptr;

use fmk3_ffi::*;

fn message() -> String {
    unsafe { CStr::from_ptr(fmk3_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn al(d: u64, s: u64, t: [i64; 4]) -> *mut Fmk3AlElement {
    let mut out = ptr::null_mut();
    let status = unsafe { fmk3_al_from_tuple(d, s, t[0], t[1], t[2], t[3], &mut out) };
    assert_eq!(status, Fmk3Status::Ok, "{}", message());
    out
}

fn tuple(w: *const Fmk3AlElement) -> [i64; 4] {
    let mut t = [0i64; 4];
    assert_eq!(unsafe { fmk3_al_tuple(w, t.as_mut_ptr()) }, Fmk3Status::Ok);
    t
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(fmk3_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn rejects_bad_tuples_with_codes() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            fmk3_al_from_tuple(6, 4, 1, 0, 0, 1, &mut out),
            Fmk3Status::InvalidLevel
        );
        assert!(message().contains("exact divisor"));
        assert_eq!(
            fmk3_al_from_tuple(6, 2, 1, 0, 0, 1, &mut out),
            Fmk3Status::InvalidDeterminant
        );
        assert_eq!(
            fmk3_al_from_tuple(6, 1, 1, 0, 0, 1, ptr::null_mut()),
            Fmk3Status::NullPointer
        );
        assert_eq!(fmk3_al_identity(0, &mut out), Fmk3Status::InvalidArgument);
    }
    assert!(out.is_null());
}

#[test]
fn group_operations() {
    let w = al(6, 2, [1, 1, 1, 2]);
    let mut base = ptr::null_mut();
    let mut inv = ptr::null_mut();
    let mut prod = ptr::null_mut();
    let (mut d, mut s, mut fricke, mut same) = (0u64, 0u64, true, false);
    unsafe {
        assert_eq!(fmk3_al_base_element(6, 2, &mut base), Fmk3Status::Ok);
        assert_eq!(fmk3_al_equal(w, base, &mut same), Fmk3Status::Ok);
        assert!(same);
        assert_eq!(fmk3_al_inverse(w, &mut inv), Fmk3Status::Ok);
        assert_eq!(fmk3_al_mul(w, inv, &mut prod), Fmk3Status::Ok);
        assert_eq!(tuple(prod), [1, 0, 0, 1]);
        assert_eq!(fmk3_al_level(w, &mut d, &mut s), Fmk3Status::Ok);
        assert_eq!((d, s), (6, 2));
        assert_eq!(fmk3_al_is_fricke(w, &mut fricke), Fmk3Status::Ok);
        assert!(!fricke);
        let other = al(5, 1, [1, 0, 0, 1]);
        let mut bad = ptr::null_mut();
        assert_eq!(fmk3_al_mul(w, other, &mut bad), Fmk3Status::LevelMismatch);
        for h in [w, base, inv, prod, other] {
            fmk3_al_free(h);
        }
    }
}

#[test]
fn lattice_round_trip() {
    let w = al(6, 2, [1, 1, 1, 2]);
    let mut g = ptr::null_mut();
    let mut back = ptr::null_mut();
    let mut m = [0i64; 9];
    let (mut u, mut orient, mut same) = (0u64, false, false);
    unsafe {
        assert_eq!(fmk3_represent(w, &mut g), Fmk3Status::Ok);
        assert_eq!(fmk3_isometry_entries(g, m.as_mut_ptr()), Fmk3Status::Ok);
        assert_eq!(m, [8, 24, 3, 2, 7, 1, 3, 12, 2]);
        assert_eq!(fmk3_discriminant_unit(g, &mut u), Fmk3Status::Ok);
        assert_eq!(u, 7);
        assert_eq!(
            fmk3_is_orientation_preserving(g, &mut orient),
            Fmk3Status::Ok
        );
        assert!(orient);
        assert_eq!(fmk3_descend(g, &mut back), Fmk3Status::Ok);
        assert_eq!(fmk3_al_equal(w, back, &mut same), Fmk3Status::Ok);
        assert!(same);

        let swap = [0i64, 0, 1, 0, 1, 0, 1, 0, 0];
        let mut h = ptr::null_mut();
        let mut none = ptr::null_mut();
        assert_eq!(
            fmk3_isometry_from_entries(6, swap.as_ptr(), &mut h),
            Fmk3Status::Ok
        );
        assert_eq!(fmk3_descend(h, &mut none), Fmk3Status::NotInImage);
        let scaled = [2i64, 0, 0, 0, 1, 0, 0, 0, 1];
        let mut k = ptr::null_mut();
        assert_eq!(
            fmk3_isometry_from_entries(6, scaled.as_ptr(), &mut k),
            Fmk3Status::Ok
        );
        assert_eq!(
            fmk3_is_orientation_preserving(k, &mut orient),
            Fmk3Status::NotAnIsometry
        );
        for x in [g, h, k] {
            fmk3_isometry_free(x);
        }
        fmk3_al_free(w);
        fmk3_al_free(back);
    }
}

#[test]
fn partners_and_transforms() {
    let (mut fm, mut n) = (0u64, 0i64);
    let mut image = ptr::null_mut();
    let (mut u, mut v) = (0.0, 0.0);
    unsafe {
        assert_eq!(fmk3_fm_number(30, &mut fm), Fmk3Status::Ok);
        assert_eq!(fm, 4);
        assert_eq!(fmk3_derive_n_y(6, 2, &mut n), Fmk3Status::Ok);
        assert_eq!(n, 1);
        assert_eq!(fmk3_induced_transform(6, 2, &mut image), Fmk3Status::Ok);
        assert_eq!(tuple(image), [1, -2, 1, -1]);
        assert_eq!(
            fmk3_induced_transform(6, 4, &mut image),
            Fmk3Status::InvalidLevel
        );
        // z -> (3z - 2) / (6z - 3) sends i to (24 + 3i) / 45
        assert_eq!(fmk3_mobius(image, 0.0, 1.0, &mut u, &mut v), Fmk3Status::Ok);
        assert!((u - 24.0 / 45.0).abs() < 1e-12 && (v - 3.0 / 45.0).abs() < 1e-12);
        assert_eq!(
            fmk3_mobius(image, 0.0, -1.0, &mut u, &mut v),
            Fmk3Status::InvalidArgument
        );
        fmk3_al_free(image);
    }
}

#[test]
fn json_round_trip() {
    let w = al(6, 2, [1, 1, 1, 2]);
    let mut text = ptr::null_mut();
    let mut back = ptr::null_mut();
    let mut same = false;
    unsafe {
        assert_eq!(fmk3_al_to_json(w, &mut text), Fmk3Status::Ok);
        let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert_eq!(s, r#"{"d":6,"s":2,"abce":["1","1","1","2"]}"#);
        assert_eq!(fmk3_al_from_json(text, &mut back), Fmk3Status::Ok);
        assert_eq!(fmk3_al_equal(w, back, &mut same), Fmk3Status::Ok);
        assert!(same);
        fmk3_string_free(text);
        let garbage = CString::new("{").unwrap();
        assert_eq!(
            fmk3_al_from_json(garbage.as_ptr(), &mut back),
            Fmk3Status::InvalidArgument
        );
        fmk3_al_free(w);
        fmk3_al_free(back);
    }
}

#[test]
fn overflow_is_reported() {
    // [[2, 1], [1, 1]] squared 7 times has entries near 10^53
    let mut w = al(1, 1, [2, 1, 1, 1]);
    let mut t = [0i64; 4];
    unsafe {
        for _ in 0..7 {
            let mut next = ptr::null_mut();
            assert_eq!(fmk3_al_mul(w, w, &mut next), Fmk3Status::Ok);
            fmk3_al_free(w);
            w = next;
        }
        assert_eq!(fmk3_al_tuple(w, t.as_mut_ptr()), Fmk3Status::Overflow);
        assert!(message().contains("64 bits"));
        fmk3_al_free(w);
    }
}
