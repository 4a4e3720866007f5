//! C ABI over `fmk3`.
//!
//! Every fallible function returns an [`Fmk3Status`] and writes its result
//! through an out pointer. On failure a message is kept per thread and can be
//! read with [`fmk3_last_error_message`]. Handles returned through out
//! pointers are owned by the caller and released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fmk3::corr::{descend, represent};
use fmk3::fmcalc::{derive_n_y, induced_transform, partner_census};
use fmk3::halfplane::{mobius, HalfPlanePoint};
use fmk3::lattice::{discriminant_unit, is_orientation_preserving, Isometry, Mat3};
use fmk3::modgroup::{base_element, random_al, AlElement};
use fmk3::Error;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fmk3Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidLevel = 3,
    InvalidDeterminant = 4,
    LevelMismatch = 5,
    NotAnIsometry = 6,
    NotIntegral = 7,
    NotInImage = 8,
    Numerical = 9,
    Overflow = 10,
    Internal = 11,
    Panic = 12,
}

/// An element of the Atkin-Lehner group `AL_d`.
pub struct Fmk3AlElement(AlElement);

/// A rational 3x3 matrix acting on the Mukai lattice `N_d`.
pub struct Fmk3Isometry(Isometry);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> Fmk3Status {
    match e {
        Error::NonPositive(_) | Error::NotInvertible { .. } | Error::NotInUpperHalfPlane(_) => {
            Fmk3Status::InvalidArgument
        }
        Error::InvalidLevel { .. } => Fmk3Status::InvalidLevel,
        Error::InvalidDeterminant(_) => Fmk3Status::InvalidDeterminant,
        Error::LevelMismatch(..) | Error::EndpointMismatch(_) => Fmk3Status::LevelMismatch,
        Error::NotAnIsometry(_) | Error::ActionNotDiagonal(_) => Fmk3Status::NotAnIsometry,
        Error::NotIntegral | Error::IntegralityViolation(_) => Fmk3Status::NotIntegral,
        Error::NotInImage(_) => Fmk3Status::NotInImage,
        Error::NumericalPole | Error::ZeroRank => Fmk3Status::Numerical,
        Error::InternalClosureViolation(_) => Fmk3Status::Internal,
    }
}

struct Failure(Fmk3Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail<T>(status: Fmk3Status, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> Fmk3Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Fmk3Status::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside fmk3");
            Fmk3Status::Panic
        }
    }
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(Fmk3Status::NullPointer, "null output pointer");
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or(Failure(Fmk3Status::NullPointer, "null handle".into()))
}

fn small(x: &BigInt) -> Result<i64, Failure> {
    x.to_i64().ok_or(Failure(
        Fmk3Status::Overflow,
        format!("{x} does not fit in 64 bits"),
    ))
}

fn new_al(w: AlElement) -> *mut Fmk3AlElement {
    Box::into_raw(Box::new(Fmk3AlElement(w)))
}

fn new_isometry(g: Isometry) -> *mut Fmk3Isometry {
    Box::into_raw(Box::new(Fmk3Isometry(g)))
}

/// The library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn fmk3_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The message of the last failure on this thread, empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fmk3_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from a function of this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fmk3_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The validated, sign-normalized element `(1/sqrt(s)) [[a s, b], [c d, e s]]`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_from_tuple(
    d: u64,
    s: u64,
    a: i64,
    b: i64,
    c: i64,
    e: i64,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(AlElement::from_tuple(d, s, a, b, c, e)?)))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_identity(d: u64, out: *mut *mut Fmk3AlElement) -> Fmk3Status {
    guard(|| {
        if d == 0 {
            return fail(Fmk3Status::InvalidArgument, "d must be positive");
        }
        put(out, new_al(AlElement::identity(d)))
    })
}

/// The canonical element of `W_s`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_base_element(
    d: u64,
    s: u64,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(base_element(d, s)?)))
}

/// A random element of `W_s`, reproducible from `seed`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_random(
    d: u64,
    s: u64,
    seed: u64,
    bound: i64,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| {
        if bound < 1 {
            return fail(Fmk3Status::InvalidArgument, "bound must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        put(out, new_al(random_al(d, s, &mut rng, bound)?))
    })
}

/// Parses the JSON form `{"d":6,"s":2,"abce":["1","1","1","2"]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_from_json(
    json: *const c_char,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| {
        if json.is_null() {
            return fail(Fmk3Status::NullPointer, "null string");
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(Fmk3Status::InvalidArgument, e.to_string()))?;
        let w: AlElement = serde_json::from_str(text)
            .map_err(|e| Failure(Fmk3Status::InvalidArgument, e.to_string()))?;
        put(out, new_al(w))
    })
}

/// The JSON form of `w`; release it with [`fmk3_string_free`].
///
/// # Safety
/// `w` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_to_json(
    w: *const Fmk3AlElement,
    out: *mut *mut c_char,
) -> Fmk3Status {
    guard(|| {
        let text = serde_json::to_string(&get(w)?.0).expect("serializable");
        put(out, CString::new(text).expect("no nul").into_raw())
    })
}

/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_free(w: *mut Fmk3AlElement) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// `x * y`.
///
/// # Safety
/// `x`, `y` must be live handles; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_mul(
    x: *const Fmk3AlElement,
    y: *const Fmk3AlElement,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(get(x)?.0.mul(&get(y)?.0)?)))
}

/// # Safety
/// `w` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_inverse(
    w: *const Fmk3AlElement,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(get(w)?.0.inverse())))
}

/// # Safety
/// `x`, `y` must be live handles; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_equal(
    x: *const Fmk3AlElement,
    y: *const Fmk3AlElement,
    out: *mut bool,
) -> Fmk3Status {
    guard(|| put(out, get(x)?.0 == get(y)?.0))
}

/// The level `d` and the coset label `s`.
///
/// # Safety
/// `w` must be a live handle; `d`, `s` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_level(
    w: *const Fmk3AlElement,
    d: *mut u64,
    s: *mut u64,
) -> Fmk3Status {
    guard(|| {
        let w = &get(w)?.0;
        put(d, w.d())?;
        put(s, w.s())
    })
}

/// # Safety
/// `w` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_is_fricke(w: *const Fmk3AlElement, out: *mut bool) -> Fmk3Status {
    guard(|| put(out, get(w)?.0.is_fricke()))
}

/// Writes `(a, b, c, e)`; fails with `Overflow` if an entry exceeds 64 bits.
///
/// # Safety
/// `w` must be a live handle; `out` null or valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_al_tuple(w: *const Fmk3AlElement, out: *mut i64) -> Fmk3Status {
    guard(|| {
        let entries = get(w)?.0.tuple().map(small);
        if out.is_null() {
            return fail(Fmk3Status::NullPointer, "null output pointer");
        }
        for (i, x) in entries.into_iter().enumerate() {
            out.add(i).write(x?);
        }
        Ok(())
    })
}

/// The isometry `R(w)` of `N_d`.
///
/// # Safety
/// `w` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_represent(
    w: *const Fmk3AlElement,
    out: *mut *mut Fmk3Isometry,
) -> Fmk3Status {
    guard(|| put(out, new_isometry(represent(&get(w)?.0)?)))
}

/// An integer matrix from 9 row-major entries. No isometry check is made here.
///
/// # Safety
/// `entries` must be valid for 9 reads; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_isometry_from_entries(
    d: u64,
    entries: *const i64,
    out: *mut *mut Fmk3Isometry,
) -> Fmk3Status {
    guard(|| {
        if entries.is_null() {
            return fail(Fmk3Status::NullPointer, "null entries");
        }
        if d == 0 {
            return fail(Fmk3Status::InvalidArgument, "d must be positive");
        }
        let rows: [[i64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| *entries.add(3 * i + j)));
        put(
            out,
            new_isometry(Isometry::new(d, Mat3::from_integers(rows))),
        )
    })
}

/// Writes the 9 row-major entries of an integral matrix.
///
/// # Safety
/// `g` must be a live handle; `out` null or valid for 9 writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_isometry_entries(
    g: *const Fmk3Isometry,
    out: *mut i64,
) -> Fmk3Status {
    guard(|| {
        let g = &get(g)?.0;
        if !g.is_integral() {
            return fail(Fmk3Status::NotIntegral, "matrix has non-integral entries");
        }
        if out.is_null() {
            return fail(Fmk3Status::NullPointer, "null output pointer");
        }
        for i in 0..3 {
            for j in 0..3 {
                out.add(3 * i + j).write(small(&g.m.0[i][j].to_integer())?);
            }
        }
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fmk3_isometry_free(g: *mut Fmk3Isometry) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// The element `w` with `R(w) = ±g`.
///
/// # Safety
/// `g` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_descend(
    g: *const Fmk3Isometry,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(descend(&get(g)?.0)?)))
}

/// The unit `u mod 2d` by which `g` acts on the discriminant group.
///
/// # Safety
/// `g` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_discriminant_unit(
    g: *const Fmk3Isometry,
    out: *mut u64,
) -> Fmk3Status {
    guard(|| put(out, discriminant_unit(&get(g)?.0)?.u))
}

/// # Safety
/// `g` must be a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_is_orientation_preserving(
    g: *const Fmk3Isometry,
    out: *mut bool,
) -> Fmk3Status {
    guard(|| put(out, is_orientation_preserving(&get(g)?.0)?))
}

/// The number of Fourier-Mukai partners of a degree `2d` K3 of Picard rank one.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_fm_number(d: u64, out: *mut u64) -> Fmk3Status {
    guard(|| put(out, partner_census(d)?.fm_number as u64))
}

/// The least `n >= 0` with `(d/r) n ≡ -1 (mod r)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_derive_n_y(d: u64, r: u64, out: *mut i64) -> Fmk3Status {
    guard(|| put(out, small(&derive_n_y(d, r)?)?))
}

/// The image in `W_{d/r}` of the transform from the moduli space `M_L(r+L+d/r)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_induced_transform(
    d: u64,
    r: u64,
    out: *mut *mut Fmk3AlElement,
) -> Fmk3Status {
    guard(|| put(out, new_al(induced_transform(d, r)?.image)))
}

/// The fractional linear action of `w` on `u + iv`, `v > 0`.
///
/// # Safety
/// `w` must be a live handle; `out_u`, `out_v` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fmk3_mobius(
    w: *const Fmk3AlElement,
    u: f64,
    v: f64,
    out_u: *mut f64,
    out_v: *mut f64,
) -> Fmk3Status {
    guard(|| {
        let z = mobius(&get(w)?.0, HalfPlanePoint::new(u, v)?)?;
        put(out_u, z.u)?;
        put(out_v, z.v)
    })
}
