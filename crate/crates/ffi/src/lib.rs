//! C ABI over `torustrace`.
//!
//! Every fallible function returns a [`TtStatus`] and writes its result
//! through an out-pointer. On failure the message is available from
//! [`tt_last_error`] on the same thread. Handles are opaque and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use torustrace::conformal::{
    bubble_factor, conformal_change_functional, second_variation, smoothed_bubble, ztilde_conformal,
    LongitudinalFactor, Profile, QuadratureConfig, VariationDirection,
};
use torustrace::flat_trace::{logdet_flat, sphere_constant, ztilde_flat};
use torustrace::greens::{greens_flat, mass_trace_check, robin_mass};
use torustrace::hideseek::{trace_estimate, McConfig};
use torustrace::lattice::{classify, lambda1};
use torustrace::{make_hex_torus, make_rect_torus, make_torus, Error, Point, TorusClass, TorusShape};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtStatus {
    Ok = 0,
    Domain = 1,
    Precondition = 2,
    Convergence = 3,
    Resource = 4,
    Config = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Skinny/fat classification.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtClass {
    Skinny = 0,
    Fat = 1,
    Borderline = 2,
}

/// Opaque flat torus.
pub struct TtTorus(TorusShape);

/// Opaque longitudinal conformal factor.
pub struct TtFactor(LongitudinalFactor);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> TtStatus {
    match e {
        Error::Domain(_) => TtStatus::Domain,
        Error::Precondition(_) => TtStatus::Precondition,
        Error::Convergence(_) => TtStatus::Convergence,
        Error::Resource(_) => TtStatus::Resource,
        Error::Config(_) => TtStatus::Config,
        Error::Io(_) => TtStatus::Io,
    }
}

/// Run `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), TtStatus>>(f: F) -> TtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            TtStatus::Panic
        }
    }
}

fn lift<T>(r: torustrace::Result<T>) -> Result<T, TtStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), TtStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(TtStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, TtStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        TtStatus::NullPointer
    })
}

fn quadrature(n: usize) -> Result<QuadratureConfig, TtStatus> {
    let cfg = if n == 0 { QuadratureConfig::default() } else { QuadratureConfig::default().with_n(n) };
    lift(cfg.validate())?;
    Ok(cfg)
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tt_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

unsafe fn new_torus(out: *mut *mut TtTorus, r: torustrace::Result<TorusShape>) -> TtStatus {
    guard(|| {
        let shape = lift(r)?;
        write(out, Box::into_raw(Box::new(TtTorus(shape))))
    })
}

/// Unit-area torus with modulus `re + i im`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_torus_new(re: f64, im: f64, out: *mut *mut TtTorus) -> TtStatus {
    new_torus(out, make_torus(re, im))
}

/// Rectangle torus `[-a, a] x [0, 2 pi]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_torus_rect(a: f64, out: *mut *mut TtTorus) -> TtStatus {
    new_torus(out, make_rect_torus(a))
}

/// Hexagonal torus.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_torus_hex(out: *mut *mut TtTorus) -> TtStatus {
    new_torus(out, Ok(make_hex_torus()))
}

/// # Safety
/// `t` must come from a `tt_torus_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tt_torus_free(t: *mut TtTorus) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tt_torus_modulus(t: *const TtTorus, re: *mut f64, im: *mut f64) -> TtStatus {
    guard(|| {
        let tau = deref(t)?.0.tau();
        write(re, tau.re)?;
        write(im, tau.im)
    })
}

/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_lambda1(t: *const TtTorus, out: *mut f64) -> TtStatus {
    guard(|| write(out, lambda1(&deref(t)?.0)))
}

/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_classify(t: *const TtTorus, out: *mut TtClass) -> TtStatus {
    guard(|| {
        let c = match classify(&deref(t)?.0) {
            TorusClass::Skinny => TtClass::Skinny,
            TorusClass::Fat => TtClass::Fat,
            TorusClass::Borderline => TtClass::Borderline,
        };
        write(out, c)
    })
}

/// Regularized trace of the flat torus.
///
/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_ztilde_flat(t: *const TtTorus, out: *mut f64) -> TtStatus {
    guard(|| write(out, lift(ztilde_flat(&deref(t)?.0))?))
}

/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_logdet_flat(t: *const TtTorus, out: *mut f64) -> TtStatus {
    guard(|| write(out, lift(logdet_flat(&deref(t)?.0))?))
}

/// Regularized trace of the round sphere of area `4 pi`.
#[no_mangle]
pub extern "C" fn tt_sphere_constant() -> f64 {
    sphere_constant()
}

/// Green's function between `(x1, x2)` and `(y1, y2)`.
///
/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_greens(t: *const TtTorus, x1: f64, x2: f64, y1: f64, y2: f64, out: *mut f64) -> TtStatus {
    guard(|| {
        let g = lift(greens_flat(&deref(t)?.0, Point::new(x1, x2), Point::new(y1, y2)))?;
        write(out, g.g)
    })
}

/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_robin_mass(t: *const TtTorus, out: *mut f64) -> TtStatus {
    guard(|| write(out, lift(robin_mass(&deref(t)?.0, Point::new(0.0, 0.0)))?))
}

/// # Safety
/// `t` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_mass_trace_residual(t: *const TtTorus, out: *mut f64) -> TtStatus {
    guard(|| write(out, lift(mass_trace_check(&deref(t)?.0))?))
}

unsafe fn new_factor(out: *mut *mut TtFactor, r: torustrace::Result<LongitudinalFactor>) -> TtStatus {
    guard(|| {
        let f = lift(r)?;
        write(out, Box::into_raw(Box::new(TtFactor(f))))
    })
}

/// Bubble factor on the rectangle `a`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_factor_bubble(a: f64, out: *mut *mut TtFactor) -> TtStatus {
    new_factor(out, bubble_factor(a))
}

/// Smoothed bubble of the given width.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_factor_smoothed(a: f64, width: f64, out: *mut *mut TtFactor) -> TtStatus {
    new_factor(out, smoothed_bubble(a, width))
}

/// # Safety
/// `f` must come from a `tt_factor_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tt_factor_free(f: *mut TtFactor) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `e^{2 phi}` at `x1`.
///
/// # Safety
/// `f` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_factor_density(f: *const TtFactor, x1: f64, out: *mut f64) -> TtStatus {
    guard(|| write(out, deref(f)?.0.density(x1)))
}

/// Change of the regularized trace under the factor; `n = 0` picks the
/// default grid.
///
/// # Safety
/// `f` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_functional(f: *const TtFactor, n: usize, out: *mut f64) -> TtStatus {
    guard(|| {
        let cfg = quadrature(n)?;
        write(out, lift(conformal_change_functional(&deref(f)?.0, &cfg))?)
    })
}

/// Regularized trace of the conformally changed rectangle torus.
///
/// # Safety
/// `t` and `f` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_ztilde_conformal(t: *const TtTorus, f: *const TtFactor, n: usize, out: *mut f64) -> TtStatus {
    guard(|| {
        let cfg = quadrature(n)?;
        write(out, lift(ztilde_conformal(&deref(t)?.0, &deref(f)?.0, &cfg))?)
    })
}

/// Second variation along `sqrt(2) cos(k pi x1 / a)` (or `sin` when
/// `use_sin` is nonzero) on the rectangle `a`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_second_variation_mode(a: f64, k: u32, use_sin: i32, out: *mut f64) -> TtStatus {
    guard(|| {
        if k == 0 {
            set_error("mode must be at least 1".into());
            return Err(TtStatus::Domain);
        }
        let shape = lift(make_rect_torus(a))?;
        let p = if use_sin != 0 { Profile::Sin(k) } else { Profile::Cos(k) };
        let v = lift(second_variation(&shape, &VariationDirection::Longitudinal(p), &QuadratureConfig::default()))?;
        write(out, v)
    })
}

/// Calibrated Monte Carlo estimate of the trace and its standard error.
///
/// # Safety
/// `t` must be a live handle; `value` and `std_err` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tt_mc_trace_estimate(
    t: *const TtTorus,
    epsilon: f64,
    trials: usize,
    seed: u64,
    value: *mut f64,
    std_err: *mut f64,
) -> TtStatus {
    guard(|| {
        let est = lift(trace_estimate(&deref(t)?.0, &McConfig::new(epsilon, trials, seed)))?;
        write(value, est.value)?;
        write(std_err, est.std_err)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_out_pointer_is_reported() {
        let s = unsafe { tt_torus_new(0.0, 1.0, ptr::null_mut()) };
        assert_eq!(s, TtStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(tt_last_error()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(tt_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
