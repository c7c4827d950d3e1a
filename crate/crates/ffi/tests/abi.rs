use std::ffi::CStr;
use std::ptr;

use torustrace_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tt_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn torus_round_trip() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tt_torus_hex(&mut t), TtStatus::Ok);
        let mut z = 0.0;
        assert_eq!(tt_ztilde_flat(t, &mut z), TtStatus::Ok);
        assert!((z + 0.2286).abs() < 5e-4);
        let mut class = TtClass::Skinny;
        assert_eq!(tt_classify(t, &mut class), TtStatus::Ok);
        assert_eq!(class, TtClass::Fat);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tt_torus_modulus(t, &mut re, &mut im), TtStatus::Ok);
        assert!((re - 0.5).abs() < 1e-15 && (im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let mut m = 0.0;
        assert_eq!(tt_mass_trace_residual(t, &mut m), TtStatus::Ok);
        assert!(m.abs() < 1e-6);
        tt_torus_free(t);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tt_torus_new(0.0, -1.0, &mut t), TtStatus::Domain);
        assert!(t.is_null());
        assert!(last_error().contains("upper half plane"));

        assert_eq!(tt_torus_new(0.0, 1.0, &mut t), TtStatus::Ok);
        let mut g = 0.0;
        assert_eq!(tt_greens(t, 0.0, 0.0, 1.0, 0.0, &mut g), TtStatus::Domain);
        assert_eq!(tt_greens(t, 0.0, 0.0, 0.5, 0.5, &mut g), TtStatus::Ok);
        assert_eq!(tt_greens(ptr::null(), 0.0, 0.0, 0.5, 0.5, &mut g), TtStatus::NullPointer);

        let mut f = ptr::null_mut();
        assert_eq!(tt_factor_bubble(10.0, &mut f), TtStatus::Ok);
        let mut z = 0.0;
        // the factor belongs to a = 10, not to the square
        assert_eq!(tt_ztilde_conformal(t, f, 0, &mut z), TtStatus::Precondition);
        assert_eq!(tt_functional(f, 4095, &mut z), TtStatus::Config);
        tt_factor_free(f);
        tt_torus_free(t);

        assert_eq!(tt_factor_smoothed(5.0, 2.0, &mut f), TtStatus::Domain);
        tt_torus_free(ptr::null_mut());
        tt_factor_free(ptr::null_mut());
    }
}

#[test]
fn bubble_through_the_abi() {
    unsafe {
        let (mut t, mut f) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(tt_torus_rect(40.0, &mut t), TtStatus::Ok);
        assert_eq!(tt_factor_bubble(40.0, &mut f), TtStatus::Ok);
        let mut z = 0.0;
        assert_eq!(tt_ztilde_conformal(t, f, 0, &mut z), TtStatus::Ok);
        assert!(z < tt_sphere_constant() && tt_sphere_constant() - z < 0.02);
        let mut d = 0.0;
        assert_eq!(tt_factor_density(f, 0.0, &mut d), TtStatus::Ok);
        assert!((d - 40.0 / 40f64.tanh()).abs() < 1e-12);
        tt_factor_free(f);
        tt_torus_free(t);

        let mut sv = 0.0;
        assert_eq!(tt_second_variation_mode(10.0, 1, 0, &mut sv), TtStatus::Ok);
        assert!(sv < 0.0);
        assert_eq!(tt_second_variation_mode(10.0, 0, 0, &mut sv), TtStatus::Domain);
    }
}

#[test]
fn monte_carlo_is_deterministic() {
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(tt_torus_new(0.0, 1.0, &mut t), TtStatus::Ok);
        let (mut a, mut sa, mut b, mut sb) = (0.0, 0.0, 0.0, 0.0);
        assert_eq!(tt_mc_trace_estimate(t, 0.1, 200, 3, &mut a, &mut sa), TtStatus::Ok);
        assert_eq!(tt_mc_trace_estimate(t, 0.1, 200, 3, &mut b, &mut sb), TtStatus::Ok);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(tt_mc_trace_estimate(t, 0.1, 10, 3, &mut a, &mut sa), TtStatus::Config);
        tt_torus_free(t);
    }
}
