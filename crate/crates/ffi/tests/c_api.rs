use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use hlog_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        hlog_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn grid(re: &[f64]) -> *mut HlogGrid {
    let mut g = ptr::null_mut();
    let status = unsafe { hlog_grid_new(re.as_ptr(), ptr::null(), re.len(), &mut g) };
    assert_eq!(status, HlogStatus::Ok, "{}", last_error());
    g
}

fn samples(g: *const HlogGrid) -> Vec<f64> {
    let n = unsafe { hlog_grid_len(g) };
    let mut re = vec![0.0; n];
    let status = unsafe { hlog_grid_samples(g, re.as_mut_ptr(), ptr::null_mut(), n) };
    assert_eq!(status, HlogStatus::Ok);
    re
}

#[test]
fn transform_round_trip_through_handles() {
    let values: Vec<f64> = (0..48).map(|j| ((j * 13) % 7) as f64 - 2.5).collect();
    let g = grid(&values);
    unsafe {
        for shift in [HlogShift::Zero, HlogShift::Third] {
            let mut c = ptr::null_mut();
            assert_eq!(hlog_analyze(g, shift, &mut c), HlogStatus::Ok);
            let mut back = ptr::null_mut();
            assert_eq!(hlog_synthesize(c, &mut back), HlogStatus::Ok);
            for (a, b) in samples(back).iter().zip(&values) {
                assert!((a - b).abs() < 1e-12);
            }
            let mut norm = 0.0;
            assert_eq!(hlog_dyadic_quasinorm(c, &mut norm), HlogStatus::Ok);
            assert!(norm > 0.0);
            let mut s = ptr::null_mut();
            assert_eq!(hlog_square_function(c, &mut s), HlogStatus::Ok);
            assert!(samples(s).iter().all(|&v| v >= 0.0));
            hlog_grid_free(s);
            hlog_grid_free(back);
            hlog_coefficients_free(c);
        }
        hlog_grid_free(g);
    }
}

#[test]
fn decomposition_through_handles() {
    let values: Vec<f64> = (0..96).map(|j| if j % 11 == 0 { 40.0 } else { (j % 3) as f64 - 1.0 }).collect();
    let g = grid(&values);
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(hlog_atomic_decompose(g, HlogShift::Zero, &mut d), HlogStatus::Ok);
        assert!(hlog_decomposition_atom_count(d) > 0);
        let mut lam = 0.0;
        assert_eq!(hlog_decomposition_lambda_inf(d, &mut lam), HlogStatus::Ok);
        assert!(lam.is_finite() && lam > 0.0);
        let mut back = ptr::null_mut();
        assert_eq!(hlog_decomposition_reconstruct(d, &mut back), HlogStatus::Ok);
        for (a, b) in samples(back).iter().zip(&values) {
            assert!((a - b).abs() < 1e-12 * 40.0);
        }
        hlog_grid_free(back);
        hlog_decomposition_free(d);
        hlog_grid_free(g);
    }
}

#[test]
fn constants_and_maximal() {
    let t_star = 1.4203701180;
    assert!((hlog_psi0(t_star) - 1.0).abs() < 1e-9);
    let g = grid(&[2.0; 24]);
    unsafe {
        let mut norm = 0.0;
        assert_eq!(hlog_luxemburg_psi0(g, &mut norm), HlogStatus::Ok);
        assert!((norm - 2.0 / t_star).abs() < 1e-8);
        let mut m = ptr::null_mut();
        assert_eq!(hlog_maximal(g, &mut m), HlogStatus::Ok);
        assert!(samples(m).iter().all(|&v| (v - 2.0).abs() < 1e-14));
        hlog_grid_free(m);
        hlog_grid_free(g);
    }
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = [1.0; 10];
        assert_eq!(hlog_grid_new(bad.as_ptr(), ptr::null(), 10, &mut g), HlogStatus::InvalidArgument);
        assert!(g.is_null());
        assert!(last_error().contains("10"), "{}", last_error());

        let nan = [f64::NAN; 6];
        assert_eq!(hlog_grid_new(nan.as_ptr(), ptr::null(), 6, &mut g), HlogStatus::InvalidArgument);

        let mut out = 0.0;
        assert_eq!(hlog_luxemburg_psi0(ptr::null(), &mut out), HlogStatus::NullPointer);
        assert!(last_error().contains("grid"));

        let g = grid(&[1.0; 6]);
        let mut short = [0.0; 3];
        assert_eq!(hlog_grid_samples(g, short.as_mut_ptr(), ptr::null_mut(), 3), HlogStatus::InvalidArgument);
        assert_eq!(hlog_luxemburg_psi0(g, ptr::null_mut()), HlogStatus::NullPointer);
        assert_eq!(hlog_grid_len(ptr::null()), 0);
        hlog_grid_free(g);
        hlog_grid_free(ptr::null_mut());

        // the required length is reported even when the buffer is absent
        assert!(hlog_last_error(ptr::null_mut(), 0) > 0);
    }
}

#[test]
fn generated_header_declares_the_interface() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/hlog.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "hlog_grid_new",
        "hlog_analyze",
        "hlog_atomic_decompose",
        "hlog_decomposition_free",
        "HLOG_STATUS_NULL_POINTER",
        "typedef struct HlogGrid HlogGrid",
    ] {
        assert!(text.contains(name), "{name}");
    }
    if let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c", header])
        .status()
    {
        assert!(status.success(), "header does not compile as C99");
    }
}
