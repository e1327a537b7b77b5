use std::ffi::{CStr, CString};
use std::ptr;

use phasespace_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ps_last_error_message()) }.to_string_lossy().into_owned()
}

fn demo(name: &str) -> *mut PsState {
    let name = CString::new(name).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_state_demo(name.as_ptr(), 0, &mut s) }, PsStatus::Ok);
    s
}

#[test]
fn wigner_of_vacuum_through_handles() {
    unsafe {
        let s = demo("vacuum");
        assert_eq!(ps_state_dim(s), 1);
        let mut tr = 0.0;
        assert_eq!(ps_state_trace(s, &mut tr), PsStatus::Ok);
        assert!((tr - 1.0).abs() < 1e-14);

        let mut g = ptr::null_mut();
        assert_eq!(ps_grid_new(1, 256, 12.0, &mut g), PsStatus::Ok);
        assert_eq!(ps_grid_len(g), 256 * 256);
        let mut w = ptr::null_mut();
        assert_eq!(ps_wigner(s, g, &mut w), PsStatus::Ok);
        let n = ps_function_len(w);
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        assert_eq!(ps_function_values(w, re.as_mut_ptr(), im.as_mut_ptr(), n), PsStatus::Ok);
        // Node (128, 128) is the origin.
        assert!((re[128 * 256 + 128] - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        let (mut ir, mut ii) = (0.0, 0.0);
        assert_eq!(ps_function_integral(w, &mut ir, &mut ii), PsStatus::Ok);
        assert!((ir - 1.0).abs() < 1e-9);

        let (a, b) = ([1u32, 0], [0u32, 0]);
        let mut v = 0.0;
        assert_eq!(ps_seminorm(w, a.as_ptr(), b.as_ptr(), 2, -1.0, &mut v), PsStatus::Ok);
        assert!((v - 0.13652).abs() < 1e-4, "{v}");

        let mut q = ptr::null_mut();
        assert_eq!(ps_husimi(s, ptr::null(), g, &mut q), PsStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(ps_quasichar(s, g, &mut x), PsStatus::Ok);
        assert_eq!(ps_function_len(q), n);

        ps_function_free(x);
        ps_function_free(q);
        ps_function_free(w);
        ps_grid_free(g);
        ps_state_free(s);
    }
}

#[test]
fn matel_and_json_states() {
    let doc = CString::new(r#"{"weights": [1.0], "pure_states": [{"atoms": [{"m": 1, "alpha": [0.0, 0.0], "coeff": [1.0, 0.0]}]}]}"#).unwrap();
    let chi_doc = CString::new(r#"{"atoms": [{"m": 0, "alpha": [0.0, 0.0], "coeff": [1.0, 0.0]}]}"#).unwrap();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ps_state_from_json(doc.as_ptr(), &mut s), PsStatus::Ok);
        let mut chi = ptr::null_mut();
        assert_eq!(ps_pure_from_json(chi_doc.as_ptr(), &mut chi), PsStatus::Ok);
        let alpha = [0.6, -0.8];
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ps_matel(s, chi, alpha.as_ptr(), alpha.as_ptr(), 2, &mut re, &mut im), PsStatus::Ok);
        // Husimi of Fock 1 against the vacuum: (|a|^2 / 2) e^{-|a|^2 / 2} with |a| = 1.
        assert!((re - 0.5 * (-0.5f64).exp()).abs() < 1e-12, "{re}");
        assert!(im.abs() < 1e-12);
        assert_eq!(ps_matel(s, chi, alpha.as_ptr(), alpha.as_ptr(), 3, &mut re, &mut im), PsStatus::InvalidArgument);
        ps_pure_free(chi);
        ps_state_free(s);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        let bad = CString::new(r#"{"weights": [1.0], "pure_states": ["#).unwrap();
        assert_eq!(ps_state_from_json(bad.as_ptr(), &mut s), PsStatus::Parse);
        assert!(last_error().contains("line"), "{}", last_error());
        assert!(s.is_null());

        let name = CString::new("squeezed").unwrap();
        assert_eq!(ps_state_demo(name.as_ptr(), 0, &mut s), PsStatus::InvalidState);
        assert!(last_error().contains("squeezed"));

        let mut g = ptr::null_mut();
        assert_eq!(ps_grid_new(1, 100, 12.0, &mut g), PsStatus::InvalidGrid);
        assert_eq!(ps_state_trace(ptr::null(), ptr::null_mut()), PsStatus::InvalidArgument);
        assert_eq!(ps_state_demo(ptr::null(), 0, &mut s), PsStatus::InvalidArgument);
        assert_eq!(ps_state_dim(ptr::null()), 0);
        assert_eq!(ps_function_len(ptr::null()), 0);

        let vac = demo("vacuum");
        assert_eq!(ps_grid_new(1, 64, 8.0, &mut g), PsStatus::Ok);
        let mut w = ptr::null_mut();
        assert_eq!(ps_wigner(vac, g, &mut w), PsStatus::Ok);
        let (a, b) = ([0u32, 0], [13u32, 0]);
        let mut v = 0.0;
        assert_eq!(ps_seminorm(w, a.as_ptr(), b.as_ptr(), 2, -1.0, &mut v), PsStatus::Unsupported);
        assert!(last_error().contains("13"), "{}", last_error());
        ps_function_free(w);
        ps_grid_free(g);
        ps_state_free(vac);

        // Null handles are accepted by every free function.
        ps_state_free(ptr::null_mut());
        ps_pure_free(ptr::null_mut());
        ps_grid_free(ptr::null_mut());
        ps_function_free(ptr::null_mut());
        ps_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_returns_report_csv() {
    unsafe {
        let s = demo("vacuum");
        let mut passed = 0;
        let mut csv = ptr::null_mut();
        assert_eq!(ps_run_verify(s, ptr::null(), 128, 10.0, 3, &mut passed, &mut csv), PsStatus::Ok);
        assert_eq!(passed, 1);
        let text = CStr::from_ptr(csv).to_str().unwrap().to_owned();
        assert!(text.starts_with("check,status,residual"));
        assert!(text.lines().count() > 10);
        ps_string_free(csv);
        assert_eq!(ps_run_verify(s, ptr::null(), 7, 10.0, 3, &mut passed, ptr::null_mut()), PsStatus::InvalidGrid);
        ps_state_free(s);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = include_str!("../include/phasespace.h");
    for name in [
        "PsStatus",
        "typedef struct PsState PsState",
        "ps_state_from_json",
        "ps_state_demo",
        "ps_grid_new",
        "ps_wigner",
        "ps_husimi",
        "ps_quasichar",
        "ps_function_values",
        "ps_matel",
        "ps_seminorm",
        "ps_run_verify",
        "ps_last_error_message",
        "PS_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
