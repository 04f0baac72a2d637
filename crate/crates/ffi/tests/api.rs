use std::ffi::{c_char, CStr};
use std::ptr;

use landscape_lab::continuum::{continuum_eigenvalues, homogenized};
use landscape_lab::discretize::assemble;
use landscape_lab::landscape::landscape;
use landscape_lab::linalg::lowest_eigenvalues;
use landscape_lab::potential::{generate, Distribution};
use landscape_lab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { ll_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn make(dist: &str, len: usize, k: f64, seed: u64) -> *mut LlPotential {
    let d = std::ffi::CString::new(dist).unwrap();
    let mut p = ptr::null_mut();
    let st = unsafe { ll_potential_generate(d.as_ptr(), len, k, seed, &mut p) };
    assert_eq!(st, LlStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ll_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_potential_matches_core() {
    let p = make("bernoulli:0.5:10", 40, 1.0, 7);
    let core = generate(Distribution::bernoulli(0.5, 10.0).unwrap(), 40, 1.0, 7).unwrap();
    unsafe {
        assert_eq!(ll_potential_len(p), 40);
        let mut cells = vec![0.0; 40];
        assert_eq!(ll_potential_cells(p, cells.as_mut_ptr(), cells.len()), LlStatus::Ok);
        assert_eq!(cells, core.cells);

        let mut l_max = 0usize;
        assert_eq!(ll_potential_l_max(p, &mut l_max), LlStatus::Ok);
        assert_eq!(l_max, landscape_lab::potential::decompose_wells(&core).l_max);

        let t = assemble(&core, 16).unwrap();
        let expect = lowest_eigenvalues(&t, 3, 1e-12).unwrap().eigenvalues;
        let mut eig = [0.0; 3];
        assert_eq!(ll_lowest_eigenvalues(p, 16, 3, 1e-12, eig.as_mut_ptr()), LlStatus::Ok);
        assert_eq!(eig.to_vec(), expect);

        let land = landscape(&t).unwrap();
        let mut u = vec![0.0; 40 * 16 - 1];
        let mut u_max = 0.0;
        assert_eq!(ll_landscape(p, 16, u.as_mut_ptr(), u.len(), &mut u_max), LlStatus::Ok);
        assert_eq!(u, land.u);
        assert_eq!(u_max, land.u_max);

        let mut only_max = 0.0;
        assert_eq!(ll_landscape(p, 16, ptr::null_mut(), 0, &mut only_max), LlStatus::Ok);
        assert_eq!(only_max, land.u_max);

        let mut ratio = 0.0;
        assert_eq!(ll_ground_ratio(p, 16, &mut ratio), LlStatus::Ok);
        assert!(ratio > 1.0 && ratio < 1.7305, "{ratio}");

        let mut cont = [0.0; 2];
        assert_eq!(ll_continuum_eigenvalues(p, 2, cont.as_mut_ptr()), LlStatus::Ok);
        assert_eq!(cont.to_vec(), continuum_eigenvalues(&core, 2).unwrap());
        assert!((cont[0] - eig[0]).abs() / cont[0] < 1e-2);

        let mut uc = 0.0;
        assert_eq!(ll_continuum_landscape_max(p, &mut uc), LlStatus::Ok);
        assert!((uc - u_max).abs() / uc < 1e-2);

        ll_potential_free(p);
    }
}

#[test]
fn from_cells_round_trips() {
    let cells = [0.0, 3.0, 0.0, 0.0, 5.0];
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(ll_potential_from_cells(cells.as_ptr(), 5, 2.0, &mut p), LlStatus::Ok);
        let mut back = [0.0; 5];
        assert_eq!(ll_potential_cells(p, back.as_mut_ptr(), 5), LlStatus::Ok);
        assert_eq!(back, cells);
        let mut l_max = 0;
        assert_eq!(ll_potential_l_max(p, &mut l_max), LlStatus::Ok);
        assert_eq!(l_max, 2);
        ll_potential_free(p);
    }
}

#[test]
fn homogenized_values_and_inverse() {
    let (mut l, mut u, mut r) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(ll_homogenized(4.0, &mut l, &mut u, &mut r), LlStatus::Ok);
        let h = homogenized(4.0);
        assert_eq!((l, u, r), (h.lambda_c, h.u_c_max, h.ratio));
        let mut g = 0.0;
        assert_eq!(ll_invert_ratio(r, &mut g), LlStatus::Ok);
        assert!((g - 4.0).abs() < 1e-8, "{g}");
        assert_eq!(ll_invert_ratio(2.0, &mut g), LlStatus::InvalidArgument);
        assert_eq!(ll_homogenized(-1.0, &mut l, &mut u, &mut r), LlStatus::InvalidArgument);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            ll_potential_generate(ptr::null(), 10, 1.0, 1, &mut p),
            LlStatus::NullPointer
        );
        assert!(last_error().contains("dist"));

        let bad = c"gaussian:1";
        assert_eq!(ll_potential_generate(bad.as_ptr(), 10, 1.0, 1, &mut p), LlStatus::InvalidArgument);
        assert!(p.is_null());

        let mut x = 0.0;
        assert_eq!(ll_ground_ratio(ptr::null(), 8, &mut x), LlStatus::NullPointer);
        assert!(last_error().contains("potential"));
        assert_eq!(ll_potential_len(ptr::null()), 0);

        let q = make("uniform:0:1", 12, 1.0, 3);
        let mut small = [0.0; 4];
        assert_eq!(ll_potential_cells(q, small.as_mut_ptr(), 4), LlStatus::BufferTooSmall);
        assert!(last_error().contains("12"));
        assert_eq!(
            ll_landscape(q, 4, small.as_mut_ptr(), 4, &mut x),
            LlStatus::BufferTooSmall
        );
        assert_eq!(ll_lowest_eigenvalues(q, 0, 1, 1e-12, small.as_mut_ptr()), LlStatus::InvalidArgument);
        assert_eq!(ll_lowest_eigenvalues(q, 4, 1, 1e-12, ptr::null_mut()), LlStatus::NullPointer);

        // truncated copy is still terminated
        let mut tiny = [1 as c_char; 4];
        let need = ll_last_error_message(tiny.as_mut_ptr(), 4);
        assert!(need > 4);
        assert_eq!(tiny[3], 0);
        ll_potential_free(q);
        ll_potential_free(ptr::null_mut());
    }
}
