use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use prevlab_ffi::*;

fn poly(text: &str) -> *mut PrevlabPoly {
    let t = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { prevlab_poly_parse(t.as_ptr(), &mut p) }, PrevlabStatus::Ok);
    p
}

fn last_error() -> String {
    let mut len = 0;
    unsafe {
        assert_eq!(prevlab_last_error(ptr::null_mut(), 0, &mut len), PrevlabStatus::BufferTooSmall);
        let mut buf = vec![0 as std::ffi::c_char; len];
        assert_eq!(prevlab_last_error(buf.as_mut_ptr(), len, &mut len), PrevlabStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn poly_roundtrip_and_eval() {
    let p = poly("poly 2 2\n1 0 : 1 0\n0 2 : 0 -3\n");
    let (mut n, mut m) = (0, 0);
    let mut y = [0.0; 2];
    unsafe {
        assert_eq!(prevlab_poly_dims(p, &mut n, &mut m), PrevlabStatus::Ok);
        assert_eq!((n, m), (2, 2));
        assert_eq!(prevlab_poly_eval(p, [2.0, 1.0].as_ptr(), 2, y.as_mut_ptr(), 2), PrevlabStatus::Ok);
        assert_eq!(prevlab_poly_eval(p, [2.0, 1.0].as_ptr(), 2, y.as_mut_ptr(), 1), PrevlabStatus::BufferTooSmall);
        assert_eq!(prevlab_poly_eval(p, [2.0].as_ptr(), 1, y.as_mut_ptr(), 2), PrevlabStatus::InvalidInput);
        let q = poly("poly 2 2\n1 0 : 1 0\n");
        assert_eq!(prevlab_poly_axpy(p, -1.0, q), PrevlabStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(prevlab_poly_to_text(p, &mut s), PrevlabStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "poly 2 2\n0 2 : 0.0 -3.0\n");
        prevlab_string_free(s);
        prevlab_poly_free(q);
        prevlab_poly_free(p);
    }
    assert_eq!(y, [2.0, -3.0]);
}

#[test]
fn parse_errors_set_message() {
    let t = CString::new("poly 1 1\n1 : x\n").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { prevlab_poly_parse(t.as_ptr(), &mut p) }, PrevlabStatus::Parse);
    assert!(p.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());
}

#[test]
fn shyness_is_worker_independent() {
    let base = poly("poly 1 1\n1 : 1\n2 : -1\n");
    let mut probe = ptr::null_mut();
    let pred = CString::new("fixed-points-hyperbolic").unwrap();
    let (mut a, mut b) = (PrevlabShyness::default(), PrevlabShyness::default());
    unsafe {
        assert_eq!(prevlab_probe_polynomial(1, 1, 1, &mut probe), PrevlabStatus::Ok);
        let mut dim = 0;
        assert_eq!(prevlab_probe_dim(probe, &mut dim), PrevlabStatus::Ok);
        assert_eq!(dim, 2);
        assert_eq!(prevlab_probe_set_radius(probe, -1.0), PrevlabStatus::InvalidInput);
        assert_eq!(prevlab_shyness(base, probe, pred.as_ptr(), 400, 9, 1, &mut a), PrevlabStatus::Ok);
        assert_eq!(prevlab_shyness(base, probe, pred.as_ptr(), 400, 9, 4, &mut b), PrevlabStatus::Ok);
        let bad = CString::new("nope").unwrap();
        assert_eq!(prevlab_shyness(base, probe, bad.as_ptr(), 400, 9, 1, &mut b), PrevlabStatus::InvalidInput);
        prevlab_probe_free(probe);
        prevlab_poly_free(base);
    }
    assert_eq!(a.samples, 400);
    assert_eq!(a.holds + a.fails + a.undecided, 400);
    assert_eq!(a, b);
}

#[test]
fn hopf_normal_form() {
    let fam = poly(
        "family 3 2\n1 1 0 : 1 0\n0 0 1 : -1 0\n0 1 0 : 0 1\n1 0 1 : 0 1\n\
         0 3 0 : -1 0\n0 1 2 : -1 0\n0 2 1 : 0 -1\n0 0 3 : 0 -1\n",
    );
    let mut r = PrevlabHopf::default();
    unsafe {
        assert_eq!(prevlab_hopf_classify(fam, 0.0, 0.0, 0.0, &mut r), PrevlabStatus::Ok);
        prevlab_poly_free(fam);
    }
    assert_eq!(r.classification, 0);
    assert!(r.lyapunov_quantity < 0.0);
    assert!((r.omega - 1.0).abs() < 1e-9);
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    let lib = target_dir().join("libprevlab_ffi.a");
    assert!(include.join("prevlab.h").is_file());
    assert!(lib.is_file(), "missing {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let st = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(&include)
        .arg(manifest.join("tests/c_smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run C compiler");
    assert!(st.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 0.1.0"));
}
