//! C interface to `prevlab`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` or
//! `*_parse` functions and released with the matching `*_free`. Every
//! fallible call returns a [`PrevlabStatus`]; the message of the most recent
//! failure on the calling thread is available from [`prevlab_last_error`].
//! Panics never unwind into C; they surface as `PREVLAB_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use prevlab::engine::{estimate_failure_measure, predicate_from_spec};
use prevlab::hopf::{classify_point, Classification, PlanarFamily};
use prevlab::measures::binary_shift_union_measure;
use prevlab::polyjet::text::{parse_single, write_poly_body};
use prevlab::polyjet::PolyMap;
use prevlab::probes::{parse_probe, polynomial_probe, Element, Probe};
use prevlab::{seeding, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrevlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    Io = 4,
    Degenerate = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PrevlabStatus {
    match e {
        Error::Input(_) => PrevlabStatus::InvalidInput,
        Error::Parse { .. } => PrevlabStatus::Parse,
        Error::Io(_) => PrevlabStatus::Io,
        Error::Degenerate(_) => PrevlabStatus::Degenerate,
    }
}

fn guard(f: impl FnOnce() -> Result<(), PrevlabStatus>) -> PrevlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PrevlabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            PrevlabStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, PrevlabStatus>;
}

impl<T> OrStatus<T> for prevlab::Result<T> {
    fn or_status(self) -> Result<T, PrevlabStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null_check<T>(p: *const T, what: &str) -> Result<(), PrevlabStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(PrevlabStatus::NullPointer);
    }
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, PrevlabStatus> {
    null_check(s, what)?;
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        PrevlabStatus::InvalidInput
    })
}

/// Polynomial map handle.
pub struct PrevlabPoly(PolyMap);

/// Probe handle.
pub struct PrevlabProbe(Probe);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PrevlabShyness {
    pub samples: u64,
    pub holds: u64,
    pub fails: u64,
    pub undecided: u64,
    pub failure_fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PrevlabHopf {
    pub omega: f64,
    pub trace_mu_derivative: f64,
    pub lyapunov_quantity: f64,
    /// 0 supercritical, 1 subcritical, 2 degenerate-c, 3 degenerate-d,
    /// 4 not a Hopf point.
    pub classification: i32,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn prevlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated). `*len` receives the needed size including the NUL.
#[no_mangle]
pub unsafe extern "C" fn prevlab_last_error(buf: *mut c_char, cap: usize, len: *mut usize) -> PrevlabStatus {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !len.is_null() {
            *len = bytes.len();
        }
        if buf.is_null() || cap < bytes.len() {
            return PrevlabStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, bytes.len());
        PrevlabStatus::Ok
    })
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn prevlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a `poly n m` (or `family 3 2`) block.
#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_parse(text: *const c_char, out: *mut *mut PrevlabPoly) -> PrevlabStatus {
    guard(|| {
        null_check(out, "out")?;
        let text = c_str(text, "text")?;
        let kind = if text.trim_start().starts_with("family") { "family" } else { "poly" };
        let p = parse_single(text, kind).or_status()?;
        *out = Box::into_raw(Box::new(PrevlabPoly(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_free(p: *mut PrevlabPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_dims(p: *const PrevlabPoly, n: *mut usize, m: *mut usize) -> PrevlabStatus {
    guard(|| {
        null_check(p, "poly")?;
        null_check(n, "n")?;
        null_check(m, "m")?;
        *n = (*p).0.domain_dim();
        *m = (*p).0.range_dim();
        Ok(())
    })
}

/// Evaluates at `x[0..n]`, writing `out[0..m]`.
#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_eval(
    p: *const PrevlabPoly,
    x: *const f64,
    n: usize,
    out: *mut f64,
    m: usize,
) -> PrevlabStatus {
    guard(|| {
        null_check(p, "poly")?;
        null_check(x, "x")?;
        null_check(out, "out")?;
        let poly = &(*p).0;
        if m < poly.range_dim() {
            set_error(&format!("output holds {m} values, map has {}", poly.range_dim()));
            return Err(PrevlabStatus::BufferTooSmall);
        }
        let v = poly.eval(std::slice::from_raw_parts(x, n)).or_status()?;
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        Ok(())
    })
}

/// Serializes in the text format; free the result with
/// [`prevlab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_to_text(p: *const PrevlabPoly, out: *mut *mut c_char) -> PrevlabStatus {
    guard(|| {
        null_check(p, "poly")?;
        null_check(out, "out")?;
        let s = write_poly_body("poly", &(*p).0);
        *out = CString::new(s).expect("no NUL in text").into_raw();
        Ok(())
    })
}

/// Adds `c * b` to `a` in place.
#[no_mangle]
pub unsafe extern "C" fn prevlab_poly_axpy(a: *mut PrevlabPoly, c: f64, b: *const PrevlabPoly) -> PrevlabStatus {
    guard(|| {
        null_check(a, "a")?;
        null_check(b, "b")?;
        let sum = (*a).0.add(&(*b).0.scale(c)).or_status()?;
        (*a).0 = sum;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn prevlab_probe_parse(text: *const c_char, out: *mut *mut PrevlabProbe) -> PrevlabStatus {
    guard(|| {
        null_check(out, "out")?;
        let p = parse_probe(c_str(text, "text")?).or_status()?;
        *out = Box::into_raw(Box::new(PrevlabProbe(p)));
        Ok(())
    })
}

/// All monomials of degree at most `k` in each of the `m` components of
/// maps `R^n -> R^m`.
#[no_mangle]
pub unsafe extern "C" fn prevlab_probe_polynomial(
    n: usize,
    m: usize,
    k: u32,
    out: *mut *mut PrevlabProbe,
) -> PrevlabStatus {
    guard(|| {
        null_check(out, "out")?;
        let p = polynomial_probe(n, m, k).or_status()?;
        *out = Box::into_raw(Box::new(PrevlabProbe(p)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn prevlab_probe_free(p: *mut PrevlabProbe) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub unsafe extern "C" fn prevlab_probe_dim(p: *const PrevlabProbe, dim: *mut usize) -> PrevlabStatus {
    guard(|| {
        null_check(p, "probe")?;
        null_check(dim, "dim")?;
        *dim = (*p).0.dim();
        Ok(())
    })
}

/// Sets the half-width of the sampling box.
#[no_mangle]
pub unsafe extern "C" fn prevlab_probe_set_radius(p: *mut PrevlabProbe, r: f64) -> PrevlabStatus {
    guard(|| {
        null_check(p, "probe")?;
        (*p).0 = (*p).0.clone().with_box_radius(r).or_status()?;
        Ok(())
    })
}

/// Monte Carlo failure estimate of predicate `predicate` (an id such as
/// `fixed-points-hyperbolic`, default parameters) along `probe` at `base`.
/// `workers = 0` uses the default pool; the result does not depend on it.
#[no_mangle]
pub unsafe extern "C" fn prevlab_shyness(
    base: *const PrevlabPoly,
    probe: *const PrevlabProbe,
    predicate: *const c_char,
    samples: u64,
    seed: u64,
    workers: usize,
    out: *mut PrevlabShyness,
) -> PrevlabStatus {
    guard(|| {
        null_check(base, "base")?;
        null_check(probe, "probe")?;
        null_check(out, "out")?;
        let pred = predicate_from_spec(c_str(predicate, "predicate")?, &Default::default()).or_status()?;
        let base = Element::Poly((*base).0.clone());
        let probe = &(*probe).0;
        let r = seeding::with_workers(workers, || {
            estimate_failure_measure(&base, probe, pred.as_ref(), samples as usize, seed)
        })
        .or_status()?;
        *out = PrevlabShyness {
            samples: r.samples as u64,
            holds: r.holds as u64,
            fails: r.fails as u64,
            undecided: r.undecided as u64,
            failure_fraction: r.failure_fraction,
            ci_lo: r.confidence_interval.0,
            ci_hi: r.confidence_interval.1,
        };
        Ok(())
    })
}

/// Measure of the union of binary-shift sets for levels `m+1..=n_max`.
#[no_mangle]
pub unsafe extern "C" fn prevlab_binary_shift_measure(m: u32, n_max: u32, out: *mut f64) -> PrevlabStatus {
    guard(|| {
        null_check(out, "out")?;
        *out = binary_shift_union_measure(m, n_max).or_status()?;
        Ok(())
    })
}

/// Classifies a candidate `(mu0, x, y)` of a `family 3 2` map.
#[no_mangle]
pub unsafe extern "C" fn prevlab_hopf_classify(
    family: *const PrevlabPoly,
    mu0: f64,
    x: f64,
    y: f64,
    out: *mut PrevlabHopf,
) -> PrevlabStatus {
    guard(|| {
        null_check(family, "family")?;
        null_check(out, "out")?;
        let fam = PlanarFamily::new((*family).0.clone()).or_status()?;
        let r = classify_point(&fam, mu0, [x, y]).or_status()?;
        *out = PrevlabHopf {
            omega: r.omega,
            trace_mu_derivative: r.trace_mu_derivative,
            lyapunov_quantity: r.lyapunov_quantity,
            classification: match r.classification {
                Classification::Supercritical => 0,
                Classification::Subcritical => 1,
                Classification::DegenerateC => 2,
                Classification::DegenerateD => 3,
                Classification::NotHopf => 4,
            },
        };
        Ok(())
    })
}
