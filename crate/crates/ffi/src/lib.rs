//! C ABI over `landscape_lab`.
//!
//! Potentials live behind the opaque `LlPotential` handle. Every fallible call
//! returns an `LlStatus`; on failure a message for the calling thread is kept
//! and can be read with `ll_last_error_message`. Output arrays are supplied by
//! the caller. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use landscape_lab::continuum::{
    continuum_eigenvalues, continuum_landscape_max, homogenized, invert_ratio,
};
use landscape_lab::discretize::assemble;
use landscape_lab::landscape::landscape;
use landscape_lab::linalg::lowest_eigenvalues;
use landscape_lab::potential::{decompose_wells, generate, Distribution, RealizedPotential};
use landscape_lab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    SolverFailure = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque realized potential.
pub struct LlPotential {
    inner: RealizedPotential,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(LlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = if e.is_solver_failure() {
            LlStatus::SolverFailure
        } else {
            LlStatus::InvalidArgument
        };
        Fail(status, e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(LlStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LlStatus::Panic
        }
    }
}

unsafe fn handle<'a>(p: *const LlPotential) -> Result<&'a RealizedPotential, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("potential"))
}

unsafe fn write_slice(out: *mut f64, name: &str, values: &[f64]) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write_one<T>(out: *mut T, name: &str, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn boxed(p: RealizedPotential) -> *mut LlPotential {
    Box::into_raw(Box::new(LlPotential { inner: p }))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ll_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (nul-terminated,
/// truncated to `cap` bytes). Returns the full message length plus one, or 0
/// when there is no message.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ll_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Draws `len` cells from the law described by `dist` (for example
/// `"bernoulli:0.5:40"`) with coupling `k`.
///
/// # Safety
/// `dist` must be a valid nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_generate(
    dist: *const c_char,
    len: usize,
    k: f64,
    seed: u64,
    out: *mut *mut LlPotential,
) -> LlStatus {
    guard(|| {
        if dist.is_null() {
            return Err(null("dist"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(dist)
            .to_str()
            .map_err(|_| Fail(LlStatus::InvalidArgument, "dist is not UTF-8".into()))?;
        let d: Distribution = text.parse()?;
        out.write(boxed(generate(d, len, k, seed)?));
        Ok(())
    })
}

/// Wraps explicit cell heights.
///
/// # Safety
/// `cells` must point to `len` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_from_cells(
    cells: *const f64,
    len: usize,
    k: f64,
    out: *mut *mut LlPotential,
) -> LlStatus {
    guard(|| {
        if cells.is_null() {
            return Err(null("cells"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let v = std::slice::from_raw_parts(cells, len).to_vec();
        out.write(boxed(RealizedPotential::from_cells(v, k)?));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_free(p: *mut LlPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_len(p: *const LlPotential) -> usize {
    p.as_ref().map_or(0, |h| h.inner.len())
}

/// Copies the cell heights into `out`, which must hold `ll_potential_len(p)`.
///
/// # Safety
/// `p` must be a live handle and `out` point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_cells(
    p: *const LlPotential,
    out: *mut f64,
    cap: usize,
) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        if cap < pot.len() {
            return Err(Fail(
                LlStatus::BufferTooSmall,
                format!("need room for {} cells, got {cap}", pot.len()),
            ));
        }
        write_slice(out, "out", &pot.cells)
    })
}

/// Length of the longest zero well.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_potential_l_max(p: *const LlPotential, out: *mut usize) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        write_one(out, "out", decompose_wells(pot).l_max)
    })
}

/// The `n` smallest eigenvalues of the discretization with `m` subdivisions
/// per cell, ascending.
///
/// # Safety
/// `p` must be a live handle and `out` point to `n` writable values.
#[no_mangle]
pub unsafe extern "C" fn ll_lowest_eigenvalues(
    p: *const LlPotential,
    m: usize,
    n: usize,
    tol: f64,
    out: *mut f64,
) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        let t = assemble(pot, m)?;
        let spec = lowest_eigenvalues(&t, n, tol)?;
        write_slice(out, "out", &spec.eigenvalues)
    })
}

/// Landscape function at the `L·m − 1` interior nodes. `u` may be null when
/// only `u_max` is wanted.
///
/// # Safety
/// `p` must be a live handle, `u` null or pointing to `cap` writable values,
/// and `u_max` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_landscape(
    p: *const LlPotential,
    m: usize,
    u: *mut f64,
    cap: usize,
    u_max: *mut f64,
) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        if u_max.is_null() {
            return Err(null("u_max"));
        }
        let res = landscape(&assemble(pot, m)?)?;
        if !u.is_null() {
            if cap < res.u.len() {
                return Err(Fail(
                    LlStatus::BufferTooSmall,
                    format!("need room for {} nodes, got {cap}", res.u.len()),
                ));
            }
            write_slice(u, "u", &res.u)?;
        }
        write_one(u_max, "u_max", res.u_max)
    })
}

/// `λ₁ / min W = λ₁ · max u` of the discretization.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_ground_ratio(p: *const LlPotential, m: usize, out: *mut f64) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        let t = assemble(pot, m)?;
        let l = lowest_eigenvalues(&t, 1, landscape_lab::linalg::DEFAULT_TOL)?.eigenvalues[0];
        let u = landscape(&t)?.u_max;
        write_one(out, "out", l * u)
    })
}

/// The `n` smallest eigenvalues of the continuum operator.
///
/// # Safety
/// `p` must be a live handle and `out` point to `n` writable values.
#[no_mangle]
pub unsafe extern "C" fn ll_continuum_eigenvalues(
    p: *const LlPotential,
    n: usize,
    out: *mut f64,
) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        write_slice(out, "out", &continuum_eigenvalues(pot, n)?)
    })
}

/// Maximum of the exact continuum landscape function.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ll_continuum_landscape_max(p: *const LlPotential, out: *mut f64) -> LlStatus {
    guard(|| {
        let pot = handle(p)?;
        write_one(out, "out", continuum_landscape_max(pot))
    })
}

/// Homogenized limits for `γ_c`: ground state `π² + γ_c`, landscape maximum
/// and their product `R(γ_c)`.
///
/// # Safety
/// All three outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_homogenized(
    gamma_c: f64,
    lambda_c: *mut f64,
    u_c_max: *mut f64,
    ratio: *mut f64,
) -> LlStatus {
    guard(|| {
        if !(gamma_c.is_finite() && gamma_c >= 0.0) {
            return Err(Fail(
                LlStatus::InvalidArgument,
                format!("γ_c = {gamma_c} must be finite and nonnegative"),
            ));
        }
        let h = homogenized(gamma_c);
        write_one(lambda_c, "lambda_c", h.lambda_c)?;
        write_one(u_c_max, "u_c_max", h.u_c_max)?;
        write_one(ratio, "ratio", h.ratio)
    })
}

/// `γ_c` with `R(γ_c) = r`, for `1 < r < π²/8`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ll_invert_ratio(r: f64, out: *mut f64) -> LlStatus {
    guard(|| write_one(out, "out", invert_ratio(r)?))
}
