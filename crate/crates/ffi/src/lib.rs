//! C interface to `hlog`.
//!
//! Every fallible call returns an [`HlogStatus`] and writes its result through an out
//! pointer. Handles are opaque and must be released with the matching `_free` function.
//! After a non-OK status, [`hlog_last_error`] copies a description of the failure.
//! Complex data crosses the boundary as separate real and imaginary arrays; a null
//! imaginary pointer means zeros on input and "not wanted" on output.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use hlog::atomic::{self, AtomDecomposition};
use hlog::{dyadic, maximal, orlicz, Error, GridFunction, HaarCoefficients, OrliczSpec, Shift};
use num_complex::Complex64;

/// Function on a torus grid of `3 * 2^N` cells.
pub struct HlogGrid(GridFunction);

/// Haar expansion in one of the two dyadic systems.
pub struct HlogCoefficients(HaarCoefficients);

/// Mean plus atoms produced by the stopping-time decomposition.
pub struct HlogDecomposition(AtomDecomposition);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlogStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HlogShift {
    /// Arcs starting at multiples of `2 pi 2^-k`
    Zero = 0,
    /// The same arcs translated by `2 pi / 3`
    Third = 1,
}

impl From<HlogShift> for Shift {
    fn from(s: HlogShift) -> Self {
        match s {
            HlogShift::Zero => Shift::Zero,
            HlogShift::Third => Shift::Third,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: HlogStatus, msg: impl Into<String>) -> HlogStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> HlogStatus {
    let status = match e {
        Error::NonConvergence { .. } => HlogStatus::Numerical,
        _ => HlogStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `body`, turning errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), HlogStatus>) -> HlogStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HlogStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(HlogStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn get<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, HlogStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(HlogStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), HlogStatus> {
    if out.is_null() {
        return Err(fail(HlogStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), HlogStatus> {
    put(out, Box::into_raw(Box::new(value)), "output handle")
}

fn lift<T>(r: hlog::Result<T>) -> Result<T, HlogStatus> {
    r.map_err(from_error)
}

/// Copies the message of the last failure on this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes, without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hlog_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// `t / log(e + t)`.
#[no_mangle]
pub extern "C" fn hlog_psi0(t: f64) -> f64 {
    orlicz::psi0(t)
}

/// Builds a torus grid from `n` samples; `n` must be `3 * 2^N`.
///
/// # Safety
/// `re` must point to `n` doubles, `im` must be null or point to `n` doubles, and
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_grid_new(
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut HlogGrid,
) -> HlogStatus {
    guard(|| {
        if re.is_null() {
            return Err(fail(HlogStatus::NullPointer, "re is null"));
        }
        let re = std::slice::from_raw_parts(re, n);
        let samples: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, n);
            re.iter().zip(im).map(|(&x, &y)| Complex64::new(x, y)).collect()
        };
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(fail(HlogStatus::InvalidArgument, "samples must be finite"));
        }
        let grid = lift(GridFunction::torus(samples))?;
        boxed(out, HlogGrid(grid))
    })
}

/// Number of cells, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hlog_grid_len(grid: *const HlogGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copies the samples into `re` and, when non-null, `im`; `n` must equal the grid length.
///
/// # Safety
/// `grid` must be a live handle; `re` (and `im` if non-null) must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hlog_grid_samples(
    grid: *const HlogGrid,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> HlogStatus {
    guard(|| {
        let g = &get(grid, "grid")?.0;
        if re.is_null() {
            return Err(fail(HlogStatus::NullPointer, "re is null"));
        }
        if n != g.len() {
            return Err(fail(
                HlogStatus::InvalidArgument,
                format!("buffer holds {n} samples, grid has {}", g.len()),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re, n);
        for (r, z) in re.iter_mut().zip(g.samples()) {
            *r = z.re;
        }
        if !im.is_null() {
            let im = std::slice::from_raw_parts_mut(im, n);
            for (i, z) in im.iter_mut().zip(g.samples()) {
                *i = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hlog_grid_free(grid: *mut HlogGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Haar coefficients of `grid` in the system `shift`.
///
/// # Safety
/// `grid` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_analyze(
    grid: *const HlogGrid,
    shift: HlogShift,
    out: *mut *mut HlogCoefficients,
) -> HlogStatus {
    guard(|| {
        let g = &get(grid, "grid")?.0;
        let c = lift(dyadic::analyze(g, shift.into()))?;
        boxed(out, HlogCoefficients(c))
    })
}

/// Inverse of [`hlog_analyze`].
///
/// # Safety
/// `coeffs` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_synthesize(
    coeffs: *const HlogCoefficients,
    out: *mut *mut HlogGrid,
) -> HlogStatus {
    guard(|| {
        let c = &get(coeffs, "coefficients")?.0;
        boxed(out, HlogGrid(dyadic::synthesize(c)))
    })
}

/// Square function of the expansion, one value per cell.
///
/// # Safety
/// `coeffs` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_square_function(
    coeffs: *const HlogCoefficients,
    out: *mut *mut HlogGrid,
) -> HlogStatus {
    guard(|| {
        let c = &get(coeffs, "coefficients")?.0;
        boxed(out, HlogGrid(dyadic::square_function(c)))
    })
}

/// Luxemburg norm of the square function under `psi0`, normalised by `2 pi`.
///
/// # Safety
/// `coeffs` must be a live handle and `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hlog_dyadic_quasinorm(
    coeffs: *const HlogCoefficients,
    out: *mut f64,
) -> HlogStatus {
    guard(|| {
        let c = &get(coeffs, "coefficients")?.0;
        let v = lift(dyadic::hlog_dyadic_quasinorm(c))?;
        put(out, v, "out")
    })
}

/// # Safety
/// `coeffs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hlog_coefficients_free(coeffs: *mut HlogCoefficients) {
    if !coeffs.is_null() {
        drop(Box::from_raw(coeffs));
    }
}

/// Luxemburg norm of `grid` under `psi0` with the normalised measure `d theta / 2 pi`.
///
/// # Safety
/// `grid` must be a live handle and `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hlog_luxemburg_psi0(grid: *const HlogGrid, out: *mut f64) -> HlogStatus {
    guard(|| {
        let g = &get(grid, "grid")?.0;
        let v = lift(orlicz::luxemburg_norm_grid(
            g,
            &OrliczSpec::psi0(),
            1.0 / std::f64::consts::TAU,
        ))?;
        put(out, v, "out")
    })
}

/// Centred Hardy-Littlewood maximal function on the circle.
///
/// # Safety
/// `grid` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_maximal(grid: *const HlogGrid, out: *mut *mut HlogGrid) -> HlogStatus {
    guard(|| {
        let g = &get(grid, "grid")?.0;
        boxed(out, HlogGrid(lift(maximal::hl_maximal_torus(g))?))
    })
}

/// Atomic decomposition of `grid` along the system `shift`.
///
/// # Safety
/// `grid` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_atomic_decompose(
    grid: *const HlogGrid,
    shift: HlogShift,
    out: *mut *mut HlogDecomposition,
) -> HlogStatus {
    guard(|| {
        let g = &get(grid, "grid")?.0;
        let d = lift(atomic::atomic_decompose(g, shift.into()))?;
        boxed(out, HlogDecomposition(d))
    })
}

/// Number of atoms, or 0 for a null handle.
///
/// # Safety
/// `dec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hlog_decomposition_atom_count(dec: *const HlogDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.0.atoms.len())
}

/// Luxemburg-type size of the decomposition: mean plus the `psi0` mass of its atoms.
///
/// # Safety
/// `dec` must be a live handle and `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hlog_decomposition_lambda_inf(
    dec: *const HlogDecomposition,
    out: *mut f64,
) -> HlogStatus {
    guard(|| {
        let d = &get(dec, "decomposition")?.0;
        let v = lift(atomic::lambda_inf(d.mean, &d.atoms))?;
        put(out, v, "out")
    })
}

/// Mean plus the sum of the atoms.
///
/// # Safety
/// `dec` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn hlog_decomposition_reconstruct(
    dec: *const HlogDecomposition,
    out: *mut *mut HlogGrid,
) -> HlogStatus {
    guard(|| {
        let d = &get(dec, "decomposition")?.0;
        boxed(out, HlogGrid(lift(d.reconstruct())?))
    })
}

/// # Safety
/// `dec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hlog_decomposition_free(dec: *mut HlogDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}
