//! C ABI over the phasespace toolkit.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `ps_*_new`/`ps_*_from_*` function and released by the matching `ps_*_free`.
//! Fallible functions return a [`PsStatus`]; on failure the message is
//! available from [`ps_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use phasespace::grid::DEFAULT_BAND;
use phasespace::states::demo_state;
use phasespace::states::io::{mixed_from_json, pure_from_json};
use phasespace::verify::{all_passed, run_suite, write_reports, VerifyConfig};
use phasespace::{transforms, Error, Grid, MixedState, MultiIndex, PureState, SampledFn};

/// Result codes of the C interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or inconsistent lengths.
    InvalidArgument = 1,
    /// Malformed JSON or index text.
    Parse = 2,
    InvalidState = 3,
    InvalidGrid = 4,
    /// The computation itself failed (resolution guard, non-finite values).
    Numerical = 5,
    Unsupported = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// A density operator.
pub struct PsState(MixedState);
/// A reference wavefunction.
pub struct PsPure(PureState);
/// A uniform phase-space grid.
pub struct PsGrid(Grid);
/// Complex samples of a phase-space function on a grid.
pub struct PsFunction(SampledFn);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> PsStatus {
    match e {
        Error::Parse(_) | Error::InvalidIndex(_) | Error::IndexNotBelow { .. } => PsStatus::Parse,
        Error::InvalidState(_) | Error::NotNormalized { .. } | Error::NotAnalytic(_) => PsStatus::InvalidState,
        Error::InvalidGrid(_) | Error::DimensionMismatch(_) => PsStatus::InvalidGrid,
        Error::Unsupported(_) | Error::DerivativeOrder { .. } => PsStatus::Unsupported,
        Error::Io { .. } => PsStatus::InvalidArgument,
        _ => PsStatus::Numerical,
    }
}

struct Fail(PsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(PsStatus::InvalidArgument, msg.to_string())
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a mixed state from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_state_from_json(json: *const c_char, out: *mut *mut PsState) -> PsStatus {
    guard(|| {
        let rho = mixed_from_json(str_arg(json, "json")?)?;
        write_out(out, boxed(PsState(rho)), "out")
    })
}

/// Built-in state by name; `k = 0` selects the default heavy-tail truncation.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_state_demo(name: *const c_char, k: usize, out: *mut *mut PsState) -> PsStatus {
    guard(|| {
        let rho = demo_state(str_arg(name, "name")?, (k > 0).then_some(k))?;
        write_out(out, boxed(PsState(rho)), "out")
    })
}

/// Degrees of freedom `n`; 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_state_dim(state: *const PsState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `state` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_state_trace(state: *const PsState, out: *mut f64) -> PsStatus {
    guard(|| write_out(out, ref_arg(state, "state")?.0.trace(), "out"))
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_state_free(state: *mut PsState) {
    free(state)
}

/// Parses a reference wavefunction from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_pure_from_json(json: *const c_char, out: *mut *mut PsPure) -> PsStatus {
    guard(|| {
        let psi = pure_from_json(str_arg(json, "json")?)?;
        write_out(out, boxed(PsPure(psi)), "out")
    })
}

/// The standard Gaussian in `n` degrees of freedom.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_pure_vacuum(n: usize, out: *mut *mut PsPure) -> PsStatus {
    guard(|| {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        write_out(out, boxed(PsPure(PureState::vacuum(n))), "out")
    })
}

/// # Safety
/// `pure` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_pure_free(pure: *mut PsPure) {
    free(pure)
}

/// Phase-space grid over `R^{2n}` with `points` nodes per axis on `[-L, L)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_grid_new(n: usize, points: usize, half_extent: f64, out: *mut *mut PsGrid) -> PsStatus {
    guard(|| {
        let grid = Grid::phase_space(n, points, half_extent)?;
        write_out(out, boxed(PsGrid(grid)), "out")
    })
}

/// Total number of nodes, `points^(2n)`; 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_grid_len(grid: *const PsGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_grid_free(grid: *mut PsGrid) {
    free(grid)
}

unsafe fn reference(chi: *const PsPure, n: usize) -> PureState {
    chi.as_ref().map_or_else(|| PureState::vacuum(n), |c| c.0.clone())
}

/// Wigner function sampled on `grid`.
///
/// # Safety
/// `state` and `grid` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_wigner(state: *const PsState, grid: *const PsGrid, out: *mut *mut PsFunction) -> PsStatus {
    guard(|| {
        let f = transforms::wigner(&ref_arg(state, "state")?.0, &ref_arg(grid, "grid")?.0)?;
        write_out(out, boxed(PsFunction(f)), "out")
    })
}

/// Husimi function against `chi`; a null `chi` selects the vacuum.
///
/// # Safety
/// `state` and `grid` must be live handles, `chi` null or live, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ps_husimi(
    state: *const PsState,
    chi: *const PsPure,
    grid: *const PsGrid,
    out: *mut *mut PsFunction,
) -> PsStatus {
    guard(|| {
        let rho = &ref_arg(state, "state")?.0;
        let f = transforms::husimi(rho, &reference(chi, rho.dim()), &ref_arg(grid, "grid")?.0)?;
        write_out(out, boxed(PsFunction(f)), "out")
    })
}

/// Quasicharacteristic function sampled on `grid`.
///
/// # Safety
/// `state` and `grid` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_quasichar(state: *const PsState, grid: *const PsGrid, out: *mut *mut PsFunction) -> PsStatus {
    guard(|| {
        let f = transforms::quasichar(&ref_arg(state, "state")?.0, &ref_arg(grid, "grid")?.0)?;
        write_out(out, boxed(PsFunction(f)), "out")
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_function_len(f: *const PsFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the samples in row-major order into `re` and `im`, each of length
/// `len`, which must equal [`ps_function_len`]. `im` may be null.
///
/// # Safety
/// `f` must be a live handle; `re` (and `im` unless null) must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_function_values(f: *const PsFunction, re: *mut f64, im: *mut f64, len: usize) -> PsStatus {
    guard(|| {
        let v = ref_arg(f, "function")?.0.values();
        if len != v.len() {
            return Err(invalid(&format!("buffer length {len} differs from {} samples", v.len())));
        }
        if re.is_null() {
            return Err(invalid("re is null"));
        }
        let re = slice::from_raw_parts_mut(re, len);
        for (r, z) in re.iter_mut().zip(v) {
            *r = z.re;
        }
        if !im.is_null() {
            for (i, z) in slice::from_raw_parts_mut(im, len).iter_mut().zip(v) {
                *i = z.im;
            }
        }
        Ok(())
    })
}

/// Riemann-sum integral over the grid.
///
/// # Safety
/// `f` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ps_function_integral(f: *const PsFunction, re: *mut f64, im: *mut f64) -> PsStatus {
    guard(|| {
        let z = ref_arg(f, "function")?.0.quadrature();
        write_out(re, z.re, "re")?;
        write_out(im, z.im, "im")
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_function_free(f: *mut PsFunction) {
    free(f)
}

/// Matrix element `<chi_alpha|rho|chi_beta>`; `alpha` and `beta` hold `len = 2n`
/// coordinates `x.., p..`. A null `chi` selects the vacuum.
///
/// # Safety
/// Handles must be live or null as documented; arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_matel(
    state: *const PsState,
    chi: *const PsPure,
    alpha: *const f64,
    beta: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> PsStatus {
    guard(|| {
        let rho = &ref_arg(state, "state")?.0;
        if len != 2 * rho.dim() {
            return Err(invalid(&format!("points need {} coordinates, got {len}", 2 * rho.dim())));
        }
        let (a, b) = (slice_arg(alpha, len, "alpha")?, slice_arg(beta, len, "beta")?);
        let z = transforms::matel(rho, &reference(chi, rho.dim()), a, b)?;
        write_out(re, z.re, "re")?;
        write_out(im, z.im, "im")
    })
}

/// Weighted sup-seminorm `|F|_{a,b}` with `len`-entry multi-indices. A
/// negative `band` selects the default interior band.
///
/// # Safety
/// `f` must be a live handle; `a` and `b` must hold `len` entries; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ps_seminorm(
    f: *const PsFunction,
    a: *const u32,
    b: *const u32,
    len: usize,
    band: f64,
    out: *mut f64,
) -> PsStatus {
    guard(|| {
        let f = &ref_arg(f, "function")?.0;
        let a = MultiIndex::new(slice_arg(a, len, "a")?.to_vec())?;
        let b = MultiIndex::new(slice_arg(b, len, "b")?.to_vec())?;
        let band = if band < 0.0 { DEFAULT_BAND } else { band };
        let est = phasespace::seminorms::SeminormEstimator::with_band(f.clone(), band);
        write_out(out, est.seminorm(&a, &b)?, "out")
    })
}

/// Runs the verification suite on an `points`-per-axis grid of half extent
/// `half_extent`. Writes 1 to `passed` when no check failed and, if `csv` is
/// non-null, the report CSV as a string to be released with [`ps_string_free`].
///
/// # Safety
/// `state` must be live, `chi` null or live, `passed` valid, `csv` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ps_run_verify(
    state: *const PsState,
    chi: *const PsPure,
    points: usize,
    half_extent: f64,
    seed: u64,
    passed: *mut i32,
    csv: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        let rho = &ref_arg(state, "state")?.0;
        let cfg = VerifyConfig {
            points,
            half_extent,
            seed,
            ..VerifyConfig::default()
        };
        cfg.grid(rho.dim())?;
        let reports = run_suite(rho, &reference(chi, rho.dim()), &cfg);
        write_out(passed, all_passed(&reports) as i32, "passed")?;
        if !csv.is_null() {
            let mut buf = Vec::new();
            write_reports(&mut buf, &reports)?;
            let s = CString::new(buf).map_err(|_| invalid("report contains a NUL byte"))?;
            csv.write(s.into_raw());
        }
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
