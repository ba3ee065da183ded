//! C ABI for `wthresh`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/producer
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`WthStatus`] whose numeric values equal the `wthresh` CLI exit
//! codes; the message of the most recent failure on the calling thread is
//! available through [`wth_last_error`].
//!
//! Complex data is passed as interleaved `(re, im)` doubles in frame-major
//! order: coefficient `(m, n)` of an `M x N` grid lives at `2 * (n * M + m)`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use wthresh::{
    greedy_mterm, lorentz_norm, rms, weighted_mterm, wgl_denoise, wgl_match_sparsity, CoefficientGrid,
    CoefficientSequence, Error, Exponent, GaborSystem, LorentzParams, WeightStencil2D, WglConfig,
};

/// Status codes. Nonzero values match the process exit codes of the CLI.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WthStatus {
    Ok = 0,
    /// A Rust panic was caught at the boundary.
    Internal = 1,
    /// Invalid argument, including null pointers and failed searches or fits.
    Param = 2,
    Format = 3,
    /// The window/lattice pair is not a frame.
    Frame = 4,
    Io = 5,
}

/// A painless Gabor system (window, hop, channels, signal length).
pub struct WthGabor(GaborSystem);

/// An `M x N` complex coefficient grid.
pub struct WthGrid(CoefficientGrid);

/// A 2-D neighbourhood weight stencil.
pub struct WthStencil(WeightStencil2D);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: WthStatus, message: String) -> WthStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

fn status_of(err: Error) -> WthStatus {
    let status = match err.exit_code() {
        3 => WthStatus::Format,
        4 => WthStatus::Frame,
        5 => WthStatus::Io,
        _ => WthStatus::Param,
    };
    fail(status, err.to_string())
}

fn guard(body: impl FnOnce() -> Result<(), WthStatus>) -> WthStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            WthStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(WthStatus::Internal, "panic inside wthresh".into()),
    }
}

fn null(what: &str) -> WthStatus {
    fail(WthStatus::Param, format!("{what} is null"))
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], WthStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn slice_mut<'a, T>(data: *mut T, len: usize, what: &str) -> Result<&'a mut [T], WthStatus> {
    if len == 0 {
        return Ok(&mut []);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(data, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, WthStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), WthStatus> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), WthStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, WthStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(WthStatus::Param, format!("{what} is not UTF-8")))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
#[no_mangle]
pub unsafe extern "C" fn wth_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Gabor system with a unit-norm periodic Hann window.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_new_hann(
    window_length: usize,
    hop: usize,
    channels: usize,
    signal_length: usize,
    out: *mut *mut WthGabor,
) -> WthStatus {
    guard(|| {
        let sys = GaborSystem::hann(window_length, hop, channels, signal_length).map_err(status_of)?;
        sys.canonical_dual().map_err(status_of)?;
        put(out, WthGabor(sys))
    })
}

/// Gabor system with a caller-supplied real window.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_new(
    window: *const f64,
    window_length: usize,
    hop: usize,
    channels: usize,
    signal_length: usize,
    out: *mut *mut WthGabor,
) -> WthStatus {
    guard(|| {
        let w = slice(window, window_length, "window")?.to_vec();
        let sys = GaborSystem::new(w, hop, channels, signal_length).map_err(status_of)?;
        sys.canonical_dual().map_err(status_of)?;
        put(out, WthGabor(sys))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wth_gabor_free(sys: *mut WthGabor) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of frames `N = L / a`; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_frames(sys: *const WthGabor) -> usize {
    sys.as_ref().map_or(0, |s| s.0.frames())
}

/// Number of coefficients `M * N`; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_coefficient_count(sys: *const WthGabor) -> usize {
    sys.as_ref().map_or(0, |s| s.0.coefficient_count())
}

#[no_mangle]
pub unsafe extern "C" fn wth_gabor_frame_bounds(sys: *const WthGabor, lower: *mut f64, upper: *mut f64) -> WthStatus {
    guard(|| {
        let (a, b) = handle(sys, "system")?.0.frame_bounds().map_err(status_of)?;
        put_value(lower, a)?;
        put_value(upper, b)
    })
}

/// Canonical coefficients of a real signal of exactly `signal_length` samples.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_analyze(
    sys: *const WthGabor,
    signal: *const f64,
    len: usize,
    out: *mut *mut WthGrid,
) -> WthStatus {
    guard(|| {
        let sys = &handle(sys, "system")?.0;
        let f = slice(signal, len, "signal")?;
        let grid = sys.canonical_coefficients(f).map_err(status_of)?;
        put(out, WthGrid(grid))
    })
}

/// Real part of the synthesis with the system window, written to `out[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn wth_gabor_synthesize(
    sys: *const WthGabor,
    grid: *const WthGrid,
    out: *mut f64,
    len: usize,
) -> WthStatus {
    guard(|| {
        let sys = &handle(sys, "system")?.0;
        let grid = &handle(grid, "grid")?.0;
        if len != sys.signal_length() {
            return Err(fail(
                WthStatus::Param,
                format!("output holds {len} samples, system expects {}", sys.signal_length()),
            ));
        }
        let rec = sys.idgt_real(grid, sys.window()).map_err(status_of)?;
        slice_mut(out, len, "output")?.copy_from_slice(&rec);
        Ok(())
    })
}

/// Grid from `2 * channels * frames` interleaved doubles.
#[no_mangle]
pub unsafe extern "C" fn wth_grid_new(
    channels: usize,
    frames: usize,
    interleaved: *const f64,
    len: usize,
    out: *mut *mut WthGrid,
) -> WthStatus {
    guard(|| {
        let raw = slice(interleaved, len, "data")?;
        if len != 2 * channels * frames {
            return Err(fail(
                WthStatus::Param,
                format!(
                    "{channels}x{frames} grid needs {} doubles, got {len}",
                    2 * channels * frames
                ),
            ));
        }
        let data = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let grid = CoefficientGrid::new(channels, frames, data).map_err(status_of)?;
        put(out, WthGrid(grid))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wth_grid_free(grid: *mut WthGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

#[no_mangle]
pub unsafe extern "C" fn wth_grid_channels(grid: *const WthGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.channels())
}

#[no_mangle]
pub unsafe extern "C" fn wth_grid_frames(grid: *const WthGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.frames())
}

#[no_mangle]
pub unsafe extern "C" fn wth_grid_nonzeros(grid: *const WthGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.nonzeros())
}

/// Copies the coefficients as interleaved doubles; `len` must be `2 * M * N`.
#[no_mangle]
pub unsafe extern "C" fn wth_grid_copy(grid: *const WthGrid, out: *mut f64, len: usize) -> WthStatus {
    guard(|| {
        let grid = &handle(grid, "grid")?.0;
        if len != 2 * grid.len() {
            return Err(fail(
                WthStatus::Param,
                format!("buffer holds {len} doubles, grid needs {}", 2 * grid.len()),
            ));
        }
        let dst = slice_mut(out, len, "output")?;
        for (pair, c) in dst.chunks_exact_mut(2).zip(grid.data()) {
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// Stencil from a preset name (`identity`, `weight1`, `weight2`, `weight3`,
/// `extreme-horizontal`) or a tap list `"dm:dn:w,dm:dn:w,..."`.
#[no_mangle]
pub unsafe extern "C" fn wth_stencil_parse(spec: *const c_char, out: *mut *mut WthStencil) -> WthStatus {
    guard(|| {
        let stencil = WeightStencil2D::parse(string(spec, "stencil spec")?).map_err(status_of)?;
        put(out, WthStencil(stencil))
    })
}

#[no_mangle]
pub unsafe extern "C" fn wth_stencil_free(stencil: *mut WthStencil) {
    if !stencil.is_null() {
        drop(Box::from_raw(stencil));
    }
}

/// Keeps the `m` largest-magnitude coefficients, zeroing the rest.
#[no_mangle]
pub unsafe extern "C" fn wth_greedy_mterm(grid: *const WthGrid, m: usize, out: *mut *mut WthGrid) -> WthStatus {
    guard(|| {
        let a = greedy_mterm(&handle(grid, "grid")?.0, m).map_err(status_of)?;
        put(out, WthGrid(a.to_grid()))
    })
}

/// Keeps the coefficients at the `m` positions of largest weighted magnitude.
#[no_mangle]
pub unsafe extern "C" fn wth_weighted_mterm(
    grid: *const WthGrid,
    stencil: *const WthStencil,
    m: usize,
    out: *mut *mut WthGrid,
) -> WthStatus {
    guard(|| {
        let grid = &handle(grid, "grid")?.0;
        let stencil = &handle(stencil, "stencil")?.0;
        let a = weighted_mterm(grid, stencil, m).map_err(status_of)?;
        put(out, WthGrid(a.to_grid()))
    })
}

fn wgl_config(neighborhood: Option<&WthStencil>, iterations: u32, step: f64) -> WglConfig {
    let base = WglConfig::default();
    WglConfig {
        neighborhood: neighborhood.map_or(base.neighborhood, |s| s.0.clone()),
        iterations: iterations as usize,
        step,
        ..base
    }
}

/// Windowed group lasso. A null `neighborhood` selects the default
/// `{(0,0): 1, (0,1): 0.5, (0,2): 0.25}`.
#[no_mangle]
pub unsafe extern "C" fn wth_wgl_denoise(
    grid: *const WthGrid,
    neighborhood: *const WthStencil,
    threshold: f64,
    iterations: u32,
    step: f64,
    out: *mut *mut WthGrid,
) -> WthStatus {
    guard(|| {
        let grid = &handle(grid, "grid")?.0;
        let cfg = wgl_config(neighborhood.as_ref(), iterations, step).with_threshold(threshold);
        put(out, WthGrid(wgl_denoise(grid, &cfg).map_err(status_of)?))
    })
}

/// Searches the WGL threshold leaving `target` nonzeros (within 1%).
#[no_mangle]
pub unsafe extern "C" fn wth_wgl_match_sparsity(
    grid: *const WthGrid,
    neighborhood: *const WthStencil,
    iterations: u32,
    step: f64,
    target: usize,
    out: *mut *mut WthGrid,
    threshold: *mut f64,
) -> WthStatus {
    guard(|| {
        let grid = &handle(grid, "grid")?.0;
        let cfg = wgl_config(neighborhood.as_ref(), iterations, step);
        let (g, t) = wgl_match_sparsity(grid, &cfg, target).map_err(status_of)?;
        put_value(threshold, t)?;
        put(out, WthGrid(g))
    })
}

/// Lorentz quasi-norm of `len` interleaved complex values; pass `q = INFINITY`
/// for the weak-type (supremum) variant.
#[no_mangle]
pub unsafe extern "C" fn wth_lorentz_norm(
    interleaved: *const f64,
    len: usize,
    tau: f64,
    q: f64,
    out: *mut f64,
) -> WthStatus {
    guard(|| {
        let raw = slice(interleaved, 2 * len, "data")?;
        let entries = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let seq = CoefficientSequence::new(entries).map_err(status_of)?;
        let q = if q == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(q)
        };
        let params = LorentzParams::new(tau, q).map_err(status_of)?;
        put_value(out, lorentz_norm(&seq, params))
    })
}

/// Relative error `||reference - reconstruction|| / ||reference||`.
#[no_mangle]
pub unsafe extern "C" fn wth_rms(
    reference: *const f64,
    reconstruction: *const f64,
    len: usize,
    out: *mut f64,
) -> WthStatus {
    guard(|| {
        let a = slice(reference, len, "reference")?;
        let b = slice(reconstruction, len, "reconstruction")?;
        put_value(out, rms(a, b).map_err(status_of)?)
    })
}
