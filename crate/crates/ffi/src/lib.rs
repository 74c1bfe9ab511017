//! C ABI over the spiralgram engine.
//!
//! Objects cross the boundary as opaque handles created by `sg_*_new` style
//! constructors and released with the matching `sg_*_free`. Every fallible
//! call returns an [`SgStatus`]; on failure a message is kept per thread and
//! can be read with [`sg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use spiralgram::{
    classify_spiral, f_invariants, grid_classify, iterate, orbit::sample_in_square, reconstruct, reconstruct_conditioned,
    spiral_window_check, t3_coords_forward, t3_coords_inverse, t_k_forward, t_k_inverse, CornerInvariants, Direction, Error,
    GridSquare, HomogeneousPoint, Interval, MapLabeling, OrbitTrajectory, ProjectiveTransform, SpiralType, TwistedPolygon,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// The coordinate map hit a vanishing denominator.
    Singular = 3,
    NotKNice = 4,
    Degenerate = 5,
    NonAffine = 6,
    BufferTooSmall = 7,
    OutOfRange = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgInterval {
    I = 0,
    J = 1,
    K = 2,
    Boundary = 3,
    Mixed = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgSpiralType {
    None = 0,
    Alpha = 1,
    Beta = 2,
}

/// Corner invariants of a twisted polygon.
pub struct SgInvariants(CornerInvariants<f64>);

/// A twisted polygon: one period of vertices plus the monodromy.
pub struct SgPolygon(TwistedPolygon<f64>);

/// An orbit of the coordinate map.
pub struct SgTrajectory(OrbitTrajectory<f64>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SgStatus {
    match err {
        Error::SingularOrbitPoint { .. } => SgStatus::Singular,
        Error::NotKNice { .. } => SgStatus::NotKNice,
        Error::NonAffineVertex { .. } => SgStatus::NonAffine,
        Error::InvalidInput(_) => SgStatus::InvalidInput,
        _ => SgStatus::Degenerate,
    }
}

fn fail(status: SgStatus, msg: impl Into<String>) -> SgStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, recording errors and turning panics into [`SgStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), SgStatus>) -> SgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(SgStatus::Panic, "panic inside spiralgram"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, SgStatus>;
}

impl<T> OrStatus<T> for spiralgram::Result<T> {
    fn or_status(self) -> Result<T, SgStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, SgStatus> {
    p.as_ref().ok_or_else(|| fail(SgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], SgStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(SgStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, cap: usize, what: &str) -> Result<&'a mut [f64], SgStatus> {
    if p.is_null() {
        return Err(fail(SgStatus::NullPointer, format!("{what} is null")));
    }
    if cap < len {
        return Err(fail(SgStatus::BufferTooSmall, format!("{what} holds {cap} values, need {len}")));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), SgStatus> {
    if out.is_null() {
        return Err(fail(SgStatus::NullPointer, "output handle pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn interval(i: Interval) -> SgInterval {
    match i {
        Interval::I => SgInterval::I,
        Interval::J => SgInterval::J,
        Interval::K => SgInterval::K,
        Interval::Boundary => SgInterval::Boundary,
        Interval::Mixed => SgInterval::Mixed,
    }
}

fn spiral_type(t: SpiralType) -> SgSpiralType {
    match t {
        SpiralType::Alpha => SgSpiralType::Alpha,
        SpiralType::Beta => SgSpiralType::Beta,
        SpiralType::None => SgSpiralType::None,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next `sg_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds corner invariants from `len` values `x0, x1, ...`; `len` must be even and at least 4.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_new(values: *const f64, len: usize, out: *mut *mut SgInvariants) -> SgStatus {
    guard(|| {
        let v = input(values, len, "values")?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(fail(SgStatus::InvalidInput, "values must be finite"));
        }
        let x = CornerInvariants::from_values(v.to_vec()).or_status()?;
        put(out, SgInvariants(x))
    })
}

/// Draws corner invariants of `n` vertices in a square named by two letters (`"KJ"`, `"IJ"`, ...).
///
/// # Safety
/// `square` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_sample(square: *const c_char, n: usize, seed: u64, out: *mut *mut SgInvariants) -> SgStatus {
    guard(|| {
        if square.is_null() {
            return Err(fail(SgStatus::NullPointer, "square is null"));
        }
        let name = CStr::from_ptr(square).to_str().map_err(|_| fail(SgStatus::InvalidInput, "square is not UTF-8"))?;
        let sq: GridSquare = name.parse().or_status()?;
        put(out, SgInvariants(sample_in_square(sq, n, seed).or_status()?))
    })
}

/// # Safety
/// `inv` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_free(inv: *mut SgInvariants) {
    if !inv.is_null() {
        drop(Box::from_raw(inv));
    }
}

/// Number of entries (twice the number of vertices), or 0 for NULL.
///
/// # Safety
/// `inv` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_len(inv: *const SgInvariants) -> usize {
    inv.as_ref().map_or(0, |i| i.0.len())
}

/// Copies the entries into `out`, which holds `cap` doubles.
///
/// # Safety
/// `inv` must be a live handle and `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_values(inv: *const SgInvariants, out: *mut f64, cap: usize) -> SgStatus {
    guard(|| {
        let x = &handle(inv, "invariants")?.0;
        let dst = output(out, x.len(), cap, "out")?;
        for (d, v) in dst.iter_mut().zip(x.entries()) {
            *d = v.to_f64();
        }
        Ok(())
    })
}

/// Writes `F1..F4` into `out[0..4]`. Infinite quantities are `INFINITY`, undefined ones `NAN`.
///
/// # Safety
/// `inv` must be a live handle and `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_conserved(inv: *const SgInvariants, out: *mut f64) -> SgStatus {
    guard(|| {
        let q = f_invariants(&handle(inv, "invariants")?.0).to_f64();
        output(out, 4, 4, "out")?.copy_from_slice(&q);
        Ok(())
    })
}

/// Interval occupied by the even and by the odd entries.
///
/// # Safety
/// `inv` must be a live handle; `even` and `odd` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_grid(inv: *const SgInvariants, even: *mut SgInterval, odd: *mut SgInterval) -> SgStatus {
    guard(|| {
        let sq = grid_classify(&handle(inv, "invariants")?.0);
        if even.is_null() || odd.is_null() {
            return Err(fail(SgStatus::NullPointer, "interval output is null"));
        }
        *even = interval(sq.even);
        *odd = interval(sq.odd);
        Ok(())
    })
}

/// One step of the coordinate map (`inverse = false`) or its inverse.
///
/// # Safety
/// `inv` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_t3_step(inv: *const SgInvariants, inverse: bool, out: *mut *mut SgInvariants) -> SgStatus {
    guard(|| {
        let x = &handle(inv, "invariants")?.0;
        let y = if inverse { t3_coords_inverse(x) } else { t3_coords_forward(x) }.or_status()?;
        put(out, SgInvariants(y))
    })
}

/// Spiral verdict for invariants over the window `start ..= start + horizon`.
///
/// # Safety
/// `inv` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_invariants_spiral(
    inv: *const SgInvariants,
    k: usize,
    start: i64,
    horizon: usize,
    out: *mut SgSpiralType,
) -> SgStatus {
    guard(|| {
        let r = classify_spiral(&handle(inv, "invariants")?.0, k, start, horizon).or_status()?;
        if out.is_null() {
            return Err(fail(SgStatus::NullPointer, "out is null"));
        }
        *out = spiral_type(r.spiral_type);
        Ok(())
    })
}

/// Builds a polygon from `n` affine vertices `xy = [x0, y0, x1, y1, ...]` and a
/// row-major 3x3 monodromy (NULL means the identity, i.e. a closed polygon).
///
/// # Safety
/// `xy` must point to `2 n` doubles, `monodromy` to 9 doubles or be NULL, and
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_new(xy: *const f64, n: usize, monodromy: *const f64, out: *mut *mut SgPolygon) -> SgStatus {
    guard(|| {
        let v = input(xy, 2 * n, "xy")?;
        let vertices = v.chunks_exact(2).map(|c| HomogeneousPoint::from_affine(c[0], c[1])).collect();
        let m = if monodromy.is_null() {
            ProjectiveTransform::identity()
        } else {
            ProjectiveTransform::from_row_major(slice::from_raw_parts(monodromy, 9)).or_status()?
        };
        put(out, SgPolygon(TwistedPolygon::new(vertices, m).or_status()?))
    })
}

/// Reconstructs a polygon from invariants. With `conditioned` the seed frame is
/// chosen for float accuracy; otherwise the unit square seeds `P0..P3`.
///
/// # Safety
/// `inv` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_reconstruct(inv: *const SgInvariants, conditioned: bool, out: *mut *mut SgPolygon) -> SgStatus {
    guard(|| {
        let x = &handle(inv, "invariants")?.0;
        let p = if conditioned { reconstruct_conditioned(x) } else { reconstruct(x, None) }.or_status()?;
        put(out, SgPolygon(p))
    })
}

/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_free(p: *mut SgPolygon) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of vertices per period, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_n(p: *const SgPolygon) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

/// Homogeneous coordinates of vertex `i` (any integer index) into `out[0..3]`.
///
/// # Safety
/// `p` must be a live handle and `out` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_vertex(p: *const SgPolygon, i: i64, out: *mut f64) -> SgStatus {
    guard(|| {
        let v = handle(p, "polygon")?.0.vertex_at(i);
        output(out, 3, 3, "out")?.copy_from_slice(v.coords());
        Ok(())
    })
}

/// Row-major monodromy into `out[0..9]`.
///
/// # Safety
/// `p` must be a live handle and `out` must point to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_monodromy(p: *const SgPolygon, out: *mut f64) -> SgStatus {
    guard(|| {
        let m = handle(p, "polygon")?.0.monodromy().row_major();
        output(out, 9, 9, "out")?.copy_from_slice(&m);
        Ok(())
    })
}

/// Corner invariants of the polygon.
///
/// # Safety
/// `p` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_invariants(p: *const SgPolygon, out: *mut *mut SgInvariants) -> SgStatus {
    guard(|| {
        let x = handle(p, "polygon")?.0.corner_invariants().or_status()?;
        put(out, SgInvariants(x))
    })
}

/// Image under `T_k` (forward-shift labeling) or, with `inverse`, its preimage.
///
/// # Safety
/// `p` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_tk(p: *const SgPolygon, k: usize, inverse: bool, out: *mut *mut SgPolygon) -> SgStatus {
    guard(|| {
        let p = &handle(p, "polygon")?.0;
        let q = if inverse { t_k_inverse(p, k) } else { t_k_forward(p, k, MapLabeling::ForwardShift) }.or_status()?;
        put(out, SgPolygon(q))
    })
}

/// Spiral verdict for the polygon as given over `start ..= start + horizon`.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sg_polygon_spiral(p: *const SgPolygon, k: usize, start: i64, horizon: usize, out: *mut SgSpiralType) -> SgStatus {
    guard(|| {
        let r = spiral_window_check(&handle(p, "polygon")?.0, k, start, horizon).or_status()?;
        if out.is_null() {
            return Err(fail(SgStatus::NullPointer, "out is null"));
        }
        *out = spiral_type(r.spiral_type);
        Ok(())
    })
}

/// Iterates the coordinate map `steps` times. A singular point ends the orbit
/// early; that is reported by [`sg_trajectory_completed`], not as an error.
///
/// # Safety
/// `inv` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_orbit(inv: *const SgInvariants, steps: usize, backward: bool, out: *mut *mut SgTrajectory) -> SgStatus {
    guard(|| {
        let x = &handle(inv, "invariants")?.0;
        let dir = if backward { Direction::Backward } else { Direction::Forward };
        put(out, SgTrajectory(iterate(x, steps, dir)))
    })
}

/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_trajectory_free(t: *mut SgTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of stored iterates, including the start; 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_trajectory_len(t: *const SgTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.steps.len())
}

/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_trajectory_completed(t: *const SgTrajectory) -> bool {
    t.as_ref().is_some_and(|t| t.0.is_completed())
}

/// Copy of iterate `m`.
///
/// # Safety
/// `t` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn sg_trajectory_step(t: *const SgTrajectory, m: usize, out: *mut *mut SgInvariants) -> SgStatus {
    guard(|| {
        let steps = &handle(t, "trajectory")?.0.steps;
        let x = steps.get(m).ok_or_else(|| fail(SgStatus::OutOfRange, format!("step {m} of {}", steps.len())))?;
        put(out, SgInvariants(x.clone()))
    })
}

/// Largest relative drift of each conserved quantity into `out[0..4]`.
///
/// # Safety
/// `t` must be a live handle and `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sg_trajectory_drift(t: *const SgTrajectory, out: *mut f64) -> SgStatus {
    guard(|| {
        let d = handle(t, "trajectory")?.0.drift().or_status()?;
        output(out, 4, 4, "out")?.copy_from_slice(&d);
        Ok(())
    })
}
