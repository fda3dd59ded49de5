//! C ABI for `fracmfg`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_solve` functions and released by the matching `*_free`. Every fallible
//! call returns an [`FmfgStatus`]; on failure the message is kept per thread
//! and can be read with [`fmfg_last_error`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use fracmfg::fpsolver::{solve_fp, FpOptions};
use fracmfg::fracops::{
    build_stencil, mittag_leffler, Direction, FractionalOrder, FractionalStencil, MittagLefflerParams, StencilKind,
};
use fracmfg::grid::{Field, SpaceGrid, TimeGrid};
use fracmfg::hjbsolver::{solve_hjb, HamiltonianSpec, HjbOptions, TerminalCost};
use fracmfg::mfg::{desk_problem, solve_mfg, MfgProblem, MfgSolution};
use fracmfg::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmfgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    NumericalFailure = 4,
    Negativity = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmfgStencilKind {
    RlDerivative = 0,
    RlIntegral = 1,
    CaputoDerivative = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmfgDirection {
    Forward = 0,
    Backward = 1,
}

/// Uniform grids: `[0, horizon]` with `n_steps` steps and the periodic
/// interval `[x_min, x_max)` with `n_cells` cells.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FmfgGrids {
    pub horizon: f64,
    pub n_steps: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
}

/// Opaque fractional stencil.
pub struct FmfgStencil(FractionalStencil);

/// Opaque time-by-space field, row-major `(n_time, n_cells)`.
pub struct FmfgField(Field);

/// Opaque MFG problem.
pub struct FmfgMfgProblem(MfgProblem);

/// Opaque MFG solution.
pub struct FmfgMfgSolution(MfgSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FmfgStatus {
    match e {
        Error::InvalidParameter { .. } | Error::Config(_) => FmfgStatus::InvalidArgument,
        Error::ShapeMismatch { .. } | Error::MassMismatch(_) => FmfgStatus::ShapeMismatch,
        Error::Negativity { .. } => FmfgStatus::Negativity,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Format(_) => FmfgStatus::Io,
        _ => FmfgStatus::NumericalFailure,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (FmfgStatus, String)>) -> FmfgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmfgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FmfgStatus::Panic
        }
    }
}

fn lift<T>(r: fracmfg::Result<T>) -> Result<T, (FmfgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (FmfgStatus, String) {
    (FmfgStatus::NullPointer, format!("`{name}` is null"))
}

/// Borrow `len` values from C; an empty slice may come with a null pointer.
unsafe fn input<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], (FmfgStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, name: &str) -> Result<&'a mut [f64], (FmfgStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn grids(g: &FmfgGrids) -> Result<(TimeGrid, SpaceGrid), (FmfgStatus, String)> {
    Ok((lift(TimeGrid::new(g.horizon, g.n_steps))?, lift(SpaceGrid::new(g.x_min, g.x_max, g.n_cells))?))
}

fn give<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn fmfg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (nul-terminated,
/// truncated to `len`). Returns the full message length, or 0 if none.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn fmfg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// `E_{alpha,gamma}(z)` for real `z`.
///
/// # Safety
/// `out` must be a valid pointer to one `double`.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mittag_leffler(alpha: f64, gamma: f64, z: f64, out: *mut f64) -> FmfgStatus {
    guard(|| {
        let out = output(out, 1, "out")?;
        out[0] = lift(mittag_leffler(MittagLefflerParams::new(alpha, gamma, z)))?;
        Ok(())
    })
}

/// Build a stencil of order in `(0, 1]` on `n_nodes` nodes spaced `dt`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn fmfg_stencil_new(
    order: f64,
    kind: FmfgStencilKind,
    direction: FmfgDirection,
    n_nodes: usize,
    dt: f64,
    out: *mut *mut FmfgStencil,
) -> FmfgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            FmfgStencilKind::RlDerivative => StencilKind::RlDerivative,
            FmfgStencilKind::RlIntegral => StencilKind::RlIntegral,
            FmfgStencilKind::CaputoDerivative => StencilKind::CaputoDerivative,
        };
        let direction = match direction {
            FmfgDirection::Forward => Direction::Forward,
            FmfgDirection::Backward => Direction::Backward,
        };
        let order = lift(FractionalOrder::new(order))?;
        give(out, FmfgStencil(lift(build_stencil(order, kind, direction, n_nodes, dt))?));
        Ok(())
    })
}

/// Apply a stencil to `n` samples, writing `n` values to `out`.
///
/// # Safety
/// `samples` and `out` must hold `n` doubles; `stencil` must come from
/// [`fmfg_stencil_new`].
#[no_mangle]
pub unsafe extern "C" fn fmfg_stencil_apply(
    stencil: *const FmfgStencil,
    samples: *const f64,
    n: usize,
    out: *mut f64,
) -> FmfgStatus {
    guard(|| {
        let s = stencil.as_ref().ok_or_else(|| null("stencil"))?;
        let input = input(samples, n, "samples")?;
        let result = lift(s.0.apply(input))?;
        output(out, n, "out")?.copy_from_slice(&result);
        Ok(())
    })
}

/// # Safety
/// `stencil` must come from [`fmfg_stencil_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_stencil_free(stencil: *mut FmfgStencil) {
    if !stencil.is_null() {
        drop(Box::from_raw(stencil));
    }
}

/// Number of time nodes of a field.
///
/// # Safety
/// `field` must be a live field handle or null (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn fmfg_field_n_time(field: *const FmfgField) -> usize {
    field.as_ref().map_or(0, |f| f.0.n_time())
}

/// Number of cells of a field.
///
/// # Safety
/// `field` must be a live field handle or null (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn fmfg_field_n_cells(field: *const FmfgField) -> usize {
    field.as_ref().map_or(0, |f| f.0.n_cells())
}

/// Copy all values (row-major, `n_time * n_cells`) into `out`.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fmfg_field_copy(field: *const FmfgField, out: *mut f64, len: usize) -> FmfgStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        if len != f.0.values.len() {
            return Err((FmfgStatus::ShapeMismatch, format!("buffer holds {len}, field has {}", f.0.values.len())));
        }
        output(out, len, "out")?.copy_from_slice(&f.0.values);
        Ok(())
    })
}

/// # Safety
/// `field` must be a field handle and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_field_free(field: *mut FmfgField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Fractional Fokker-Planck solve. `m0` has `n_cells` values, `drift` has
/// `(n_steps + 1) * n_cells` (row-major by time).
///
/// # Safety
/// Buffers must have the stated lengths; `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn fmfg_fp_solve(
    grids_in: FmfgGrids,
    beta: f64,
    nu: f64,
    m0: *const f64,
    drift: *const f64,
    out: *mut *mut FmfgField,
) -> FmfgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (time, space) = grids(&grids_in)?;
        let m0 = input(m0, space.n_cells(), "m0")?;
        let drift = input(drift, time.n_nodes() * space.n_cells(), "drift")?;
        let drift = lift(Field::from_values(time, space, drift.to_vec()))?;
        let beta = lift(FractionalOrder::new(beta))?;
        let sol = lift(solve_fp(m0, &drift, nu, beta, FpOptions::default()))?;
        give(out, FmfgField(sol.m));
        Ok(())
    })
}

/// Fractional HJB solve with the truncated quadratic Hamiltonian. `g` has
/// `n_cells` values, `source` `(n_steps + 1) * n_cells`. The value function
/// is returned in `value_out`, the feedback drift in `drift_out` (either may
/// be null if not wanted).
///
/// # Safety
/// Buffers must have the stated lengths; non-null slots must be writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_hjb_solve(
    grids_in: FmfgGrids,
    beta: f64,
    nu: f64,
    u_max: f64,
    g: *const f64,
    source: *const f64,
    value_out: *mut *mut FmfgField,
    drift_out: *mut *mut FmfgField,
) -> FmfgStatus {
    guard(|| {
        let (time, space) = grids(&grids_in)?;
        let g = lift(TerminalCost::new(space, input(g, space.n_cells(), "g")?.to_vec()))?;
        let source = input(source, time.n_nodes() * space.n_cells(), "source")?;
        let source = lift(Field::from_values(time, space, source.to_vec()))?;
        let beta = lift(FractionalOrder::new(beta))?;
        let ham = lift(HamiltonianSpec::truncated_quadratic(u_max))?;
        let v = lift(solve_hjb(&g, &source, nu, beta, &ham, &HjbOptions::default()))?;
        if !value_out.is_null() {
            give(value_out, FmfgField(v.v));
        }
        if !drift_out.is_null() {
            give(drift_out, FmfgField(v.drift));
        }
        Ok(())
    })
}

/// The reference MFG problem on `n_cells` cells and `n_steps` steps
/// (beta 0.7, nu 0.05, kappa 0.5 on [-2, 2), T = 1).
///
/// # Safety
/// `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_problem_desk(n_cells: usize, n_steps: usize, out: *mut *mut FmfgMfgProblem) -> FmfgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        give(out, FmfgMfgProblem(lift(desk_problem(n_cells, n_steps))?));
        Ok(())
    })
}

/// Set the order `beta` in `(0, 1]`.
///
/// # Safety
/// `problem` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_problem_set_beta(problem: *mut FmfgMfgProblem, beta: f64) -> FmfgStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        p.0.beta = lift(FractionalOrder::new(beta))?;
        Ok(())
    })
}

/// Set coupling strength, damping, tolerance and iteration cap together.
///
/// # Safety
/// `problem` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_problem_set_iteration(
    problem: *mut FmfgMfgProblem,
    kappa: f64,
    damping: f64,
    tolerance: f64,
    max_iters: usize,
) -> FmfgStatus {
    guard(|| {
        let p = problem.as_mut().ok_or_else(|| null("problem"))?;
        let mut next = p.0.clone();
        next.coupling.kappa = kappa;
        next.damping = damping;
        next.tolerance = tolerance;
        next.max_iters = max_iters;
        lift(next.validate())?;
        p.0 = next;
        Ok(())
    })
}

/// # Safety
/// `problem` must be a problem handle and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_problem_free(problem: *mut FmfgMfgProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Run the damped Picard iteration. A run that stops at the iteration cap
/// still returns `Ok`; query [`fmfg_mfg_solution_converged`].
///
/// # Safety
/// `problem` must be live; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solve(problem: *const FmfgMfgProblem, out: *mut *mut FmfgMfgSolution) -> FmfgStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        give(out, FmfgMfgSolution(lift(solve_mfg(&p.0))?));
        Ok(())
    })
}

/// 1 if converged, 0 if not (or null).
///
/// # Safety
/// `solution` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solution_converged(solution: *const FmfgMfgSolution) -> i32 {
    solution.as_ref().map_or(0, |s| i32::from(s.0.converged))
}

/// Number of Picard iterations performed.
///
/// # Safety
/// `solution` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solution_iterations(solution: *const FmfgMfgSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.trace.len())
}

/// Fixed-point gap of iteration `iter` (1-based), NaN if out of range.
///
/// # Safety
/// `solution` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solution_gap(solution: *const FmfgMfgSolution, iter: usize) -> f64 {
    solution.as_ref().and_then(|s| iter.checked_sub(1).and_then(|i| s.0.trace.get(i))).map_or(f64::NAN, |r| r.gap)
}

/// New field handles holding the density and the value function.
///
/// # Safety
/// `solution` must be live; non-null slots must be writable.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solution_fields(
    solution: *const FmfgMfgSolution,
    density_out: *mut *mut FmfgField,
    value_out: *mut *mut FmfgField,
) -> FmfgStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        if !density_out.is_null() {
            give(density_out, FmfgField(s.0.m.clone()));
        }
        if !value_out.is_null() {
            give(value_out, FmfgField(s.0.value.v.clone()));
        }
        Ok(())
    })
}

/// # Safety
/// `solution` must be a solution handle and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fmfg_mfg_solution_free(solution: *mut FmfgMfgSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
