//! C ABI over `hermite-cd`.
//!
//! Every entry point returns an [`HcdStatus`]; on failure the message is kept per
//! thread and can be read with [`hcd_last_error`]. Meshes and solutions are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hermite_cd::{
    builtin_problem, error_norms, infsup_estimate, solve_problem, AssemblyOptions, DiscreteSolution, Error,
    ErrorReport, InfSupForm, Mesh, Method, ProblemSpec, SourceMode,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Singular matrix or residual check failed.
    SolverFailure = 3,
    /// Other numerical failure (Gram matrix, non-finite values, size guard).
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcdMethod {
    A = 0,
    HA = 1,
    B = 2,
    HB = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcdSourceMode {
    FixedF = 0,
    RegenF = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HcdErrorReport {
    pub h: f64,
    pub e_u: f64,
    pub e_grad: f64,
    pub e_divflux: f64,
    pub e_max: f64,
    pub dofs: u64,
}

impl From<ErrorReport> for HcdErrorReport {
    fn from(r: ErrorReport) -> Self {
        HcdErrorReport { h: r.h, e_u: r.e_u, e_grad: r.e_grad, e_divflux: r.e_divflux, e_max: r.e_max, dofs: r.dofs as u64 }
    }
}

/// Opaque mesh handle.
pub struct HcdMesh {
    mesh: Mesh,
}

/// Opaque solved case.
pub struct HcdSolution {
    mesh: Mesh,
    problem: ProblemSpec,
    solution: DiscreteSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HcdStatus {
    match e {
        Error::Case { source, .. } => status_of(source),
        Error::SingularMatrix { .. } | Error::Residual { .. } => HcdStatus::SolverFailure,
        Error::LinearAlgebra(_) | Error::GramNotPositiveDefinite | Error::TooLarge { .. } => HcdStatus::Numerical,
        Error::Io(_) => HcdStatus::Io,
        _ => HcdStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), (HcdStatus, String)>>(f: F) -> HcdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcdStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hermite-cd".into());
            HcdStatus::Panic
        }
    }
}

fn lib<T>(r: hermite_cd::Result<T>) -> Result<T, (HcdStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (HcdStatus, String) {
    (HcdStatus::NullPointer, "null pointer argument".into())
}

fn method(m: HcdMethod) -> Method {
    match m {
        HcdMethod::A => Method::A,
        HcdMethod::HA => Method::HA,
        HcdMethod::B => Method::B,
        HcdMethod::HB => Method::HB,
    }
}

fn mode(m: HcdSourceMode) -> SourceMode {
    match m {
        HcdSourceMode::FixedF => SourceMode::FixedF,
        HcdSourceMode::RegenF => SourceMode::RegenF,
    }
}

fn level(l: u32) -> Result<usize, (HcdStatus, String)> {
    if l == 0 {
        Err((HcdStatus::InvalidArgument, "L must be positive".into()))
    } else {
        Ok(l as usize)
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn hcd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the mesh of a built-in problem (1: unit square, 2: quarter disk).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hcd_mesh_new(problem: u32, l: u32, out: *mut *mut HcdMesh) -> HcdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = lib(builtin_problem(problem, 1.0, SourceMode::FixedF))?;
        let mesh = lib(p.mesh(level(l)?))?;
        *out = Box::into_raw(Box::new(HcdMesh { mesh }));
        Ok(())
    })
}

/// # Safety
/// `mesh` must be NULL or a handle from [`hcd_mesh_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hcd_mesh_free(mesh: *mut HcdMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hcd_mesh_counts(
    mesh: *const HcdMesh,
    vertices: *mut u64,
    edges: *mut u64,
    triangles: *mut u64,
) -> HcdStatus {
    guard(|| {
        let (Some(m), false, false, false) = (mesh.as_ref(), vertices.is_null(), edges.is_null(), triangles.is_null())
        else {
            return Err(null());
        };
        *vertices = m.mesh.num_vertices() as u64;
        *edges = m.mesh.num_edges() as u64;
        *triangles = m.mesh.num_triangles() as u64;
        Ok(())
    })
}

/// Copies vertex coordinates as `x0, y0, x1, y1, ...`; `len` is the buffer length
/// in doubles and must be at least twice the vertex count.
///
/// # Safety
/// `mesh` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hcd_mesh_copy_vertices(mesh: *const HcdMesh, buf: *mut f64, len: usize) -> HcdStatus {
    guard(|| {
        let Some(m) = mesh.as_ref() else { return Err(null()) };
        if buf.is_null() {
            return Err(null());
        }
        let need = 2 * m.mesh.num_vertices();
        if len < need {
            return Err((HcdStatus::InvalidArgument, format!("buffer holds {len} values, {need} needed")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (i, p) in m.mesh.vertices().iter().enumerate() {
            out[2 * i] = p.x;
            out[2 * i + 1] = p.y;
        }
        Ok(())
    })
}

/// Runs one case of a built-in problem and writes its error measures.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcd_run_case(
    problem: u32,
    method_id: HcdMethod,
    peclet: f64,
    l: u32,
    source_mode: HcdSourceMode,
    out: *mut HcdErrorReport,
) -> HcdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = lib(builtin_problem(problem, peclet, mode(source_mode)))?;
        let r = lib(hermite_cd::run_case(
            &p,
            method(method_id),
            level(l)?,
            AssemblyOptions::default().quad_degree,
            hermite_cd::harness::ERROR_QUAD_DEGREE,
        ))?;
        *out = r.into();
        Ok(())
    })
}

/// Solves a built-in problem and keeps the solution for inspection.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hcd_solve(
    problem: u32,
    method_id: HcdMethod,
    peclet: f64,
    l: u32,
    source_mode: HcdSourceMode,
    out: *mut *mut HcdSolution,
) -> HcdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = lib(builtin_problem(problem, peclet, mode(source_mode)))?;
        let mesh = lib(p.mesh(level(l)?))?;
        let solution = lib(solve_problem(method(method_id), &mesh, &p, &AssemblyOptions::default()))?;
        *out = Box::into_raw(Box::new(HcdSolution { mesh, problem: p, solution }));
        Ok(())
    })
}

/// # Safety
/// `solution` must be NULL or a handle from [`hcd_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hcd_solution_free(solution: *mut HcdSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Number of DOFs (edges, then triangles).
///
/// # Safety
/// `solution` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hcd_solution_dof_count(solution: *const HcdSolution) -> u64 {
    solution.as_ref().map_or(0, |s| s.solution.dofs.len() as u64)
}

/// # Safety
/// `solution` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hcd_solution_copy_dofs(solution: *const HcdSolution, buf: *mut f64, len: usize) -> HcdStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else { return Err(null()) };
        if buf.is_null() {
            return Err(null());
        }
        let dofs = &s.solution.dofs;
        if len < dofs.len() {
            return Err((HcdStatus::InvalidArgument, format!("buffer holds {len} values, {} needed", dofs.len())));
        }
        std::slice::from_raw_parts_mut(buf, dofs.len()).copy_from_slice(dofs);
        Ok(())
    })
}

/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcd_solution_errors(solution: *const HcdSolution, out: *mut HcdErrorReport) -> HcdStatus {
    guard(|| {
        let Some(s) = solution.as_ref() else { return Err(null()) };
        if out.is_null() {
            return Err(null());
        }
        let r = lib(error_norms(&s.mesh, &s.solution, &s.problem, hermite_cd::harness::ERROR_QUAD_DEGREE))?;
        *out = r.into();
        Ok(())
    })
}

/// Discrete inf-sup estimate of method hA on a built-in problem; `auxiliary`
/// selects the form with the exact velocity in the convective term.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hcd_infsup(problem: u32, peclet: f64, l: u32, auxiliary: bool, out: *mut f64) -> HcdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let p = lib(builtin_problem(problem, peclet, SourceMode::FixedF))?;
        let mesh = lib(p.mesh(level(l)?))?;
        let form = if auxiliary { InfSupForm::Auxiliary } else { InfSupForm::Discrete };
        *out = lib(infsup_estimate(&mesh, &p, form))?;
        Ok(())
    })
}
