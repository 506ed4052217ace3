//! Petrov-Galerkin assembly of the Hermite methods, flux constraints, sparse solve
//! and reconstruction of element-wise solutions.

use std::fmt;
use std::str::FromStr;

use faer::prelude::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::geometry::{quadrature_rule, TriangleGeometry};
use crate::hermite::{
    dof_map, interpolate_velocity, local_basis, recover_local, DiffusionTensor, DiscreteVelocity, DofMap,
    ElementVelocity, LocalQuadratic, Space, VelocityMode,
};
use crate::mesh::Mesh;
use crate::mixed::{self, MixedSolution};
use crate::problem::ProblemSpec;
use crate::sparse::{SparseMatrix, TripletBuilder};

/// The four discretizations: mixed baselines `A`, `B` and their Hermite analogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    A,
    HA,
    B,
    HB,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::A, Method::HA, Method::B, Method::HB];

    pub fn is_hermite(self) -> bool {
        matches!(self, Method::HA | Method::HB)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::A => "A",
            Method::HA => "hA",
            Method::B => "B",
            Method::HB => "hB",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Method::A),
            "hA" => Ok(Method::HA),
            "B" => Ok(Method::B),
            "hB" => Ok(Method::HB),
            other => Err(Error::Config(format!("unknown method `{other}` (expected A, hA, B or hB)"))),
        }
    }
}

/// Velocity used in the `(w . grad u, Pi v)` term of method hA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstTermVelocity {
    /// Continuous piecewise-linear interpolant, the discrete method.
    #[default]
    VertexP1,
    /// The exact field, giving the auxiliary form used for consistency and stability checks.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Exactness degree of the rule used for source and velocity integrals.
    pub quad_degree: u32,
    pub first_term: FirstTermVelocity,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { quad_degree: 6, first_term: FirstTermVelocity::VertexP1 }
    }
}

/// Square sparse system over the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Full index of each row/column of the reduced system.
    pub dofs: Vec<usize>,
    /// Size before constraints were applied.
    pub full_dim: usize,
    /// Full indices fixed to zero.
    pub eliminated: Vec<usize>,
}

impl LinearSystem {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>) -> Self {
        let n = rhs.len();
        LinearSystem { matrix, rhs, dofs: (0..n).collect(), full_dim: n, eliminated: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

/// `int_T grad u . K grad v` for two local quadratics, in closed form.
pub(crate) fn stiffness(u: &LocalQuadratic, v: &LocalQuadratic, k: &DiffusionTensor, geom: &TriangleGeometry) -> f64 {
    let kinv = k.inverse();
    let xc = geom.centroid.coords;
    geom.area
        * (u.a * v.a * (kinv * geom.second_moment).trace()
            + u.a * xc.dot(&(kinv * v.b))
            + v.a * u.b.dot(&(kinv * xc))
            + u.b.dot(&(kinv * v.b)))
}

/// `int_T grad u`.
fn gradient_integral(u: &LocalQuadratic, k: &DiffusionTensor, geom: &TriangleGeometry) -> Vector2<f64> {
    k.inverse() * (geom.centroid.coords * u.a + u.b) * geom.area
}

/// Common element form `(div K grad u - c(u), Pi v) + (grad u, K grad v + w_h Pi v) + (u, div K grad v)`
/// where `c(u)` is the integral of the convective first term.
fn hermite_element_matrix(
    trial: &[LocalQuadratic; 4],
    test: &[LocalQuadratic; 4],
    k: &DiffusionTensor,
    geom: &TriangleGeometry,
    convective: Option<(&dyn Fn(&LocalQuadratic) -> f64, Vector2<f64>)>,
) -> [[f64; 4]; 4] {
    let m_trial = trial.map(|u| u.mean(k, geom));
    let m_test = test.map(|v| v.mean(k, geom));
    let mut a = [[0.0; 4]; 4];
    for (i, v) in test.iter().enumerate() {
        for (j, u) in trial.iter().enumerate() {
            let mut first = u.div_k_grad() * geom.area;
            let mut second = stiffness(u, v, k, geom);
            if let Some((conv, wh)) = &convective {
                first -= conv(u);
                second += m_test[i] * wh.dot(&gradient_integral(u, k, geom));
            }
            a[i][j] = m_test[i] * first + second + v.div_k_grad() * m_trial[j] * geom.area;
        }
    }
    a
}

fn scatter(
    builder: &mut TripletBuilder,
    rhs: &mut [f64],
    dofs: [usize; 4],
    geom: &TriangleGeometry,
    a: &[[f64; 4]; 4],
    b: &[f64; 4],
) {
    let s = [geom.signs[0], geom.signs[1], geom.signs[2], 1.0];
    for i in 0..4 {
        for j in 0..4 {
            builder.push(dofs[i], dofs[j], s[i] * s[j] * a[i][j]);
        }
        rhs[dofs[i]] += s[i] * b[i];
    }
}

fn source_rhs(test: &[LocalQuadratic; 4], k: &DiffusionTensor, geom: &TriangleGeometry, f_int: f64) -> [f64; 4] {
    test.map(|v| -v.mean(k, geom) * f_int)
}

/// Method hA: trial space `U_h`, test space `V_h`.
pub fn assemble_method_ha(mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<LinearSystem> {
    let rule = quadrature_rule(options.quad_degree)?;
    let k = &problem.diffusion;
    let w = &problem.velocity;
    let centroid = interpolate_velocity(|x| w(x), mesh, VelocityMode::CentroidP0);
    let vertex = interpolate_velocity(|x| w(x), mesh, VelocityMode::VertexP1);
    let map = dof_map(mesh);
    let mut builder = TripletBuilder::new(map.len(), map.len());
    let mut rhs = vec![0.0; map.len()];
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let trial = local_basis(&geom, k, Space::U, None)?;
        let wh_el = centroid.element(t);
        let test = local_basis(&geom, k, Space::V, Some(wh_el))?;
        let ElementVelocity::Constant(wh) = *wh_el else { unreachable!() };
        let w1 = vertex.element(t);
        let conv = |u: &LocalQuadratic| -> f64 {
            match options.first_term {
                FirstTermVelocity::VertexP1 => rule.integrate(&geom, |x| w1.at(&geom, x).dot(&u.gradient(k, x))),
                FirstTermVelocity::Exact => rule.integrate(&geom, |x| w(x).dot(&u.gradient(k, x))),
            }
        };
        let a = hermite_element_matrix(&trial, &test, k, &geom, Some((&conv, wh)));
        let f_int = rule.integrate(&geom, |x| (problem.source)(x));
        let b = source_rhs(&test, k, &geom, f_int);
        scatter(&mut builder, &mut rhs, map.element_dofs(mesh, t), &geom, &a, &b);
    }
    Ok(LinearSystem::new(builder.build(), rhs))
}

/// Method hB: trial space `W_h` built on the RT0 velocity interpolant, test space `U_h`.
pub fn assemble_method_hb(mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<LinearSystem> {
    let rule = quadrature_rule(options.quad_degree)?;
    let k = &problem.diffusion;
    let rt0 = interpolate_velocity(|x| (problem.velocity)(x), mesh, VelocityMode::Rt0);
    let map = dof_map(mesh);
    let mut builder = TripletBuilder::new(map.len(), map.len());
    let mut rhs = vec![0.0; map.len()];
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let trial = local_basis(&geom, k, Space::W, Some(rt0.element(t)))?;
        let test = local_basis(&geom, k, Space::U, None)?;
        let a = hermite_element_matrix(&trial, &test, k, &geom, None);
        let f_int = rule.integrate(&geom, |x| (problem.source)(x));
        let b = source_rhs(&test, k, &geom, f_int);
        scatter(&mut builder, &mut rhs, map.element_dofs(mesh, t), &geom, &a, &b);
    }
    Ok(LinearSystem::new(builder.build(), rhs))
}

/// Assembles the system of any method, without constraints.
pub fn assemble(method: Method, mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<LinearSystem> {
    match method {
        Method::A => mixed::assemble_method_a(mesh, problem, options),
        Method::B => mixed::assemble_method_b(mesh, problem, options),
        Method::HA => assemble_method_ha(mesh, problem, options),
        Method::HB => assemble_method_hb(mesh, problem, options),
    }
}

/// Removes the rows and columns of zero-flux edge DOFs.
pub fn apply_flux_bc(system: LinearSystem, map: &DofMap) -> LinearSystem {
    if map.constrained().is_empty() {
        return system;
    }
    let mut fixed = vec![false; system.full_dim];
    for &c in map.constrained() {
        fixed[c] = true;
    }
    // keep positions (in the current system) whose full index is free
    let keep: Vec<usize> = (0..system.dim()).filter(|&r| !fixed[system.dofs[r]]).collect();
    let matrix = system.matrix.select(&keep, &keep);
    let rhs = keep.iter().map(|&r| system.rhs[r]).collect();
    let dofs = keep.iter().map(|&r| system.dofs[r]).collect();
    let mut eliminated = system.eliminated;
    eliminated.extend(map.constrained().iter().copied().filter(|c| system.dofs.contains(c)));
    eliminated.sort_unstable();
    eliminated.dedup();
    LinearSystem { matrix, rhs, dofs, full_dim: system.full_dim, eliminated }
}

const RESIDUAL_TOLERANCE: f64 = 1e-10;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse LU with up to three steps of iterative refinement. Returns the full-length
/// DOF vector (eliminated DOFs set to zero).
pub fn solve(system: &LinearSystem) -> Result<Vec<f64>> {
    let n = system.dim();
    if system.matrix.nrows() != n || system.matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: system.matrix.ncols() });
    }
    let mut full = vec![0.0; system.full_dim];
    if n == 0 {
        return Ok(full);
    }
    let triplets: Vec<Triplet<usize, usize, f64>> =
        system.matrix.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let lu = a.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => Error::SingularMatrix { pivot: index },
        LuError::Generic(g) => Error::LinearAlgebra(format!("{g:?}")),
    })?;
    let b_norm = norm(&system.rhs);
    let rhs = Col::<f64>::from_fn(n, |i| system.rhs[i]);
    let sol = lu.solve(&rhs);
    let mut x: Vec<f64> = (0..n).map(|i| sol[i]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearAlgebra("factorization produced a non-finite solution (numerically singular matrix)".into()));
    }
    let residual_of = |x: &[f64]| -> Vec<f64> {
        let ax = system.matrix.mul_vec(x);
        system.rhs.iter().zip(ax).map(|(b, y)| b - y).collect()
    };
    let mut r = residual_of(&x);
    let scale = if b_norm > 0.0 { b_norm } else { 1.0 };
    for _ in 0..3 {
        if norm(&r) <= RESIDUAL_TOLERANCE * scale * 1e-3 {
            break;
        }
        let rc = Col::<f64>::from_fn(n, |i| r[i]);
        let dx = lu.solve(&rc);
        let candidate: Vec<f64> = (0..n).map(|i| x[i] + dx[i]).collect();
        let rn = residual_of(&candidate);
        if norm(&rn) >= norm(&r) {
            break;
        }
        x = candidate;
        r = rn;
    }
    let rel = norm(&r) / scale;
    if !(rel <= RESIDUAL_TOLERANCE) {
        return Err(Error::Residual { residual: rel, tolerance: RESIDUAL_TOLERANCE });
    }
    for (k, &d) in system.dofs.iter().enumerate() {
        full[d] = x[k];
    }
    Ok(full)
}

/// Element-wise representation of a solved discrete problem.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionField {
    Hermite(Vec<LocalQuadratic>),
    Mixed(MixedSolution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub method: Method,
    pub dofs: Vec<f64>,
    pub field: SolutionField,
    /// Velocity interpolant the trial space was built on (`W_h` only).
    pub velocity: Option<DiscreteVelocity>,
}

/// Rebuilds element-wise functions from a full DOF vector.
pub fn reconstruct(mesh: &Mesh, dofs: &[f64], method: Method, problem: &ProblemSpec) -> Result<DiscreteSolution> {
    let map = dof_map(mesh);
    if dofs.len() != map.len() {
        return Err(Error::DimensionMismatch { expected: map.len(), found: dofs.len() });
    }
    let k = &problem.diffusion;
    let (field, velocity) = match method {
        Method::A | Method::B => (SolutionField::Mixed(MixedSolution::from_dofs(mesh, dofs)), None),
        Method::HA | Method::HB => {
            let (space, velocity) = match method {
                Method::HA => (Space::U, None),
                _ => (Space::W, Some(interpolate_velocity(|x| (problem.velocity)(x), mesh, VelocityMode::Rt0))),
            };
            let mut elements = Vec::with_capacity(mesh.num_triangles());
            for t in 0..mesh.num_triangles() {
                let geom = mesh.geometry(t);
                let d = map.element_dofs(mesh, t);
                elements.push(recover_local(
                    &geom,
                    k,
                    space,
                    velocity.as_ref().map(|v| v.element(t)),
                    [dofs[d[0]], dofs[d[1]], dofs[d[2]]],
                    dofs[d[3]],
                )?);
            }
            (SolutionField::Hermite(elements), velocity)
        }
    };
    Ok(DiscreteSolution { method, dofs: dofs.to_vec(), field, velocity })
}

/// Assemble, constrain, solve and reconstruct.
pub fn solve_problem(
    method: Method,
    mesh: &Mesh,
    problem: &ProblemSpec,
    options: &AssemblyOptions,
) -> Result<DiscreteSolution> {
    let system = apply_flux_bc(assemble(method, mesh, problem, options)?, &dof_map(mesh));
    let dofs = solve(&system)?;
    reconstruct(mesh, &dofs, method, problem)
}
