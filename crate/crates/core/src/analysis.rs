//! Error measures, the working h-norm, convergence rates and a dense inf-sup estimate.

use nalgebra::{DMatrix, Point2, Vector2};

use crate::assembly::{apply_flux_bc, assemble_method_ha, AssemblyOptions, DiscreteSolution, FirstTermVelocity, Method, SolutionField};
use crate::error::{Error, Result};
use crate::geometry::{quadrature_rule, TriangleGeometry};
use crate::hermite::{dof_map, interpolate_velocity, local_basis, DiffusionTensor, LocalQuadratic, Space, VelocityMode};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;

/// The four error measures at one mesh size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Largest element diameter.
    pub h: f64,
    /// `||u - u_h||` in L2.
    pub e_u: f64,
    /// Elementwise gradient error in L2.
    pub e_grad: f64,
    /// L2 error of `div K grad u`.
    pub e_divflux: f64,
    /// Largest absolute error over triangle centroids.
    pub e_max: f64,
    pub dofs: usize,
}

/// Pointwise value, gradient and `div K grad` of the discrete solution on triangle `t`.
fn discrete_eval(
    solution: &DiscreteSolution,
    problem: &ProblemSpec,
    t: usize,
    x: Point2<f64>,
) -> (f64, Vector2<f64>, f64) {
    let k = &problem.diffusion;
    match &solution.field {
        SolutionField::Hermite(fields) => {
            let e = fields[t].evaluate(k, x);
            (e.value, e.gradient, e.div_k_grad)
        }
        SolutionField::Mixed(m) => {
            let u = m.cell_values[t];
            let p = m.flux[t].at(x);
            match solution.method {
                Method::B => {
                    // p = -K grad u + w u
                    let w = (problem.velocity)(x);
                    let grad = k.inverse() * (w * u - p);
                    let div = -m.flux[t].divergence() + (problem.velocity_div)(x) * u + w.dot(&grad);
                    (u, grad, div)
                }
                _ => (u, -(k.inverse() * p), -m.flux[t].divergence()),
            }
        }
    }
}

/// Errors against the problem's exact solution, integrated with the rule of `quad_degree`.
pub fn error_norms(mesh: &Mesh, solution: &DiscreteSolution, problem: &ProblemSpec, quad_degree: u32) -> Result<ErrorReport> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::Config("problem has no exact solution".into()))?;
    let rule = quadrature_rule(quad_degree)?;
    let (mut eu, mut eg, mut ed, mut emax) = (0.0, 0.0, 0.0, 0.0f64);
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        for (x, w) in rule.physical(&geom) {
            let (u, g, d) = discrete_eval(solution, problem, t, x);
            eu += w * ((exact.value)(x) - u).powi(2);
            eg += w * ((exact.gradient)(x) - g).norm_squared();
            ed += w * ((exact.div_k_grad)(x) - d).powi(2);
        }
        let (u, _, _) = discrete_eval(solution, problem, t, geom.centroid);
        emax = emax.max(((exact.value)(geom.centroid) - u).abs());
    }
    Ok(ErrorReport {
        h: mesh.h(),
        e_u: eu.sqrt(),
        e_grad: eg.sqrt(),
        e_divflux: ed.sqrt(),
        e_max: emax,
        dofs: solution.dofs.len(),
    })
}

/// `(Pi_h v, Pi_h v) + sum_T (grad v, grad v)_T + (div K grad v, div K grad v)_T`, square-rooted.
pub fn h_norm(mesh: &Mesh, k: &DiffusionTensor, fields: &[LocalQuadratic]) -> f64 {
    let rule = quadrature_rule(2).expect("degree 2 is tabulated");
    fields
        .iter()
        .enumerate()
        .map(|(t, v)| {
            let geom = mesh.geometry(t);
            geom.area * v.mean(k, &geom).powi(2)
                + rule.integrate(&geom, |x| v.gradient(k, x).norm_squared())
                + geom.area * v.div_k_grad().powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Observed orders between consecutive meshes, `log2(e_coarse / e_fine)` per column;
/// `None` where an error vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    /// `[u, grad, divflux, max]` per mesh pair.
    pub rows: Vec<[Option<f64>; 4]>,
}

impl RateTable {
    pub fn last(&self) -> Option<&[Option<f64>; 4]> {
        self.rows.last()
    }
}

fn rate(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).log2())
}

pub fn convergence_rates(reports: &[ErrorReport]) -> Result<RateTable> {
    if reports.len() < 2 {
        return Err(Error::Config("at least two reports are needed for rates".into()));
    }
    let rows = reports
        .windows(2)
        .map(|p| {
            let (c, f) = (&p[0], &p[1]);
            [rate(c.e_u, f.e_u), rate(c.e_grad, f.e_grad), rate(c.e_divflux, f.e_divflux), rate(c.e_max, f.e_max)]
        })
        .collect();
    Ok(RateTable { rows })
}

/// Which bilinear form the inf-sup estimate probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfSupForm {
    /// The discrete form (`w^1_h` in the first term).
    Discrete,
    /// The auxiliary form with the exact velocity.
    Auxiliary,
}

pub const INFSUP_DOF_LIMIT: usize = 2000;

/// Smallest singular value of `L_test^-1 A L_trial^-T` with `M = L L^t` (Cholesky).
pub fn whitened_min_singular_value(a: &DMatrix<f64>, gram_test: &DMatrix<f64>, gram_trial: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n || gram_test.shape() != (n, n) || gram_trial.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let lv = gram_test.clone().cholesky().ok_or(Error::GramNotPositiveDefinite)?.l();
    let lu = gram_trial.clone().cholesky().ok_or(Error::GramNotPositiveDefinite)?.l();
    let left = lv
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::LinearAlgebra("triangular solve failed".into()))?;
    // (L_v^-1 A) L_u^-T = (L_u^-1 (L_v^-1 A)^T)^T
    let whitened = lu
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::LinearAlgebra("triangular solve failed".into()))?
        .transpose();
    let sv = whitened.singular_values();
    Ok(sv.iter().copied().fold(f64::INFINITY, f64::min))
}

fn local_gram(basis: &[LocalQuadratic; 4], k: &DiffusionTensor, geom: &TriangleGeometry) -> [[f64; 4]; 4] {
    let rule = quadrature_rule(2).expect("degree 2 is tabulated");
    let m = basis.map(|b| b.mean(k, geom));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            geom.area * m[i] * m[j]
                + rule.integrate(geom, |x| basis[i].gradient(k, x).dot(&basis[j].gradient(k, x)))
                + geom.area * basis[i].div_k_grad() * basis[j].div_k_grad()
        })
    })
}

/// Discrete inf-sup constant of method hA in the h-norm, trial `U_h`, test `V_h`.
pub fn infsup_estimate(mesh: &Mesh, problem: &ProblemSpec, form: InfSupForm) -> Result<f64> {
    let map = dof_map(mesh);
    let free = map.len() - map.constrained().len();
    if free > INFSUP_DOF_LIMIT {
        return Err(Error::TooLarge { dofs: free, limit: INFSUP_DOF_LIMIT });
    }
    let options = AssemblyOptions {
        first_term: match form {
            InfSupForm::Discrete => FirstTermVelocity::VertexP1,
            InfSupForm::Auxiliary => FirstTermVelocity::Exact,
        },
        ..AssemblyOptions::default()
    };
    let system = apply_flux_bc(assemble_method_ha(mesh, problem, &options)?, &map);
    let k = &problem.diffusion;
    let wh = interpolate_velocity(|x| (problem.velocity)(x), mesh, VelocityMode::CentroidP0);
    let mut gram_u = DMatrix::zeros(map.len(), map.len());
    let mut gram_v = DMatrix::zeros(map.len(), map.len());
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let dofs = map.element_dofs(mesh, t);
        let s = [geom.signs[0], geom.signs[1], geom.signs[2], 1.0];
        let gu = local_gram(&local_basis(&geom, k, Space::U, None)?, k, &geom);
        let gv = local_gram(&local_basis(&geom, k, Space::V, Some(wh.element(t)))?, k, &geom);
        for i in 0..4 {
            for j in 0..4 {
                gram_u[(dofs[i], dofs[j])] += s[i] * s[j] * gu[i][j];
                gram_v[(dofs[i], dofs[j])] += s[i] * s[j] * gv[i][j];
            }
        }
    }
    let keep = &system.dofs;
    let select = |m: &DMatrix<f64>| DMatrix::from_fn(keep.len(), keep.len(), |r, c| m[(keep[r], keep[c])]);
    whitened_min_singular_value(&system.matrix.to_dense(), &select(&gram_v), &select(&gram_u))
}
