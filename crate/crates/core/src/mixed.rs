//! Lowest-order Raviart-Thomas mixed baselines: method A (non-divergence form,
//! flux `p = -K grad u`) and method B (divergence form, `p = -K grad u + w u`).

use nalgebra::{Point2, Vector2};

use crate::assembly::{stiffness, AssemblyOptions, LinearSystem};
use crate::error::Result;
use crate::geometry::{quadrature_rule, TriangleGeometry};
use crate::hermite::{dof_map, LocalQuadratic};
use crate::mesh::Mesh;
use crate::problem::ProblemSpec;
use crate::sparse::TripletBuilder;

/// `q(x) = c x + e` on one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rt0Local {
    pub c: f64,
    pub e: Vector2<f64>,
}

impl Rt0Local {
    pub fn at(&self, x: Point2<f64>) -> Vector2<f64> {
        x.coords * self.c + self.e
    }

    pub fn divergence(&self) -> f64 {
        2.0 * self.c
    }

    fn as_quadratic(&self) -> LocalQuadratic {
        LocalQuadratic::new(self.c, self.e, 0.0)
    }
}

/// RT0 basis of the triangle; function `j` has unit mean normal component on
/// face `j` with respect to the global edge normal and zero on the others.
pub fn rt0_basis(geom: &TriangleGeometry) -> [Rt0Local; 3] {
    std::array::from_fn(|j| {
        let c = geom.signs[j] / geom.heights[j];
        Rt0Local { c, e: -geom.vertices[j].coords * c }
    })
}

fn outward_basis(geom: &TriangleGeometry) -> [Rt0Local; 3] {
    std::array::from_fn(|j| {
        let c = 1.0 / geom.heights[j];
        Rt0Local { c, e: -geom.vertices[j].coords * c }
    })
}

/// Flux on each triangle and the piecewise-constant scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedSolution {
    pub flux: Vec<Rt0Local>,
    pub cell_values: Vec<f64>,
}

impl MixedSolution {
    /// Splits a full DOF vector (edge fluxes, then cell values).
    pub fn from_dofs(mesh: &Mesh, dofs: &[f64]) -> Self {
        let map = dof_map(mesh);
        let flux = (0..mesh.num_triangles())
            .map(|t| {
                let geom = mesh.geometry(t);
                let d = map.element_dofs(mesh, t);
                rt0_basis(&geom).iter().enumerate().fold(Rt0Local { c: 0.0, e: Vector2::zeros() }, |acc, (i, q)| {
                    Rt0Local { c: acc.c + q.c * dofs[d[i]], e: acc.e + q.e * dofs[d[i]] }
                })
            })
            .collect();
        let cell_values = (0..mesh.num_triangles()).map(|t| dofs[map.cell_dof(t)]).collect();
        MixedSolution { flux, cell_values }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Form {
    NonDivergence,
    Divergence,
}

fn assemble_mixed(mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions, form: Form) -> Result<LinearSystem> {
    let rule = quadrature_rule(options.quad_degree)?;
    let k = &problem.diffusion;
    let kinv = *k.inverse();
    let w = &problem.velocity;
    let map = dof_map(mesh);
    let mut builder = TripletBuilder::new(map.len(), map.len());
    let mut rhs = vec![0.0; map.len()];
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let q = outward_basis(&geom);
        let mut a = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = stiffness(&q[j].as_quadratic(), &q[i].as_quadratic(), k, &geom);
            }
            let div = q[i].divergence() * geom.area;
            match form {
                Form::NonDivergence => {
                    a[i][3] = -div;
                    a[3][i] = div - rule.integrate(&geom, |x| w(x).dot(&(kinv * q[i].at(x))));
                }
                Form::Divergence => {
                    a[i][3] = -div - rule.integrate(&geom, |x| (kinv * w(x)).dot(&q[i].at(x)));
                    a[3][i] = div;
                }
            }
        }
        if form == Form::Divergence {
            a[3][3] = -rule.integrate(&geom, |x| (problem.velocity_div)(x));
        }
        let dofs = map.element_dofs(mesh, t);
        let s = [geom.signs[0], geom.signs[1], geom.signs[2], 1.0];
        for i in 0..4 {
            for j in 0..4 {
                if a[i][j] != 0.0 {
                    builder.push(dofs[i], dofs[j], s[i] * s[j] * a[i][j]);
                }
            }
        }
        rhs[dofs[3]] += rule.integrate(&geom, |x| (problem.source)(x));
    }
    Ok(LinearSystem::new(builder.build(), rhs))
}

/// Method A: `(K^-1 p, q) - (u, div q) = 0`, `(div p, v) - (w . K^-1 p, v) = (f, v)`.
pub fn assemble_method_a(mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<LinearSystem> {
    assemble_mixed(mesh, problem, options, Form::NonDivergence)
}

/// Method B: `(K^-1 p, q) - (u, div q) - (K^-1 w u, q) = 0`, `(div p, v) - (div w u, v) = (f, v)`.
pub fn assemble_method_b(mesh: &Mesh, problem: &ProblemSpec, options: &AssemblyOptions) -> Result<LinearSystem> {
    assemble_mixed(mesh, problem, options, Form::Divergence)
}
