//! Local Hermite bases of the spaces `U_h`, `V_h`, `W_h`, velocity interpolants and
//! the global DOF map.
//!
//! Every discrete function restricted to a triangle has the form
//! `v(x) = x^t K^-1 (a x / 2 + b) + d`, so its flux `K grad v = a x + b` is a
//! lowest-order Raviart-Thomas field. Each triangle carries three edge DOFs
//! (mean normal fluxes, possibly including a convective part) and one cell DOF
//! (the mean value).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{segment_mean, TriangleGeometry};
use crate::mesh::{EdgeMarker, Mesh};

/// Constant symmetric positive-definite diffusion tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionTensor {
    matrix: Matrix2<f64>,
    inverse: Matrix2<f64>,
    lambda_min: f64,
    lambda_max: f64,
}

impl DiffusionTensor {
    pub fn new(matrix: Matrix2<f64>) -> Result<Self> {
        let scale = matrix.amax();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidDiffusion("tensor must be finite and nonzero".into()));
        }
        if (matrix[(0, 1)] - matrix[(1, 0)]).abs() > 1e-14 * scale {
            return Err(Error::InvalidDiffusion("tensor is not symmetric".into()));
        }
        let eig = matrix.symmetric_eigenvalues();
        let (lambda_min, lambda_max) = (eig.min(), eig.max());
        if !(lambda_min > 0.0) {
            return Err(Error::InvalidDiffusion(format!("smallest eigenvalue {lambda_min} is not positive")));
        }
        let inverse = matrix
            .try_inverse()
            .ok_or_else(|| Error::InvalidDiffusion("tensor is singular".into()))?;
        Ok(DiffusionTensor { matrix, inverse, lambda_min, lambda_max })
    }

    pub fn identity() -> Self {
        DiffusionTensor {
            matrix: Matrix2::identity(),
            inverse: Matrix2::identity(),
            lambda_min: 1.0,
            lambda_max: 1.0,
        }
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix2<f64> {
        &self.inverse
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

/// `v(x) = x^t K^-1 (a x / 2 + b) + d` on one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalQuadratic {
    pub a: f64,
    pub b: Vector2<f64>,
    pub d: f64,
}

/// Pointwise evaluation of a [`LocalQuadratic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vector2<f64>,
    pub div_k_grad: f64,
}

impl LocalQuadratic {
    pub const ZERO: LocalQuadratic = LocalQuadratic { a: 0.0, b: Vector2::new(0.0, 0.0), d: 0.0 };

    pub fn new(a: f64, b: Vector2<f64>, d: f64) -> Self {
        LocalQuadratic { a, b, d }
    }

    pub fn constant(d: f64) -> Self {
        LocalQuadratic { d, ..Self::ZERO }
    }

    pub fn value(&self, k: &DiffusionTensor, x: Point2<f64>) -> f64 {
        x.coords.dot(&(k.inverse() * (x.coords * (0.5 * self.a) + self.b))) + self.d
    }

    pub fn gradient(&self, k: &DiffusionTensor, x: Point2<f64>) -> Vector2<f64> {
        k.inverse() * self.flux(x)
    }

    /// `K grad v = a x + b`.
    pub fn flux(&self, x: Point2<f64>) -> Vector2<f64> {
        x.coords * self.a + self.b
    }

    /// `div K grad v = 2 a`, constant.
    pub fn div_k_grad(&self) -> f64 {
        2.0 * self.a
    }

    pub fn evaluate(&self, k: &DiffusionTensor, x: Point2<f64>) -> Evaluation {
        Evaluation {
            value: self.value(k, x),
            gradient: self.gradient(k, x),
            div_k_grad: self.div_k_grad(),
        }
    }

    /// Exact mean over the triangle.
    pub fn mean(&self, k: &DiffusionTensor, geom: &TriangleGeometry) -> f64 {
        let kinv = k.inverse();
        0.5 * self.a * (kinv * geom.second_moment).trace() + geom.centroid.coords.dot(&(kinv * self.b)) + self.d
    }

    /// Normal component of the flux on face `i` (constant along the face).
    pub fn normal_flux(&self, geom: &TriangleGeometry, i: usize) -> f64 {
        self.flux(geom.face_midpoint(i)).dot(&geom.normals[i])
    }
}

impl Add for LocalQuadratic {
    type Output = LocalQuadratic;
    fn add(self, o: Self) -> Self {
        LocalQuadratic { a: self.a + o.a, b: self.b + o.b, d: self.d + o.d }
    }
}

impl Sub for LocalQuadratic {
    type Output = LocalQuadratic;
    fn sub(self, o: Self) -> Self {
        LocalQuadratic { a: self.a - o.a, b: self.b - o.b, d: self.d - o.d }
    }
}

impl Neg for LocalQuadratic {
    type Output = LocalQuadratic;
    fn neg(self) -> Self {
        LocalQuadratic { a: -self.a, b: -self.b, d: -self.d }
    }
}

impl Mul<f64> for LocalQuadratic {
    type Output = LocalQuadratic;
    fn mul(self, s: f64) -> Self {
        LocalQuadratic { a: self.a * s, b: self.b * s, d: self.d * s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VelocityMode {
    /// Constant per element, value at the centroid (`w_h`).
    CentroidP0,
    /// Continuous piecewise linear through vertex values (`w^1_h`).
    VertexP1,
    /// Lowest-order Raviart-Thomas interpolant from edge means of `w . n_F`.
    Rt0,
}

impl VelocityMode {
    fn name(self) -> &'static str {
        match self {
            VelocityMode::CentroidP0 => "centroid_P0",
            VelocityMode::VertexP1 => "vertex_P1",
            VelocityMode::Rt0 => "RT0",
        }
    }
}

/// Restriction of a discrete velocity to one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementVelocity {
    Constant(Vector2<f64>),
    /// Values at the three local vertices.
    Linear([Vector2<f64>; 3]),
    /// `a x + b`.
    Rt0 { a: f64, b: Vector2<f64> },
}

impl ElementVelocity {
    pub fn at(&self, geom: &TriangleGeometry, x: Point2<f64>) -> Vector2<f64> {
        match *self {
            ElementVelocity::Constant(w) => w,
            ElementVelocity::Linear(values) => (0..3)
                .map(|i| {
                    let (p, _) = geom.face(i);
                    values[i] * ((p - x).dot(&geom.normals[i]) / geom.heights[i])
                })
                .sum(),
            ElementVelocity::Rt0 { a, b } => x.coords * a + b,
        }
    }

    pub fn mode(&self) -> VelocityMode {
        match self {
            ElementVelocity::Constant(_) => VelocityMode::CentroidP0,
            ElementVelocity::Linear(_) => VelocityMode::VertexP1,
            ElementVelocity::Rt0 { .. } => VelocityMode::Rt0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteVelocity {
    mode: VelocityMode,
    elements: Vec<ElementVelocity>,
}

impl DiscreteVelocity {
    pub fn mode(&self) -> VelocityMode {
        self.mode
    }

    pub fn element(&self, t: usize) -> &ElementVelocity {
        &self.elements[t]
    }

    pub fn elements(&self) -> &[ElementVelocity] {
        &self.elements
    }
}

/// Interpolates `w` onto `mesh` in the requested mode.
pub fn interpolate_velocity<W>(w: W, mesh: &Mesh, mode: VelocityMode) -> DiscreteVelocity
where
    W: Fn(Point2<f64>) -> Vector2<f64>,
{
    let elements = match mode {
        VelocityMode::CentroidP0 => (0..mesh.num_triangles())
            .map(|t| ElementVelocity::Constant(w(mesh.geometry(t).centroid)))
            .collect(),
        VelocityMode::VertexP1 => {
            let at_vertex: Vec<Vector2<f64>> = mesh.vertices().iter().map(|&p| w(p)).collect();
            mesh.triangles()
                .iter()
                .map(|tri| ElementVelocity::Linear(tri.map(|v| at_vertex[v])))
                .collect()
        }
        VelocityMode::Rt0 => {
            let edge_means: Vec<f64> = mesh
                .edges()
                .iter()
                .map(|e| {
                    let [i, j] = e.vertices;
                    segment_mean(mesh.vertices()[i], mesh.vertices()[j], |x| w(x).dot(&e.normal))
                })
                .collect();
            (0..mesh.num_triangles())
                .map(|t| {
                    let geom = mesh.geometry(t);
                    let edges = mesh.triangle_edges(t);
                    let (mut a, mut b) = (0.0, Vector2::zeros());
                    for i in 0..3 {
                        let q = geom.signs[i] * edge_means[edges[i]] / geom.heights[i];
                        a += q;
                        b -= geom.vertices[i].coords * q;
                    }
                    ElementVelocity::Rt0 { a, b }
                })
                .collect()
        }
    };
    DiscreteVelocity { mode, elements }
}

/// The three Hermite spaces. `U` carries pure diffusive fluxes, `V` adds the
/// convective part `w_h Pi_T v`, `W` subtracts the convective part built from
/// the RT0 velocity interpolant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    U,
    V,
    W,
}

impl Space {
    fn required_mode(self) -> Option<VelocityMode> {
        match self {
            Space::U => None,
            Space::V => Some(VelocityMode::CentroidP0),
            Space::W => Some(VelocityMode::Rt0),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::U => "U",
            Space::V => "V",
            Space::W => "W",
        })
    }
}

fn space_name(space: Space) -> &'static str {
    match space {
        Space::U => "U",
        Space::V => "V",
        Space::W => "W",
    }
}

fn check_velocity(space: Space, velocity: Option<&ElementVelocity>) -> Result<()> {
    match (space.required_mode(), velocity) {
        (None, _) => Ok(()),
        (Some(mode), Some(v)) if v.mode() == mode => Ok(()),
        (Some(_), found) => Err(Error::VelocityMismatch {
            space: space_name(space),
            found: found.map_or("none", |v| v.mode().name()),
        }),
    }
}

/// The three edge basis functions shared by all spaces: flux `(x - x_i) / h_i`
/// with unit outward normal flux on face `i` and zero mean.
fn edge_basis(geom: &TriangleGeometry, k: &DiffusionTensor) -> [LocalQuadratic; 3] {
    std::array::from_fn(|i| {
        let a = 1.0 / geom.heights[i];
        let b = -geom.vertices[i].coords * a;
        let v = LocalQuadratic::new(a, b, 0.0);
        LocalQuadratic { d: -v.mean(k, geom), ..v }
    })
}

/// Local basis `[B_1, B_2, B_3, B_4]` dual to the space's outward edge functionals
/// and the cell mean.
pub fn local_basis(
    geom: &TriangleGeometry,
    k: &DiffusionTensor,
    space: Space,
    velocity: Option<&ElementVelocity>,
) -> Result<[LocalQuadratic; 4]> {
    check_velocity(space, velocity)?;
    let [b1, b2, b3] = edge_basis(geom, k);
    let cell = match (space, velocity) {
        (Space::V, Some(&ElementVelocity::Constant(wh))) => {
            // [x_T - x]^t K^-1 w_h + 1
            LocalQuadratic::new(0.0, -wh, geom.centroid.coords.dot(&(k.inverse() * wh)) + 1.0)
        }
        (Space::W, Some(&ElementVelocity::Rt0 { a, b })) => {
            let v = LocalQuadratic::new(a, b, 0.0);
            LocalQuadratic { d: 1.0 - v.mean(k, geom), ..v }
        }
        _ => LocalQuadratic::constant(1.0),
    };
    Ok([b1, b2, b3, cell])
}

/// Outward edge functional of `space` on face `i`, evaluated exactly.
pub fn edge_functional(
    space: Space,
    v: &LocalQuadratic,
    geom: &TriangleGeometry,
    k: &DiffusionTensor,
    velocity: Option<&ElementVelocity>,
    i: usize,
) -> f64 {
    let diffusive = v.normal_flux(geom, i);
    match (space, velocity) {
        (Space::U, _) | (_, None) => diffusive,
        (Space::V, Some(w)) => {
            diffusive + w.at(geom, geom.face_midpoint(i)).dot(&geom.normals[i]) * v.mean(k, geom)
        }
        (Space::W, Some(w)) => {
            diffusive - w.at(geom, geom.face_midpoint(i)).dot(&geom.normals[i]) * v.mean(k, geom)
        }
    }
}

/// Outward local DOFs `[edge_1, edge_2, edge_3, mean]`.
pub fn local_dofs(
    space: Space,
    v: &LocalQuadratic,
    geom: &TriangleGeometry,
    k: &DiffusionTensor,
    velocity: Option<&ElementVelocity>,
) -> [f64; 4] {
    [
        edge_functional(space, v, geom, k, velocity, 0),
        edge_functional(space, v, geom, k, velocity, 1),
        edge_functional(space, v, geom, k, velocity, 2),
        v.mean(k, geom),
    ]
}

/// Rebuilds the local function from globally oriented edge DOFs and the cell mean.
pub fn recover_local(
    geom: &TriangleGeometry,
    k: &DiffusionTensor,
    space: Space,
    velocity: Option<&ElementVelocity>,
    edge_dofs: [f64; 3],
    cell_mean: f64,
) -> Result<LocalQuadratic> {
    let basis = local_basis(geom, k, space, velocity)?;
    Ok((0..3).fold(basis[3] * cell_mean, |acc, i| acc + basis[i] * (geom.signs[i] * edge_dofs[i])))
}

/// Global numbering: one DOF per edge (mesh order), then one per triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    num_edges: usize,
    num_cells: usize,
    constrained: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let constrained = mesh
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.marker == EdgeMarker::FluxZero)
            .map(|(k, _)| k)
            .collect();
        DofMap { num_edges: mesh.num_edges(), num_cells: mesh.num_triangles(), constrained }
    }

    pub fn len(&self) -> usize {
        self.num_edges + self.num_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn edge_dof(&self, edge: usize) -> usize {
        edge
    }

    pub fn cell_dof(&self, t: usize) -> usize {
        self.num_edges + t
    }

    /// Edge DOFs carrying an essential zero-flux constraint.
    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    /// `[edge_1, edge_2, edge_3, cell]` for triangle `t`.
    pub fn element_dofs(&self, mesh: &Mesh, t: usize) -> [usize; 4] {
        let e = mesh.triangle_edges(t);
        [self.edge_dof(e[0]), self.edge_dof(e[1]), self.edge_dof(e[2]), self.cell_dof(t)]
    }
}

/// Creates the dof map of `mesh`.
pub fn dof_map(mesh: &Mesh) -> DofMap {
    DofMap::new(mesh)
}

/// Extracts global DOFs from an element-wise field. Edge DOFs are read from the
/// first adjacent triangle in the global orientation.
pub fn extract_dofs(
    mesh: &Mesh,
    k: &DiffusionTensor,
    space: Space,
    velocity: Option<&DiscreteVelocity>,
    fields: &[LocalQuadratic],
) -> Vec<f64> {
    let map = DofMap::new(mesh);
    let mut dofs = vec![0.0; map.len()];
    let mut seen = vec![false; map.num_edges()];
    for (t, v) in fields.iter().enumerate() {
        let geom = mesh.geometry(t);
        let local = local_dofs(space, v, &geom, k, velocity.map(|w| w.element(t)));
        let edges = mesh.triangle_edges(t);
        for i in 0..3 {
            if !seen[edges[i]] {
                seen[edges[i]] = true;
                dofs[map.edge_dof(edges[i])] = geom.signs[i] * local[i];
            }
        }
        dofs[map.cell_dof(t)] = local[3];
    }
    dofs
}
