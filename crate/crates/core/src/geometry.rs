//! Per-triangle geometry and symmetric quadrature on triangles and segments.

use nalgebra::{Matrix2, Point2, Vector2};

use crate::error::{Error, Result};

/// Geometric data of one triangle. Local face `i` is opposite local vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleGeometry {
    pub vertices: [Point2<f64>; 3],
    pub area: f64,
    pub centroid: Point2<f64>,
    pub face_lengths: [f64; 3],
    /// Outward unit normals.
    pub normals: [Vector2<f64>; 3],
    /// Distance from vertex `i` to the line of face `i`.
    pub heights: [f64; 3],
    /// `n_T,i . n_F` for the global normal of each face; all `+1` for a free-standing triangle.
    pub signs: [f64; 3],
    /// Mean of `x x^t` over the triangle.
    pub second_moment: Matrix2<f64>,
}

impl TriangleGeometry {
    pub fn new(vertices: [Point2<f64>; 3]) -> Result<Self> {
        let [p0, p1, p2] = vertices;
        let area = 0.5 * (p1 - p0).perp(&(p2 - p0));
        if !(area > 0.0) {
            return Err(Error::DegenerateElement { index: 0, area });
        }
        let sum = p0.coords + p1.coords + p2.coords;
        let centroid = Point2::from(sum / 3.0);
        let mut face_lengths = [0.0; 3];
        let mut normals = [Vector2::zeros(); 3];
        let mut heights = [0.0; 3];
        for i in 0..3 {
            let t = vertices[(i + 2) % 3] - vertices[(i + 1) % 3];
            let len = t.norm();
            face_lengths[i] = len;
            normals[i] = Vector2::new(t.y, -t.x) / len;
            heights[i] = 2.0 * area / len;
        }
        let outer: Matrix2<f64> = vertices.iter().map(|p| p.coords * p.coords.transpose()).sum();
        let second_moment = (outer + sum * sum.transpose()) / 12.0;
        Ok(TriangleGeometry {
            vertices,
            area,
            centroid,
            face_lengths,
            normals,
            heights,
            signs: [1.0; 3],
            second_moment,
        })
    }

    /// Longest edge.
    pub fn diameter(&self) -> f64 {
        self.face_lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn from_barycentric(&self, l: [f64; 3]) -> Point2<f64> {
        Point2::from(
            self.vertices[0].coords * l[0] + self.vertices[1].coords * l[1] + self.vertices[2].coords * l[2],
        )
    }

    /// Endpoints of face `i`, counterclockwise.
    pub fn face(&self, i: usize) -> (Point2<f64>, Point2<f64>) {
        (self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3])
    }

    pub fn face_midpoint(&self, i: usize) -> Point2<f64> {
        let (a, b) = self.face(i);
        nalgebra::center(&a, &b)
    }
}

/// Symmetric rule on the reference triangle: barycentric points, weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    degree: u32,
}

fn orbit3(a: f64) -> [[f64; 3]; 3] {
    let c = 1.0 - 2.0 * a;
    [[a, a, c], [a, c, a], [c, a, a]]
}

fn orbit6(a: f64, b: f64) -> [[f64; 3]; 6] {
    let c = 1.0 - a - b;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

impl QuadratureRule {
    fn from_orbits(degree: u32, centroid: Option<f64>, s3: &[(f64, f64)], s6: &[(f64, f64, f64)]) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if let Some(w) = centroid {
            points.push([1.0 / 3.0; 3]);
            weights.push(w);
        }
        for &(w, a) in s3 {
            points.extend(orbit3(a));
            weights.extend([w; 3]);
        }
        for &(w, a, b) in s6 {
            points.extend(orbit6(a, b));
            weights.extend([w; 6]);
        }
        QuadratureRule { points, weights, degree }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn barycentric_points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical points of `geom` paired with weights already scaled by the area.
    pub fn physical<'a>(&'a self, geom: &'a TriangleGeometry) -> impl Iterator<Item = (Point2<f64>, f64)> + 'a {
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(l, w)| (geom.from_barycentric(*l), w * geom.area))
    }

    pub fn integrate<F: Fn(Point2<f64>) -> f64>(&self, geom: &TriangleGeometry, f: F) -> f64 {
        self.physical(geom).map(|(x, w)| w * f(x)).sum()
    }

    pub fn integrate_vector<F: Fn(Point2<f64>) -> Vector2<f64>>(&self, geom: &TriangleGeometry, f: F) -> Vector2<f64> {
        self.physical(geom).map(|(x, w)| f(x) * w).sum()
    }
}

/// Smallest tabulated symmetric rule exact to at least `degree`.
pub fn quadrature_rule(degree: u32) -> Result<QuadratureRule> {
    Ok(match degree {
        1 | 2 => QuadratureRule::from_orbits(2, None, &[(1.0 / 3.0, 0.16666666666666666)], &[]),
        3 | 4 => QuadratureRule::from_orbits(
            4,
            None,
            &[(0.22338158967801136, 0.44594849091596483), (0.10995174365532195, 0.091576213509770771)],
            &[],
        ),
        5 | 6 => QuadratureRule::from_orbits(
            6,
            None,
            &[(0.11678627572639044, 0.24928674517090332), (0.050844906370208588, 0.063089014491503378)],
            &[(0.082851075618367173, 0.053145049844812886, 0.31035245103378928)],
        ),
        7..=10 => QuadratureRule::from_orbits(
            10,
            Some(0.090817990384378183),
            &[(0.036725957756003166, 0.48557763338400534), (0.045321059435359315, 0.10948157548462915)],
            &[
                (0.072757916845924933, 0.14170721941362052, 0.30793983876414227),
                (0.028327242530698838, 0.025003534762259076, 0.24667256063895163),
                (0.0094216669636319559, 0.0095408154003262542, 0.066803251011741088),
            ],
        ),
        other => return Err(Error::UnsupportedQuadrature(other)),
    })
}

/// Integrates `f` over the triangle with `rule`.
pub fn integrate<F: Fn(Point2<f64>) -> f64>(geom: &TriangleGeometry, f: F, rule: &QuadratureRule) -> f64 {
    rule.integrate(geom, f)
}

/// Mean of `f` over the segment `[a, b]` by two-point Gauss-Legendre (exact to degree 3).
pub fn segment_mean<T, F>(a: Point2<f64>, b: Point2<f64>, f: F) -> T
where
    F: Fn(Point2<f64>) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let s = 0.5 / 3f64.sqrt();
    let p = nalgebra::center(&a, &b);
    let d = b - a;
    (f(p - d * s) + f(p + d * s)) * 0.5
}
