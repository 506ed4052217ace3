//! Brute-force reference implementations for the integration tests. Nothing here
//! calls into the library's basis, quadrature or assembly code; local bases come
//! from inverting the DOF functionals numerically and every integral uses a
//! collapsed tensor Gauss-Legendre rule.
#![allow(dead_code)]

use hermite_cd::{EdgeMarker, Mesh, ProblemSpec};
use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Point2, Vector2, Vector3, Vector4};

/// Gauss-Legendre nodes and weights mapped to [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            ((1.0 + x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

pub fn area(v: &[Point2<f64>; 3]) -> f64 {
    0.5 * (v[1] - v[0]).perp(&(v[2] - v[0]))
}

/// Integral over a triangle, Duffy map with 8x8 points (exact to degree 15).
pub fn tri_integral<F: Fn(Point2<f64>) -> f64>(v: &[Point2<f64>; 3], f: F) -> f64 {
    let g = gauss_legendre(8);
    let mut s = 0.0;
    for &(u, wu) in &g {
        for &(t, wt) in &g {
            let (l1, l2) = (u, t * (1.0 - u));
            let x = v[0] + (v[1] - v[0]) * l1 + (v[2] - v[0]) * l2;
            s += wu * wt * (1.0 - u) * f(x);
        }
    }
    s * 2.0 * area(v)
}

pub fn tri_integral_vec<F: Fn(Point2<f64>) -> Vector2<f64>>(v: &[Point2<f64>; 3], f: F) -> Vector2<f64> {
    Vector2::new(tri_integral(v, |x| f(x).x), tri_integral(v, |x| f(x).y))
}

pub fn seg_mean<F: Fn(Point2<f64>) -> f64>(a: Point2<f64>, b: Point2<f64>, f: F) -> f64 {
    gauss_legendre(6).iter().map(|&(t, w)| w * f(a + (b - a) * t)).sum()
}

/// `v(x) = x^t K^-1 (a x / 2 + b) + d`, coefficients `(a, b1, b2, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad(pub Vector4<f64>);

impl Quad {
    pub fn flux(&self, x: Point2<f64>) -> Vector2<f64> {
        x.coords * self.0[0] + Vector2::new(self.0[1], self.0[2])
    }
    pub fn value(&self, kinv: &Matrix2<f64>, x: Point2<f64>) -> f64 {
        x.coords.dot(&(kinv * (x.coords * (self.0[0] / 2.0) + Vector2::new(self.0[1], self.0[2])))) + self.0[3]
    }
    pub fn grad(&self, kinv: &Matrix2<f64>, x: Point2<f64>) -> Vector2<f64> {
        kinv * self.flux(x)
    }
    pub fn div_k_grad(&self) -> f64 {
        2.0 * self.0[0]
    }
}

/// One triangle as seen by the oracle, faces ordered like `Mesh::triangle_edges`.
#[derive(Debug, Clone)]
pub struct Element {
    pub v: [Point2<f64>; 3],
    pub area: f64,
    pub centroid: Point2<f64>,
    pub edges: [usize; 3],
    pub ends: [(Point2<f64>, Point2<f64>); 3],
    pub outward: [Vector2<f64>; 3],
    /// `n_outward . n_F`.
    pub sign: [f64; 3],
}

pub fn elements(mesh: &Mesh) -> Vec<Element> {
    (0..mesh.num_triangles())
        .map(|t| {
            let v = mesh.triangle_vertices(t);
            let centroid = Point2::from((v[0].coords + v[1].coords + v[2].coords) / 3.0);
            let edges = mesh.triangle_edges(t);
            let mut ends = [(Point2::origin(), Point2::origin()); 3];
            let mut outward = [Vector2::zeros(); 3];
            let mut sign = [0.0; 3];
            for i in 0..3 {
                let rec = &mesh.edges()[edges[i]];
                let (a, b) = (mesh.vertices()[rec.vertices[0]], mesh.vertices()[rec.vertices[1]]);
                let t_ab = b - a;
                let mut n = Vector2::new(-t_ab.y, t_ab.x).normalize();
                if n.dot(&(nalgebra::center(&a, &b) - centroid)) < 0.0 {
                    n = -n;
                }
                ends[i] = (a, b);
                outward[i] = n;
                sign[i] = n.dot(&rec.normal).signum();
            }
            Element { v, area: area(&v), centroid, edges, ends, outward, sign }
        })
        .collect()
}

/// DOF functionals of the three Hermite spaces.
#[derive(Clone, Copy)]
pub enum Functionals<'a> {
    U,
    /// Constant velocity added to the flux.
    V(Vector2<f64>),
    /// Velocity subtracted from the flux.
    W(&'a dyn Fn(Point2<f64>) -> Vector2<f64>),
}

pub fn mean(el: &Element, kinv: &Matrix2<f64>, q: &Quad) -> f64 {
    tri_integral(&el.v, |x| q.value(kinv, x)) / el.area
}

pub fn functionals(el: &Element, kinv: &Matrix2<f64>, kind: Functionals, q: &Quad) -> Vector4<f64> {
    let m = mean(el, kinv, q);
    let mut out = Vector4::zeros();
    for i in 0..3 {
        let (a, b) = el.ends[i];
        let n = el.outward[i];
        out[i] = seg_mean(a, b, |x| {
            let f = q.flux(x);
            match kind {
                Functionals::U => f.dot(&n),
                Functionals::V(w) => (f + w * m).dot(&n),
                Functionals::W(w) => (f - w(x) * m).dot(&n),
            }
        });
    }
    out[3] = m;
    out
}

/// Basis dual to the functionals, by inverting the 4x4 functional matrix.
pub fn dual_basis(el: &Element, kinv: &Matrix2<f64>, kind: Functionals) -> [Quad; 4] {
    let mut d = Matrix4::zeros();
    for m in 0..4 {
        d.set_column(m, &functionals(el, kinv, kind, &Quad(Vector4::ith(m, 1.0))));
    }
    let inv = d.try_inverse().expect("functional matrix invertible");
    std::array::from_fn(|j| Quad(inv.column(j).into()))
}

/// RT0 field `c x + e` from outward edge-mean normal components, by a 3x3 solve.
pub fn rt0_from_means(el: &Element, means: [f64; 3]) -> (f64, Vector2<f64>) {
    let mut m = Matrix3::zeros();
    for i in 0..3 {
        let (a, b) = el.ends[i];
        let mid = nalgebra::center(&a, &b);
        let n = el.outward[i];
        m.set_row(i, &Vector3::new(mid.coords.dot(&n), n.x, n.y).transpose());
    }
    let s = m.try_inverse().unwrap() * Vector3::from(means);
    (s[0], Vector2::new(s[1], s[2]))
}

pub fn rt0_interpolant(el: &Element, w: &dyn Fn(Point2<f64>) -> Vector2<f64>) -> (f64, Vector2<f64>) {
    let means = std::array::from_fn(|i| {
        let (a, b) = el.ends[i];
        seg_mean(a, b, |x| w(x).dot(&el.outward[i]))
    });
    rt0_from_means(el, means)
}

/// Linear interpolation of vertex values through barycentric coordinates.
pub fn p1_interpolant(el: &Element, w: &dyn Fn(Point2<f64>) -> Vector2<f64>) -> impl Fn(Point2<f64>) -> Vector2<f64> {
    let v = el.v;
    let vals = v.map(|p| w(p));
    let a = area(&v);
    move |x| {
        let l1 = area(&[v[0], x, v[2]]) / a;
        let l2 = area(&[v[0], v[1], x]) / a;
        vals[0] * (1.0 - l1 - l2) + vals[1] * l1 + vals[2] * l2
    }
}

fn global(mesh: &Mesh, el: &Element, t: usize) -> ([usize; 4], [f64; 4]) {
    let ne = mesh.num_edges();
    (
        [el.edges[0], el.edges[1], el.edges[2], ne + t],
        [el.sign[0], el.sign[1], el.sign[2], 1.0],
    )
}

/// Dense hA system over all DOFs. `exact_first` puts `w` instead of its P1
/// interpolant into the convective first term.
pub fn dense_ha(mesh: &Mesh, problem: &ProblemSpec, exact_first: bool) -> (DMatrix<f64>, Vec<f64>) {
    let n = mesh.num_edges() + mesh.num_triangles();
    let kinv = *problem.diffusion.inverse();
    let k = *problem.diffusion.matrix();
    let w = |x: Point2<f64>| (problem.velocity)(x);
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (t, el) in elements(mesh).iter().enumerate() {
        let wh = w(el.centroid);
        let w1 = p1_interpolant(el, &w);
        let trial = dual_basis(el, &kinv, Functionals::U);
        let test = dual_basis(el, &kinv, Functionals::V(wh));
        let f_int = tri_integral(&el.v, |x| (problem.source)(x));
        let (g, s) = global(mesh, el, t);
        for i in 0..4 {
            let v = &test[i];
            let mv = mean(el, &kinv, v);
            for j in 0..4 {
                let u = &trial[j];
                let conv = tri_integral(&el.v, |x| {
                    let wx = if exact_first { w(x) } else { w1(x) };
                    wx.dot(&u.grad(&kinv, x))
                });
                let first = mv * (u.div_k_grad() * el.area - conv);
                let second = tri_integral(&el.v, |x| u.grad(&kinv, x).dot(&(k * v.grad(&kinv, x) + wh * mv)));
                let third = tri_integral(&el.v, |x| u.value(&kinv, x) * v.div_k_grad());
                a[(g[i], g[j])] += s[i] * s[j] * (first + second + third);
            }
            rhs[g[i]] -= s[i] * mv * f_int;
        }
    }
    (a, rhs)
}

/// Dense hB system over all DOFs.
pub fn dense_hb(mesh: &Mesh, problem: &ProblemSpec) -> (DMatrix<f64>, Vec<f64>) {
    let n = mesh.num_edges() + mesh.num_triangles();
    let kinv = *problem.diffusion.inverse();
    let k = *problem.diffusion.matrix();
    let w = |x: Point2<f64>| (problem.velocity)(x);
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (t, el) in elements(mesh).iter().enumerate() {
        let (c, e) = rt0_interpolant(el, &w);
        let wt = move |x: Point2<f64>| x.coords * c + e;
        let trial = dual_basis(el, &kinv, Functionals::W(&wt));
        let test = dual_basis(el, &kinv, Functionals::U);
        let f_int = tri_integral(&el.v, |x| (problem.source)(x));
        let (g, s) = global(mesh, el, t);
        for i in 0..4 {
            let v = &test[i];
            for j in 0..4 {
                let u = &trial[j];
                let first = tri_integral(&el.v, |x| u.div_k_grad() * v.value(&kinv, x));
                let second = tri_integral(&el.v, |x| u.grad(&kinv, x).dot(&(k * v.grad(&kinv, x))));
                let third = tri_integral(&el.v, |x| u.value(&kinv, x) * v.div_k_grad());
                a[(g[i], g[j])] += s[i] * s[j] * (first + second + third);
            }
            rhs[g[i]] -= s[i] * mean(el, &kinv, v) * f_int;
        }
    }
    (a, rhs)
}

/// Dense RT0 x P0 system; `divergence_form` selects method B over method A.
pub fn dense_mixed(mesh: &Mesh, problem: &ProblemSpec, divergence_form: bool) -> (DMatrix<f64>, Vec<f64>) {
    let n = mesh.num_edges() + mesh.num_triangles();
    let kinv = *problem.diffusion.inverse();
    let w = |x: Point2<f64>| (problem.velocity)(x);
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for (t, el) in elements(mesh).iter().enumerate() {
        let q: [(f64, Vector2<f64>); 3] = std::array::from_fn(|j| {
            let mut m = [0.0; 3];
            m[j] = 1.0;
            rt0_from_means(el, m)
        });
        let at = |j: usize, x: Point2<f64>| x.coords * q[j].0 + q[j].1;
        let (g, s) = global(mesh, el, t);
        let mut loc = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                loc[i][j] = tri_integral(&el.v, |x| (kinv * at(j, x)).dot(&at(i, x)));
            }
            let div = tri_integral(&el.v, |_| 2.0 * q[i].0);
            if divergence_form {
                loc[i][3] = -div - tri_integral(&el.v, |x| (kinv * w(x)).dot(&at(i, x)));
                loc[3][i] = div;
            } else {
                loc[i][3] = -div;
                loc[3][i] = div - tri_integral(&el.v, |x| w(x).dot(&(kinv * at(i, x))));
            }
        }
        if divergence_form {
            loc[3][3] = -tri_integral(&el.v, |x| (problem.velocity_div)(x));
        }
        for i in 0..4 {
            for j in 0..4 {
                a[(g[i], g[j])] += s[i] * s[j] * loc[i][j];
            }
        }
        rhs[g[3]] += tri_integral(&el.v, |x| (problem.source)(x));
    }
    (a, rhs)
}

/// Full indices of Dirichlet boundary edges.
pub fn dirichlet_edges(mesh: &Mesh) -> Vec<usize> {
    mesh.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.marker == EdgeMarker::DirichletZero)
        .map(|(i, _)| i)
        .collect()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
