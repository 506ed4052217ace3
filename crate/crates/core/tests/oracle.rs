mod common;

use common::*;
use hermite_cd::{
    assemble, builtin_problem, build_square_mesh, AssemblyOptions, DiffusionTensor, DomainId, FirstTermVelocity,
    Method, ProblemSpec, SourceMode,
};
use nalgebra::{DMatrix, Matrix2, Vector2};

fn library(method: Method, problem: &ProblemSpec, l: usize, first_term: FirstTermVelocity) -> (DMatrix<f64>, Vec<f64>) {
    let mesh = problem.mesh(l).unwrap();
    let opts = AssemblyOptions { first_term, ..AssemblyOptions::default() };
    let s = assemble(method, &mesh, problem, &opts).unwrap();
    (s.matrix.to_dense(), s.rhs)
}

fn oracle(method: Method, problem: &ProblemSpec, l: usize, exact_first: bool) -> (DMatrix<f64>, Vec<f64>) {
    let mesh = problem.mesh(l).unwrap();
    match method {
        Method::HA => dense_ha(&mesh, problem, exact_first),
        Method::HB => dense_hb(&mesh, problem),
        Method::A => dense_mixed(&mesh, problem, false),
        Method::B => dense_mixed(&mesh, problem, true),
    }
}

fn compare(method: Method, problem: &ProblemSpec, l: usize, tol: f64) {
    let (a, b) = library(method, problem, l, FirstTermVelocity::VertexP1);
    let (ao, bo) = oracle(method, problem, l, false);
    let da = max_abs_diff(&a, &ao);
    let db = b.iter().zip(&bo).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(da < tol, "{method} matrix differs by {da:e}");
    assert!(db < tol, "{method} rhs differs by {db:e}");
}

#[test]
fn poisson_l2_matches_dense_oracle() {
    let p = ProblemSpec::new(DomainId::UnitSquare, DiffusionTensor::identity()).with_source(|_| 1.0);
    for m in Method::ALL {
        compare(m, &p, 2, 1e-10);
    }
}

#[test]
fn square_problem_l2_matches_dense_oracle() {
    let p = builtin_problem(1, 1.0, SourceMode::FixedF).unwrap();
    for m in Method::ALL {
        compare(m, &p, 2, 1e-10);
    }
}

#[test]
fn disk_problem_matches_dense_oracle() {
    let p = builtin_problem(2, 3.0, SourceMode::RegenF).unwrap();
    for m in Method::ALL {
        compare(m, &p, 2, 1e-10);
    }
}

#[test]
fn anisotropic_diffusion_matches_dense_oracle() {
    let k = DiffusionTensor::new(Matrix2::new(2.0, 0.3, 0.3, 0.5)).unwrap();
    let p = ProblemSpec::new(DomainId::UnitSquare, k)
        .with_velocity(|x| Vector2::new(1.0 + x.y, -0.5 * x.x * x.x), |_| 0.0)
        .with_source(|x| x.x * x.y + 1.0);
    for m in Method::ALL {
        compare(m, &p, 3, 1e-10);
    }
}

#[test]
fn exact_first_term_matches_dense_oracle() {
    let p = builtin_problem(1, 5.0, SourceMode::FixedF).unwrap();
    let (a, _) = library(Method::HA, &p, 2, FirstTermVelocity::Exact);
    let (ao, _) = oracle(Method::HA, &p, 2, true);
    assert!(max_abs_diff(&a, &ao) < 1e-10);
    // and the two first-term choices really differ for a quadratic velocity
    let (ap, _) = library(Method::HA, &p, 2, FirstTermVelocity::VertexP1);
    assert!(max_abs_diff(&a, &ap) > 1e-6);
}

#[test]
fn oracle_quadrature_is_exact_for_monomials() {
    let mesh = build_square_mesh(1).unwrap();
    let el = &elements(&mesh)[0];
    // triangle (0,0),(1,0),(1,1): int x^p y^q = 1 / ((q+1)(p+q+2))
    for p in 0..6 {
        for q in 0..6 {
            let exact = 1.0 / ((q + 1) as f64 * (p + q + 2) as f64);
            let got = tri_integral(&el.v, |x| x.x.powi(p) * x.y.powi(q));
            assert!((got - exact).abs() < 1e-14, "x^{p} y^{q}");
        }
    }
}
