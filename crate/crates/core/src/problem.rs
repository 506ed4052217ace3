//! Problem data: coefficients, source and (optionally) a manufactured exact solution.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};
use crate::hermite::DiffusionTensor;
use crate::mesh::{build_quarter_disk_mesh, build_square_mesh, DomainId, Mesh};

pub type ScalarField = Arc<dyn Fn(Point2<f64>) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point2<f64>) -> Vector2<f64> + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution {
    pub value: ScalarField,
    pub gradient: VectorField,
    /// `div K grad u`.
    pub div_k_grad: ScalarField,
}

/// `-div K grad u + w . grad u = f` on a model domain with homogeneous data.
#[derive(Clone)]
pub struct ProblemSpec {
    pub id: Option<u32>,
    pub domain: DomainId,
    pub diffusion: DiffusionTensor,
    pub peclet: f64,
    pub velocity: VectorField,
    /// Analytic `div w`.
    pub velocity_div: ScalarField,
    pub source: ScalarField,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("diffusion", &self.diffusion)
            .field("peclet", &self.peclet)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Pure diffusion with zero source; customize with the `with_*` methods.
    pub fn new(domain: DomainId, diffusion: DiffusionTensor) -> Self {
        ProblemSpec {
            id: None,
            domain,
            diffusion,
            peclet: 0.0,
            velocity: Arc::new(|_| Vector2::zeros()),
            velocity_div: Arc::new(|_| 0.0),
            source: Arc::new(|_| 0.0),
            exact: None,
        }
    }

    pub fn with_velocity<W, D>(mut self, w: W, div_w: D) -> Self
    where
        W: Fn(Point2<f64>) -> Vector2<f64> + Send + Sync + 'static,
        D: Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
    {
        self.velocity = Arc::new(w);
        self.velocity_div = Arc::new(div_w);
        self
    }

    pub fn with_source<F>(mut self, f: F) -> Self
    where
        F: Fn(Point2<f64>) -> f64 + Send + Sync + 'static,
    {
        self.source = Arc::new(f);
        self
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn mesh(&self, l: usize) -> Result<Mesh> {
        match self.domain {
            DomainId::UnitSquare => build_square_mesh(l),
            DomainId::QuarterDisk => build_quarter_disk_mesh(l),
        }
    }

    /// `-div K grad u + w . grad u` of the exact solution at `x`.
    pub fn manufactured_source(&self, x: Point2<f64>) -> Option<f64> {
        self.exact
            .as_ref()
            .map(|e| -(e.div_k_grad)(x) + (self.velocity)(x).dot(&(e.gradient)(x)))
    }
}

/// How the source of the disk problem depends on the Péclet number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceMode {
    /// `f = 1 - |x|^2 / 2` as printed for the disk problem, whatever the Péclet number.
    #[default]
    FixedF,
    /// `f` regenerated from the exact solution for the given Péclet number.
    RegenF,
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceMode::FixedF => "fixed-f",
            SourceMode::RegenF => "regen-f",
        })
    }
}

impl FromStr for SourceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-f" => Ok(SourceMode::FixedF),
            "regen-f" => Ok(SourceMode::RegenF),
            other => Err(Error::Config(format!("unknown source mode `{other}`"))),
        }
    }
}

/// The two manufactured test problems (`K = I`).
///
/// 1. Unit square, `u = (x1 - x1^2)(x2 - x2^2) / 4`, `w = Pe [x1^2, x2^2] / sqrt 2`.
/// 2. Quarter disk, `u = (1 - |x|^2) / 4`, `w = Pe [x1, x2]`.
pub fn builtin_problem(id: u32, peclet: f64, mode: SourceMode) -> Result<ProblemSpec> {
    if !(peclet >= 0.0 && peclet.is_finite()) {
        return Err(Error::Config(format!("Péclet number must be finite and nonnegative, got {peclet}")));
    }
    let k = DiffusionTensor::identity();
    match id {
        1 => {
            let s = peclet / 2f64.sqrt();
            let exact = ExactSolution {
                value: Arc::new(|x| (x.x - x.x * x.x) * (x.y - x.y * x.y) / 4.0),
                gradient: Arc::new(|x| {
                    Vector2::new(
                        (1.0 - 2.0 * x.x) * (x.y - x.y * x.y) / 4.0,
                        (x.x - x.x * x.x) * (1.0 - 2.0 * x.y) / 4.0,
                    )
                }),
                div_k_grad: Arc::new(|x| -((x.x - x.x * x.x) + (x.y - x.y * x.y)) / 2.0),
            };
            let f = move |x: Point2<f64>| {
                let gx = (1.0 - 2.0 * x.x) * (x.y - x.y * x.y) / 4.0;
                let gy = (x.x - x.x * x.x) * (1.0 - 2.0 * x.y) / 4.0;
                ((x.x - x.x * x.x) + (x.y - x.y * x.y)) / 2.0 + s * (x.x * x.x * gx + x.y * x.y * gy)
            };
            Ok(ProblemSpec {
                id: Some(1),
                peclet,
                ..ProblemSpec::new(DomainId::UnitSquare, k)
                    .with_velocity(move |x| Vector2::new(x.x * x.x, x.y * x.y) * s, move |x| 2.0 * s * (x.x + x.y))
                    .with_source(f)
                    .with_exact(exact)
            })
        }
        2 => {
            let exact = ExactSolution {
                value: Arc::new(|x| (1.0 - x.coords.norm_squared()) / 4.0),
                gradient: Arc::new(|x| -x.coords / 2.0),
                div_k_grad: Arc::new(|_| -1.0),
            };
            let source_peclet = match mode {
                SourceMode::FixedF => 1.0,
                SourceMode::RegenF => peclet,
            };
            Ok(ProblemSpec {
                id: Some(2),
                peclet,
                ..ProblemSpec::new(DomainId::QuarterDisk, k)
                    .with_velocity(move |x| x.coords * peclet, move |_| 2.0 * peclet)
                    .with_source(move |x| 1.0 - source_peclet * x.coords.norm_squared() / 2.0)
                    .with_exact(exact)
            })
        }
        other => Err(Error::UnknownProblem(other)),
    }
}
