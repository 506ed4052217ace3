use thiserror::Error;

/// Errors produced while building meshes, assembling or solving discrete problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle {index}: signed area {area:e}")]
    DegenerateElement { index: usize, area: f64 },

    #[error("non-manifold edge ({0}, {1}) shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("unsupported quadrature degree {0} (supported: 1..=10)")]
    UnsupportedQuadrature(u32),

    #[error("invalid diffusion tensor: {0}")]
    InvalidDiffusion(String),

    #[error("velocity mode {found} does not match space {space}")]
    VelocityMismatch { space: &'static str, found: &'static str },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sparse factorization failed: singular pivot at column {pivot}")]
    SingularMatrix { pivot: usize },

    #[error("solver residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("Gram matrix is not positive definite")]
    GramNotPositiveDefinite,

    #[error("inf-sup estimate limited to {limit} DOFs, system has {dofs}")]
    TooLarge { dofs: usize, limit: usize },

    #[error("unknown test problem {0} (expected 1 or 2)")]
    UnknownProblem(u32),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("case {context} failed: {source}")]
    Case {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed mesh dump: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
