//! Hermite flux-continuous finite elements for 2D convection-diffusion
//! `-div K grad u + w . grad u = f`, with RT0 mixed baselines.
//!
//! Four methods are provided: the Hermite Petrov-Galerkin methods `hA` (trial
//! `U_h`, test `V_h`) and `hB` (trial `W_h`, test `U_h`), and the mixed
//! methods `A` (non-divergence form) and `B` (divergence form).
//!
//! ```
//! use hermite_cd::{builtin_problem, run_case, Method, SourceMode};
//!
//! let problem = builtin_problem(1, 1.0, SourceMode::FixedF).unwrap();
//! let report = run_case(&problem, Method::HA, 8, 6, 10).unwrap();
//! assert!(report.e_u < 1e-3);
//! ```

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod hermite;
pub mod mesh;
pub mod mixed;
pub mod problem;
pub mod sparse;

pub use analysis::{convergence_rates, error_norms, h_norm, infsup_estimate, ErrorReport, InfSupForm, RateTable};
pub use assembly::{
    apply_flux_bc, assemble, assemble_method_ha, assemble_method_hb, reconstruct, solve, solve_problem,
    AssemblyOptions, DiscreteSolution, FirstTermVelocity, LinearSystem, Method, SolutionField,
};
pub use error::{Error, Result};
pub use geometry::{quadrature_rule, QuadratureRule, TriangleGeometry};
pub use harness::{run_case, run_sweep, CaseResult, SweepConfig, SweepResult};
pub use hermite::{
    dof_map, interpolate_velocity, local_basis, recover_local, DiffusionTensor, DiscreteVelocity, DofMap,
    LocalQuadratic, Space, VelocityMode,
};
pub use mesh::{build_quarter_disk_mesh, build_square_mesh, DomainId, EdgeMarker, Mesh};
pub use mixed::{assemble_method_a, assemble_method_b, rt0_basis, MixedSolution, Rt0Local};
pub use problem::{builtin_problem, ProblemSpec, SourceMode};
