//! Arbitrary-order finite volume element schemes for 1D two-point boundary
//! value problems, with scheme design, superconvergence analysis and
//! convergence studies.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod mmd;
pub mod refelem;
pub mod scheme;

pub use assembly::{
    assemble, fve_solve, scalar_fn, BandedSystem, BvpProblem, ExactSolution, FveSolution, ScalarFn,
    SolveOptions, TrialNodes, TrialSpace,
};
pub use error::{FveError, Result};
pub use mesh::{dual_mesh, uniform_mesh, DualMesh, PrimaryMesh};
pub use mmd::{build_superclose, mmd_shape_coefficients, SuperclosePoly};
pub use scheme::{
    check_orthogonality, design_method_i, design_method_ii, function_value_points,
    max_orthogonality_order, preset, SchemeSpec,
};
