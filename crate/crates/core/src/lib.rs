//! Discrete Minkowski problem for p-harmonic measures.
//!
//! Given an atomic measure on the unit sphere, find a convex polytope whose
//! boundary p-harmonic measure, pushed to the sphere by the Gauss map,
//! matches it. The crate is split along the pipeline:
//!
//! - [`geom`]: support functions, Wulff shapes, Minkowski sums, Hausdorff
//!   distance, surface measures, admissibility of spherical measures.
//! - [`mesh`]: simplicial meshes of the convex ring between an inner circle
//!   and the outer polygon.
//! - [`fem`]: P1 finite elements for the regularized p-Laplace Dirichlet
//!   problem, solved by damped Picard (Kacanov) iteration.
//! - [`measure`]: atoms of the p-harmonic measure per facet, the functional
//!   `Γ(P) = Σ h_P(ξ_i) a_i`, residuals and weak-convergence probes.
//! - [`solver`]: the variational fixed-point solver, the classical
//!   surface-measure baseline and the discretize-then-solve pipeline.
//! - [`verify`]: numerical checks of the scaling law, the Hadamard-type
//!   first variation and its symmetry.
//!
//! The crate is `no_std` + `alloc` when the default `std` feature is off.
//! File formats and the command line live in the companion `pharmink` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` rejects NaN as well; index loops mirror the mesh layout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod fem;
pub mod geom;
pub mod measure;
pub mod mesh;
pub mod solver;
pub mod verify;

mod linalg;

pub use error::{Error, Result};
pub use fem::{PHarmSolution, SolverConfig};
pub use geom::{
    DegeneracyReport, Direction, MeasureConditions, Polytope, SphericalMeasure, SupportVector,
};
pub use measure::{GammaValue, MeasureAtomMap};
pub use mesh::{BoundaryTag, ConvexRing, MeshOptions, SimplicialMesh};
pub use solver::{SolveConfig, SolveOutcome};
pub use verify::CheckResult;

pub(crate) mod prelude {
    pub use alloc::boxed::Box;
    pub use alloc::format;
    pub use alloc::string::String;
    pub use alloc::sync::Arc;
    pub use alloc::vec;
    pub use alloc::vec::Vec;

    // Float math for `no_std`; with `std` the inherent methods win.
    #[allow(unused_imports)]
    pub use num_traits::Float;
}
