//! Convex geometry of polytopes and atomic measures on the sphere.
//!
//! Bodies are stored in both H- and V-representation ([`Polytope`]). Support
//! values are measured from the origin, so translating a body changes its
//! support vector; routines that need the origin strictly inside say so.
//! Only dimensions 2 and 3 are supported.

mod admissible;
mod degeneracy;
mod direction;
mod hull;
mod measure;
mod ops;
mod polytope;
pub mod sampling;
mod wulff;

pub use admissible::{
    check_measure_conditions, check_measure_conditions_with_tol, discretize_measure,
    perturb_antipodal, MeasureConditions, ANTIPODAL_TOL, SPAN_TOL,
};
pub use degeneracy::{detect_degenerate, DegeneracyReport, DEFAULT_SLAB_FACTOR};
pub use direction::Direction;
pub use measure::{Atom, SphericalMeasure, MERGE_TOL};
pub use ops::{
    gauss_map_measure, hausdorff_distance, minkowski_sum, radial_function, support_function,
    volume, volume_by_radial_quadrature,
};
pub use polytope::{Facet, Halfspace, Polytope};
pub use wulff::{wulff_shape, SupportVector};

use nalgebra::DVector;

/// A point of R^n.
pub type Point = DVector<f64>;

pub(crate) fn check_dim(dim: usize) -> crate::Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(crate::Error::UnsupportedDimension(dim))
    }
}
