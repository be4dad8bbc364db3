use nalgebra::DMatrix;

use super::{Direction, Polytope};
use crate::linalg::sym_eigen;

/// Slab tolerance used by constructors, relative to the diameter.
pub const DEFAULT_SLAB_FACTOR: f64 = 1e-7;

/// Result of the thinness test on a body.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyReport {
    /// Number of principal axes along which the width reaches the slab tolerance.
    pub hausdorff_dim_estimate: usize,
    pub is_slab: bool,
    /// Thin direction when `is_slab`.
    pub slab_normal: Option<Direction>,
    /// Smallest width over the principal axes of the vertex covariance.
    pub thickness: f64,
}

/// Widths of `P` along the principal axes of its vertex cloud.
///
/// A body contained in a hyperplane reports the hyperplane normal as
/// `slab_normal`.
pub fn detect_degenerate(p: &Polytope, slab_tol: f64) -> DegeneracyReport {
    let verts = p.vertices();
    let dim = p.dim();
    if verts.is_empty() {
        return DegeneracyReport {
            hausdorff_dim_estimate: 0,
            is_slab: true,
            slab_normal: None,
            thickness: 0.0,
        };
    }
    let n = verts.len() as f64;
    let mean = verts
        .iter()
        .fold(nalgebra::DVector::zeros(dim), |acc, v| acc + v)
        / n;
    let mut cov = DMatrix::zeros(dim, dim);
    for v in verts {
        let d = v - &mean;
        cov += &d * d.transpose();
    }
    cov /= n;
    let (_, axes) = sym_eigen(&cov);
    let mut best: Option<(f64, usize)> = None;
    let mut full = 0;
    for (k, axis) in axes.iter().enumerate() {
        let (lo, hi) = verts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let s = axis.dot(v);
                (lo.min(s), hi.max(s))
            });
        let width = hi - lo;
        if width >= slab_tol {
            full += 1;
        }
        if best.is_none_or(|(w, _)| width < w) {
            best = Some((width, k));
        }
    }
    let (thickness, k) = best.unwrap_or((0.0, 0));
    let is_slab = thickness < slab_tol;
    DegeneracyReport {
        hausdorff_dim_estimate: full,
        is_slab,
        slab_normal: is_slab
            .then(|| Direction::new(axes[k].clone()).ok())
            .flatten(),
        thickness,
    }
}
