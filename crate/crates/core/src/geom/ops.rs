use core::f64::consts::PI;

use nalgebra::DVector;

use super::sampling;
use super::{Direction, Point, Polytope};
use crate::prelude::*;
use crate::{Error, Result};

/// `h_P(y) = max_v ⟨v, y⟩`.
pub fn support_function(p: &Polytope, y: &DVector<f64>) -> Result<f64> {
    if y.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: y.len(),
        });
    }
    p.vertices()
        .iter()
        .map(|v| v.dot(y))
        .reduce(f64::max)
        .ok_or_else(|| Error::InvalidPolytope("no vertices".into()))
}

/// `P + Q` as the hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.vertices().is_empty() || q.vertices().is_empty() {
        return Err(Error::InvalidPolytope("no vertices".into()));
    }
    let sums: Vec<Point> = p
        .vertices()
        .iter()
        .flat_map(|a| q.vertices().iter().map(move |b| a + b))
        .collect();
    Polytope::from_points(p.dim(), &sums)
}

/// `max_ξ |h_P(ξ) − h_Q(ξ)|` over a deterministic sample of `n_dirs ≥ 16`
/// directions, both facet-normal sets, and the directions of all vertex
/// differences. In 2D that candidate set contains every critical direction,
/// so the value is the exact Hausdorff distance; in 3D it is a lower bound.
pub fn hausdorff_distance(p: &Polytope, q: &Polytope, n_dirs: usize) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let dim = p.dim();
    let mut dirs = sampling::directions(dim, n_dirs.max(16), 0);
    for body in [p, q] {
        for f in 0..body.facets().len() {
            dirs.push(body.facet_normal(f).clone());
        }
    }
    for a in p.vertices() {
        for b in q.vertices() {
            if let Ok(d) = Direction::new(a - b) {
                dirs.push(d.neg());
                dirs.push(d);
            }
        }
    }
    let mut best: f64 = 0.0;
    for d in &dirs {
        let gap = support_function(p, d.as_vector())? - support_function(q, d.as_vector())?;
        best = best.max(gap.abs());
    }
    Ok(best)
}

/// Surface-measure atoms `(facet normal, facet area)`.
pub fn gauss_map_measure(p: &Polytope) -> Result<Vec<(Direction, f64)>> {
    p.require_solid()?;
    Ok((0..p.facets().len())
        .map(|f| (p.facet_normal(f).clone(), p.facets()[f].area))
        .collect())
}

/// `r_P(θ) = sup{r ≥ 0 : rθ ∈ P}`; needs the origin strictly inside.
pub fn radial_function(p: &Polytope, theta: &Direction) -> Result<f64> {
    if theta.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: theta.dim(),
        });
    }
    if p.halfspaces().is_empty() || p.halfspaces().iter().any(|hs| hs.offset <= 0.0) {
        return Err(Error::OriginNotInterior);
    }
    p.halfspaces()
        .iter()
        .filter_map(|hs| {
            let c = hs.normal.dot(theta.as_vector());
            (c > 0.0).then(|| hs.offset / c)
        })
        .reduce(f64::min)
        .ok_or(Error::Unbounded)
}

/// Exact volume by cones from an interior point over the facets.
/// Degenerate bodies return `(0, true)`.
pub fn volume(p: &Polytope) -> (f64, bool) {
    if p.degeneracy().is_some() {
        (0.0, true)
    } else {
        (p.cached_volume(), false)
    }
}

/// `|P| = (1/n) ∫_{S^{n−1}} r_P(θ)^n dθ` by the midpoint rule on `n_dirs`
/// equal arcs (2D) or a Fibonacci lattice (3D).
pub fn volume_by_radial_quadrature(p: &Polytope, n_dirs: usize) -> Result<f64> {
    let n = p.dim() as i32;
    let (dirs, weight) = if p.dim() == 2 {
        (
            sampling::uniform_circle(n_dirs, PI / n_dirs as f64),
            2.0 * PI / n_dirs as f64,
        )
    } else {
        (
            sampling::fibonacci_sphere(n_dirs, 0.0),
            4.0 * PI / n_dirs as f64,
        )
    };
    let mut acc = 0.0;
    for d in &dirs {
        acc += radial_function(p, d)?.powi(n);
    }
    Ok(acc * weight / n as f64)
}
