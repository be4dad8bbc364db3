//! The one-parameter family `Ω^t = Ω + tΩ₀` with data `u(x/(1+t))`.

use core::f64::consts::PI;

use super::{evaluate, solve_with_guess, PHarmSolution, SolverConfig};
use crate::geom::{support_function, wulff_shape, Direction, Polytope, SupportVector};
use crate::mesh::{mesh_annulus, ConvexRing, MeshOptions};
use crate::prelude::*;
use crate::{Error, Result};

/// A member of the family and its solution.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub t: f64,
    pub body: Polytope,
    pub solution: PHarmSolution,
}

/// Wulff shape of `h_Ω + t·h_{Ω₀}` over the union of both facet-normal sets.
pub fn family_body(omega: &Polytope, omega0: &Polytope, t: f64) -> Result<Polytope> {
    let mut normals: Vec<Direction> = Vec::new();
    let mut heights = Vec::new();
    for f in 0..omega.facets().len() {
        let xi = omega.facet_normal(f).clone();
        heights.push(omega.facet_offset(f) + t * support_function(omega0, xi.as_vector())?);
        normals.push(xi);
    }
    for f in 0..omega0.facets().len() {
        let xi = omega0.facet_normal(f);
        if normals.iter().any(|n| n.angle_to(xi) <= 1e-9) {
            continue;
        }
        heights.push(support_function(omega, xi.as_vector())? + t * omega0.facet_offset(f));
        normals.push(xi.clone());
    }
    if let Some(h) = heights.iter().find(|h| !(**h > 0.0)) {
        return Err(Error::InvalidPolytope(format!(
            "family height {h} at t = {t} is not positive"
        )));
    }
    wulff_shape(&SupportVector::new(normals, heights)?)
}

/// Largest `τ ≤ 0.5` such that for `|t| ≤ τ` the family body keeps the inner
/// circle well inside and every `x/(1+t)`, `x` on the inner circle, lies in
/// the base mesh.
pub fn admissible_t(base: &PHarmSolution, ring: &ConvexRing, omega0: &Polytope) -> f64 {
    const SAMPLES: usize = 720;
    let c = ring.inner_center;
    let circle: Vec<[f64; 2]> = (0..SAMPLES)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / SAMPLES as f64;
            [
                c[0] + ring.inner_radius * a.cos(),
                c[1] + ring.inner_radius * a.sin(),
            ]
        })
        .collect();
    let ok_at = |t: f64| -> bool {
        let body = match family_body(&ring.outer, omega0, t) {
            Ok(b) => b,
            Err(_) => return false,
        };
        if ring.with_outer(body).is_err() {
            return false;
        }
        circle.iter().all(|x| {
            base.mesh()
                .locate([x[0] / (1.0 + t), x[1] / (1.0 + t)])
                .is_some()
        })
    };
    let ok = |t: f64| ok_at(t) && ok_at(-t);
    let (mut lo, mut hi) = (0.0, 0.5);
    if ok(hi) {
        return hi;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Solves on the ring between the base inner circle and `∂(Ω + tΩ₀)` with
/// data `x ↦ u_base(x/(1+t))`, meshed with the base layout.
///
/// The base solution must live on a mesh built by [`crate::mesh::build_ring_with`]
/// for `base_ring`.
pub fn family_solve(
    base: &PHarmSolution,
    base_ring: &ConvexRing,
    omega0: &Polytope,
    t: f64,
    cfg: &SolverConfig,
) -> Result<FamilyMember> {
    let tau = admissible_t(base, base_ring, omega0);
    if !(t.abs() <= tau) {
        return Err(Error::FamilyParameter { t, tau });
    }
    let layout = base
        .mesh()
        .layout()
        .ok_or_else(|| Error::InvalidMesh("base mesh has no layout".into()))?
        .ring_only();
    let body = family_body(&base_ring.outer, omega0, t)?;
    let opts = MeshOptions {
        min_edges: 1,
        ..MeshOptions::with_h(base.mesh().h())
    };
    let (mesh, _) = mesh_annulus(
        &body,
        base_ring.inner_center,
        base_ring.inner_radius,
        &opts,
        Some(&layout),
    )?;
    let s = 1.0 / (1.0 + t);
    let pull = |x: [f64; 2]| [x[0] * s, x[1] * s];
    let data = |x: [f64; 2]| evaluate(base, pull(x)).unwrap_or(f64::NAN);
    let guess = |x: [f64; 2]| evaluate(base, pull(x)).unwrap_or(0.0);
    let solution = solve_with_guess(Arc::new(mesh), data, Some(guess), cfg)
        .map_err(|e| Error::stage(format!("family solve at t = {t}"), e))?;
    Ok(FamilyMember { t, body, solution })
}
