use nalgebra::{DMatrix, DVector};

use super::{Diagnostics, IterationRecord, SolveConfig, SolveOutcome};
use crate::geom::{
    check_measure_conditions, volume, wulff_shape, Direction, Polytope, SphericalMeasure,
    SupportVector,
};
use crate::linalg::solve;
use crate::measure::MeasureAtomMap;
use crate::prelude::*;
use crate::{Error, Result};

/// Body whose surface area measure is `mu`, centroid at the origin.
///
/// Minimizes the convex `F(h) = Σ c_i h_i − log V(h)` by damped Newton with
/// the exact Hessian of the volume; at the minimum the facet areas are
/// `V c_i`, and a dilation by `V^{−1/(n−1)}` makes them `c_i`. Antipodal atoms
/// are allowed.
pub fn solve_classical(mu: &SphericalMeasure, cfg: &SolveConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let cond = check_measure_conditions(mu);
    if !(cond.spans && cond.centered) {
        return Err(Error::Inadmissible(cond));
    }
    let normals = mu.directions();
    let c = DVector::from_vec(mu.weights());
    let c_total = mu.total_mass();
    let n = mu.dim();
    let m = normals.len();
    let t = DMatrix::from_fn(m, n, |i, k| normals[i].coords()[k]);

    let mut cur = Iterate::new(&normals, vec![1.0; m])?;
    let mut history = Vec::new();
    let mut iterations = 0;
    let residual_of = |it: &Iterate| (&c - &it.areas / it.volume).abs().sum() / c_total;
    let objective = |it: &Iterate| c.dot(&DVector::from_column_slice(&it.heights)) - it.volume.ln();
    let mut res = residual_of(&cur);
    history.push(record(0, res, cur.volume, 0.0, &cur.heights, true));
    while res > cfg.classical_tol && iterations < cfg.max_iter {
        iterations += 1;
        let v = cur.volume;
        let g = &c - &cur.areas / v;
        let jac = area_jacobian(&cur.body, &normals)?;
        let mut hess = -jac / v + &cur.areas * cur.areas.transpose() / (v * v);
        // Translations leave F unchanged; lift them out of the null space.
        let tau = hess.trace() / m as f64;
        hess += &t * t.transpose() * tau;
        let d = solve(hess, &(-&g))
            .ok_or_else(|| Error::LinearSolve("singular Newton system".into()))?;
        let slope = g.dot(&d);
        let f0 = objective(&cur);
        let mut step = 1.0;
        let mut next = None;
        while step > 1e-12 {
            let h: Vec<f64> = cur
                .heights
                .iter()
                .zip(d.iter())
                .map(|(h, d)| h + step * d)
                .collect();
            if h.iter().all(|x| *x > 0.0) {
                if let Ok(trial) = Iterate::new(&normals, h) {
                    let armijo = objective(&trial) <= f0 + 1e-4 * step * slope + 1e-14 * f0.abs();
                    if armijo || residual_of(&trial) < res {
                        next = Some(trial);
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some(next) = next else {
            history.push(record(
                iterations,
                res,
                cur.volume,
                step,
                &cur.heights,
                false,
            ));
            break;
        };
        cur = next.recentered(&normals)?;
        res = residual_of(&cur);
        history.push(record(
            iterations,
            res,
            cur.volume,
            step,
            &cur.heights,
            true,
        ));
    }

    let lam = cur.volume.powf(-1.0 / (n as f64 - 1.0));
    let body = cur.body.scaled(lam);
    let areas = facet_areas(&body, m)?;
    let mu_p = MeasureAtomMap::new(normals, areas.iter().copied().collect())?;
    let residual = (&c - &areas).abs().sum() / c_total;
    let mut diagnostics = Diagnostics::new(cfg.p, cfg.p, n);
    diagnostics.center_defect = mu_p.center_defect.clone();
    Ok(SolveOutcome {
        gamma: volume(&body).0,
        converged: residual <= cfg.classical_tol,
        polytope: body,
        mu_p,
        residual,
        iterations,
        history,
        diagnostics,
        solution: None,
    })
}

struct Iterate {
    heights: Vec<f64>,
    body: Polytope,
    /// Facet areas indexed like the atoms.
    areas: DVector<f64>,
    volume: f64,
}

impl Iterate {
    /// Fails unless every direction carries a facet.
    fn new(normals: &[Direction], heights: Vec<f64>) -> Result<Self> {
        let body = wulff_shape(&SupportVector::new(normals.to_vec(), heights.clone())?)?;
        body.require_solid()?;
        let areas = facet_areas(&body, normals.len())?;
        let (volume, _) = volume(&body);
        Ok(Iterate {
            heights,
            body,
            areas,
            volume,
        })
    }

    fn recentered(self, normals: &[Direction]) -> Result<Self> {
        let c = self.body.centroid().clone();
        let heights = self
            .heights
            .iter()
            .zip(normals)
            .map(|(h, xi)| h - xi.dot(&c))
            .collect();
        Ok(Iterate {
            heights,
            body: self.body.translated(&-c),
            ..self
        })
    }
}

fn facet_areas(body: &Polytope, m: usize) -> Result<DVector<f64>> {
    let mut areas = DVector::zeros(m);
    for f in body.facets() {
        areas[f.halfspace] = f.area;
    }
    if let Some(i) = (0..m).find(|&i| !body.is_active(i)) {
        return Err(Error::InvalidPolytope(format!(
            "direction {i} carries no facet"
        )));
    }
    Ok(areas)
}

/// `∂A_i/∂h_j = ℓ_ij / sin θ_ij` for facets meeting in a ridge of measure
/// `ℓ_ij` (1 in the plane), and `∂A_i/∂h_i = −Σ_j ℓ_ij cot θ_ij`.
fn area_jacobian(body: &Polytope, normals: &[Direction]) -> Result<DMatrix<f64>> {
    let m = normals.len();
    let dim = body.dim();
    let mut jac = DMatrix::zeros(m, m);
    let facets = body.facets();
    for (a, fa) in facets.iter().enumerate() {
        for fb in &facets[a + 1..] {
            let common: Vec<usize> = fa
                .vertices
                .iter()
                .copied()
                .filter(|v| fb.vertices.contains(v))
                .collect();
            if common.len() + 1 < dim {
                continue;
            }
            let ridge = match dim {
                2 => 1.0,
                _ => (&body.vertices()[common[0]] - &body.vertices()[common[1]]).norm(),
            };
            let (i, j) = (fa.halfspace, fb.halfspace);
            let cos = normals[i].dot(normals[j].as_vector()).clamp(-1.0, 1.0);
            let sin = (1.0 - cos * cos).sqrt();
            if sin <= 1e-14 {
                return Err(Error::InvalidPolytope(
                    "adjacent facets are parallel".into(),
                ));
            }
            jac[(i, j)] += ridge / sin;
            jac[(j, i)] += ridge / sin;
            jac[(i, i)] -= ridge * cos / sin;
            jac[(j, j)] -= ridge * cos / sin;
        }
    }
    Ok(jac)
}

fn record(
    iteration: usize,
    residual: f64,
    volume: f64,
    step: f64,
    heights: &[f64],
    accepted: bool,
) -> IterationRecord {
    IterationRecord {
        iteration,
        residual,
        gamma: volume,
        step,
        heights: heights.to_vec(),
        accepted,
    }
}
