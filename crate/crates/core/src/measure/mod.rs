//! The p-harmonic measure of a polygon as atoms on its facet normals.
//!
//! For a solution `u` on a ring whose outer body is `P`, the atom of facet
//! `i` is `a_i = ∫_{F_i} |∇u|^{p−1}`, computed by the midpoint rule on each
//! outer boundary edge with the gradient of the adjacent triangle.

mod probe;

pub use probe::{weak_convergence_probe, ProbeConfig, ProbeRow};

use nalgebra::DVector;

use crate::fem::{boundary_gradient, solve_dirichlet, PHarmSolution, SolverConfig};
use crate::geom::{support_function, Direction, Polytope, SphericalMeasure};
use crate::mesh::{mesh_annulus, MeshLayout, MeshOptions};
use crate::prelude::*;
use crate::{Error, Result};

/// Angular tolerance for matching atom directions.
pub const DIRECTION_TOL: f64 = 1e-9;

/// Atoms `a_i` keyed by facet normal.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureAtomMap {
    pub normals: Vec<Direction>,
    pub masses: Vec<f64>,
    pub total_mass: f64,
    /// `Σ a_i ξ_i`; reported, never asserted.
    pub center_defect: DVector<f64>,
}

impl MeasureAtomMap {
    pub fn new(normals: Vec<Direction>, masses: Vec<f64>) -> Result<Self> {
        if normals.len() != masses.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} normals but {} masses",
                normals.len(),
                masses.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("atom mass {m} is negative")));
        }
        let dim = normals.first().map_or(2, Direction::dim);
        let total_mass = masses.iter().sum();
        let center_defect = normals
            .iter()
            .zip(&masses)
            .fold(DVector::zeros(dim), |acc, (xi, m)| {
                acc + xi.as_vector() * *m
            });
        Ok(MeasureAtomMap {
            normals,
            masses,
            total_mass,
            center_defect,
        })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Mass at `xi`, zero when there is no atom there.
    pub fn mass_at(&self, xi: &Direction) -> f64 {
        self.normals
            .iter()
            .position(|n| n.angle_to(xi) <= DIRECTION_TOL)
            .map_or(0.0, |k| self.masses[k])
    }

    /// The same atoms listed on `normals`, with zero mass where absent.
    /// Fails if a positive atom falls outside `normals`.
    pub fn on_normals(&self, normals: &[Direction]) -> Result<MeasureAtomMap> {
        let covered = self
            .normals
            .iter()
            .zip(&self.masses)
            .all(|(n, m)| *m == 0.0 || normals.iter().any(|x| x.angle_to(n) <= DIRECTION_TOL));
        if !covered {
            return Err(Error::DirectionMismatch);
        }
        MeasureAtomMap::new(
            normals.to_vec(),
            normals.iter().map(|x| self.mass_at(x)).collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<MeasureAtomMap> {
        MeasureAtomMap::new(
            self.normals.clone(),
            self.masses.iter().map(|m| m * factor).collect(),
        )
    }

    /// The positive atoms as a spherical measure.
    pub fn to_spherical(&self) -> Result<SphericalMeasure> {
        let dim = self.normals.first().map_or(2, Direction::dim);
        SphericalMeasure::new(
            dim,
            self.normals
                .iter()
                .zip(&self.masses)
                .filter(|(_, m)| **m > 0.0)
                .map(|(n, m)| (n.clone(), *m)),
        )
    }

    /// `∫ w dμ`.
    pub fn integrate(&self, w: impl Fn(&Direction) -> f64) -> f64 {
        self.normals
            .iter()
            .zip(&self.masses)
            .map(|(n, m)| w(n) * m)
            .sum()
    }
}

/// `Γ = Σ h_i a_i` with its terms.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaValue {
    pub value: f64,
    pub contributions: Vec<f64>,
}

/// Atoms of the p-harmonic measure of `sol` on the facets of `p`.
pub fn pharm_measure(p: &Polytope, sol: &PHarmSolution) -> Result<MeasureAtomMap> {
    let nf = p.facets().len();
    let mesh = sol.mesh();
    let mut masses = vec![0.0; nf];
    for flux in boundary_gradient(sol) {
        if flux.facet >= nf {
            return Err(Error::TagMismatch(flux.facet));
        }
        // Both edge nodes must lie on the tagged facet line.
        let b = &mesh.boundary()[flux.element];
        let xi = p.facet_normal(flux.facet).coords();
        let off = p.facet_offset(flux.facet);
        let tol = 1e-8 * p.diameter().max(1.0);
        let on_facet = b.nodes.iter().all(|&k| {
            let x = mesh.nodes()[k];
            (xi[0] * x[0] + xi[1] * x[1] - off).abs() <= tol
        });
        if !on_facet {
            return Err(Error::TagMismatch(flux.facet));
        }
        masses[flux.facet] += flux.grad.powf(sol.p - 1.0) * flux.length;
    }
    MeasureAtomMap::new((0..nf).map(|f| p.facet_normal(f).clone()).collect(), masses)
}

/// `Γ(P) = Σ h_P(ξ_i) a_i`.
pub fn gamma(p: &Polytope, mu_p: &MeasureAtomMap) -> GammaValue {
    let contributions: Vec<f64> = mu_p
        .normals
        .iter()
        .zip(&mu_p.masses)
        .map(|(xi, a)| {
            if *a == 0.0 {
                0.0
            } else {
                support_function(p, xi.as_vector()).unwrap_or(f64::NAN) * a
            }
        })
        .collect();
    GammaValue {
        value: contributions.iter().sum(),
        contributions,
    }
}

/// `Σ |a_i − c_i| / Σ c_i` over matching directions.
pub fn residual(mu_p: &MeasureAtomMap, mu: &SphericalMeasure) -> Result<f64> {
    if mu_p.len() != mu.len() {
        return Err(Error::DirectionMismatch);
    }
    let mut diff = 0.0;
    for (xi, a) in mu_p.normals.iter().zip(&mu_p.masses) {
        let k = mu.find(xi, DIRECTION_TOL).ok_or(Error::DirectionMismatch)?;
        diff += (a - mu.atoms()[k].weight).abs();
    }
    Ok(diff / mu.total_mass())
}

/// Canonical solution: constant data `value` on the circle of radius
/// `shrink · dist(centroid, ∂P)` about the centroid.
pub fn canonical_solution(
    p: &Polytope,
    shrink: f64,
    value: f64,
    opts: &MeshOptions,
    layout: Option<&MeshLayout>,
    cfg: &SolverConfig,
) -> Result<(PHarmSolution, MeshLayout)> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidRing(format!(
            "shrink {shrink} outside (0, 1)"
        )));
    }
    let c = p.centroid();
    let rho = shrink * p.boundary_distance(c);
    let center = [c[0], *c.get(1).unwrap_or(&0.0)];
    solution_about(p, center, rho, value, opts, layout, cfg)
}

/// Constant data `value` on the circle of radius `rho` about `center`.
pub fn solution_about(
    p: &Polytope,
    center: [f64; 2],
    rho: f64,
    value: f64,
    opts: &MeshOptions,
    layout: Option<&MeshLayout>,
    cfg: &SolverConfig,
) -> Result<(PHarmSolution, MeshLayout)> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    p.require_solid()?;
    let (mesh, layout) = mesh_annulus(p, center, rho, opts, layout)?;
    let sol = solve_dirichlet(Arc::new(mesh), |_| value, cfg)?;
    Ok((sol, layout))
}

#[cfg(test)]
mod tests;
