use crate::fem::{solve_dirichlet, SolverConfig};
use crate::geom::{hausdorff_distance, Direction, Polytope};
use crate::mesh::{mesh_annulus, MeshOptions};
use crate::prelude::*;
use crate::Result;

use super::{pharm_measure, MeasureAtomMap};

/// Fixed inner circle and discretization shared by every body of a probe.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub center: [f64; 2],
    pub inner_radius: f64,
    pub inner_value: f64,
    pub target_h: f64,
    pub fem: SolverConfig,
    /// Direction `ζ` of the test function `⟨ξ, ζ⟩²`.
    pub zeta: [f64; 2],
}

impl ProbeConfig {
    pub fn new(p: f64, target_h: f64) -> Self {
        ProbeConfig {
            center: [0.0, 0.0],
            inner_radius: 0.5,
            inner_value: 1.0,
            target_h,
            fem: SolverConfig::new(p),
            zeta: [0.6, 0.8],
        }
    }
}

/// One body of the sequence against the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub hausdorff: f64,
    pub total_mass: f64,
    /// `|μ_j(S) − μ(S)| / μ(S)`.
    pub mass_gap: f64,
    /// Gaps of `∫ξ_1`, `∫ξ_2` and `∫⟨ξ, ζ⟩²`, relative to the limit mass.
    pub moment_gaps: [f64; 3],
}

fn moments(mu: &MeasureAtomMap, zeta: [f64; 2]) -> [f64; 4] {
    let tests: [&dyn Fn(&Direction) -> f64; 4] =
        [&|_| 1.0, &|x| x.coords()[0], &|x| x.coords()[1], &|x| {
            (x.coords()[0] * zeta[0] + x.coords()[1] * zeta[1]).powi(2)
        }];
    tests.map(|w| mu.integrate(w))
}

/// Measures of each target and of `limit` with the same inner data, and
/// their gaps under the test functions `1, ξ_1, ξ_2, ⟨ξ, ζ⟩²`.
pub fn weak_convergence_probe(
    targets: &[Polytope],
    limit: &Polytope,
    cfg: &ProbeConfig,
) -> Result<Vec<ProbeRow>> {
    let opts = MeshOptions {
        min_edges: 1,
        ..MeshOptions::with_h(cfg.target_h)
    };
    let measure_of = |body: &Polytope| -> Result<MeasureAtomMap> {
        let (mesh, _) = mesh_annulus(body, cfg.center, cfg.inner_radius, &opts, None)?;
        let sol = solve_dirichlet(Arc::new(mesh), |_| cfg.inner_value, &cfg.fem)?;
        pharm_measure(body, &sol)
    };
    let reference = moments(&measure_of(limit)?, cfg.zeta);
    let scale = reference[0].max(f64::MIN_POSITIVE);
    targets
        .iter()
        .map(|body| {
            let m = moments(&measure_of(body)?, cfg.zeta);
            let gap = |k: usize| (m[k] - reference[k]).abs() / scale;
            Ok(ProbeRow {
                hausdorff: hausdorff_distance(body, limit, 256)?,
                total_mass: m[0],
                mass_gap: gap(0),
                moment_gaps: [gap(1), gap(2), gap(3)],
            })
        })
        .collect()
}
