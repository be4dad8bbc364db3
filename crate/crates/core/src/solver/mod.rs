//! Minkowski solvers for discrete measures.
//!
//! [`solve_discrete`] looks for support heights `h` on the atom directions
//! of a target `μ = Σ c_i δ_{ξ_i}` whose Wulff shape carries a p-harmonic
//! measure proportional to `μ`, then dilates the body to `Γ = 1` and fixes
//! the constant inner data so that the masses match. [`solve_classical`] is
//! the same problem for the surface area measure, solved by Newton's method.
//! [`solve_general`] discretizes a density on a schedule of atom counts.
//!
//! The inner circle of the p-harmonic solver sits at the origin of the
//! height coordinates, so the heights also carry the position of the body
//! relative to the circle; this is what lets the solver cancel the first
//! moment of `μ_P`. Output bodies are translated to centroid zero and the
//! circle's position is reported in [`Diagnostics::ring_center`]. The
//! circle's radius is a fixed multiple of `Σ c_i h_i / Σ c_i`.

mod classical;
mod discrete;
mod general;

pub use classical::solve_classical;
pub use discrete::{solve_discrete, solve_discrete_from};
pub use general::{solve_general, GeneralOutcome, ScheduleStage};

use nalgebra::DVector;

use crate::fem::{PHarmSolution, SolverConfig};
use crate::geom::{Polytope, SupportVector};
use crate::measure::MeasureAtomMap;
use crate::prelude::*;
use crate::{Error, Result};

/// Distance from `n + 1` below which the exponent is shifted.
pub const P_EXCEPTION_TOL: f64 = 1e-6;
/// Size of that shift.
pub const P_SHIFT: f64 = 1e-3;

/// Moves `p = n + 1` by [`P_SHIFT`] towards 2, where the dilation exponent
/// `n − p + 1` of `Γ` vanishes. Other exponents pass through.
pub fn handle_p_exception(p: f64, n: usize) -> f64 {
    let critical = n as f64 + 1.0;
    if (p - critical).abs() < P_EXCEPTION_TOL {
        if critical > 2.0 {
            critical - P_SHIFT
        } else {
            critical + P_SHIFT
        }
    } else {
        p
    }
}

/// Height update rule of [`solve_discrete`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UpdateMode {
    /// `h_i ← h_i (â_i / ĉ_i)^γ` on normalized shares.
    FixedPoint,
    /// Projected gradient on `Σ c_i h_i` subject to `Γ = 1`, with
    /// `∂Γ/∂h_i ≈ (n − p + 1) a_i` checked against central differences at
    /// the start, every `fd_every` accepted steps and whenever the line
    /// search stalls; the ratios found rescale the surrogate until the next
    /// check.
    Gradient { fd_every: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub p: f64,
    /// Inner circle radius over its center's distance to the boundary, at
    /// the first iterate.
    pub shrink: f64,
    /// Mesh size over the circle center's distance to the boundary.
    pub mesh_h_rel: f64,
    /// Residual tolerance.
    pub tol: f64,
    /// Tolerance on `|Γ − 1|`.
    pub gamma_tol: f64,
    pub max_iter: usize,
    pub mode: UpdateMode,
    /// Initial and largest damping exponent of the fixed-point update.
    pub gamma0: f64,
    /// The fixed-point update gives up below this damping.
    pub gamma_min: f64,
    /// Shares are clamped below at this fraction of their target.
    pub share_floor: f64,
    /// Rotation applied to antipodal partners, in radians.
    pub antipodal_eps: f64,
    /// Repairs allowed while building one iterate.
    pub max_repairs: usize,
    /// Residual tolerance of [`solve_classical`].
    pub classical_tol: f64,
    /// PDE settings; the exponent is overwritten by the effective `p`.
    pub fem: SolverConfig,
}

impl SolveConfig {
    pub fn new(p: f64) -> Self {
        SolveConfig {
            p,
            fem: SolverConfig::new(p),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidExponent(self.p));
        }
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(unit(self.shrink) && unit(self.mesh_h_rel)) {
            return Err(Error::InvalidConfig(format!(
                "shrink {} and mesh_h_rel {} must lie in (0, 1)",
                self.shrink, self.mesh_h_rel
            )));
        }
        if !(self.tol > 0.0 && self.gamma_tol > 0.0 && self.classical_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.gamma_min > 0.0 && self.gamma_min <= self.gamma0 && self.gamma0 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < gamma_min {} <= gamma0 {} <= 1",
                self.gamma_min, self.gamma0
            )));
        }
        if !unit(self.share_floor) || !(self.antipodal_eps > 0.0) {
            return Err(Error::InvalidConfig(
                "share floor or antipodal eps out of range".into(),
            ));
        }
        if let UpdateMode::Gradient { fd_every: 0 } = self.mode {
            return Err(Error::InvalidConfig("fd_every must be positive".into()));
        }
        self.fem.validate()
    }
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            p: 2.0,
            shrink: 0.5,
            mesh_h_rel: 0.04,
            tol: 1e-2,
            gamma_tol: 1e-3,
            max_iter: 100,
            mode: UpdateMode::FixedPoint,
            gamma0: 0.3,
            gamma_min: 1e-3,
            share_floor: 1e-3,
            antipodal_eps: 1e-3,
            max_repairs: 5,
            classical_tol: 1e-10,
            fem: SolverConfig::default(),
        }
    }
}

/// The current iterate.
#[derive(Clone, Debug)]
pub struct SolveState {
    pub heights: SupportVector,
    pub polytope: Polytope,
    pub mu_p: MeasureAtomMap,
    pub gamma: f64,
    pub residual: f64,
    /// Damping exponent or gradient step that produced this iterate.
    pub step: f64,
    pub iteration: usize,
}

/// One evaluated iterate, accepted or not.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    /// `Γ` of the iterate before the normalizing dilation.
    pub gamma: f64,
    pub step: f64,
    pub heights: Vec<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepairKind {
    /// The Wulff shape was a slab; the two most opposed heights grew.
    Slab { grown: [usize; 2] },
    /// Target directions without a facet; their heights were pulled in.
    InactiveFacets(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepairEvent {
    pub iteration: usize,
    pub kind: RepairKind,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeRecord {
    pub iterations: usize,
    pub final_increment: f64,
    pub triangles: usize,
}

/// Finite-difference audit of `∂Γ/∂h_i ≈ (n − p + 1) a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FdCheck {
    pub iteration: usize,
    pub surrogate: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// `Σ a_i ξ_i` of the output measure.
    pub center_defect: DVector<f64>,
    pub repairs: Vec<RepairEvent>,
    pub pde: Vec<PdeRecord>,
    pub p_requested: f64,
    pub p_effective: f64,
    /// Constant inner data that makes the output masses match the target.
    pub amplitude: f64,
    /// Center of the inner circle in the coordinates of the output body.
    pub ring_center: DVector<f64>,
    /// Whether antipodal atoms of the target were rotated apart.
    pub perturbed: bool,
    pub fd_checks: Vec<FdCheck>,
}

impl Diagnostics {
    fn new(p: f64, p_eff: f64, dim: usize) -> Self {
        Diagnostics {
            center_defect: DVector::zeros(dim),
            repairs: Vec::new(),
            pde: Vec::new(),
            p_requested: p,
            p_effective: p_eff,
            amplitude: 1.0,
            ring_center: DVector::zeros(dim),
            perturbed: false,
            fd_checks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Output body, centroid at the origin.
    pub polytope: Polytope,
    /// Its measure on the target directions.
    pub mu_p: MeasureAtomMap,
    pub residual: f64,
    /// `Γ(P)` for p-harmonic runs; the volume for classical runs.
    pub gamma: f64,
    pub converged: bool,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub diagnostics: Diagnostics,
    /// Final PDE solve. Its mesh lives in the frame of the inner circle;
    /// add `diagnostics.ring_center` to place it on the output body.
    pub solution: Option<PHarmSolution>,
}

#[cfg(test)]
mod tests;
