//! Numerical checks of the analytic identities behind the solver.
//!
//! Every check compares a measured number against an expected one and
//! returns a [`CheckResult`]; failures are data, not errors. The first
//! variation checks run central differences over the family
//! `Ω + tQ` solved by [`family_solve`].

mod battery;

pub use battery::{format_table, random_polygon, run_battery, BatteryConfig};

use core::f64::consts::PI;

use crate::fem::{family_solve, solve_dirichlet, PHarmSolution, SolverConfig};
use crate::geom::{support_function, Polytope};
use crate::measure::{canonical_solution, gamma, pharm_measure, MeasureAtomMap};
use crate::mesh::{build_ring_with, ConvexRing, MeshOptions};
use crate::prelude::*;
use crate::{Error, Result};

/// Inner circle radius over the centroid's distance to the boundary.
pub const SHRINK: f64 = 0.5;

/// Below this `|n − p + 1|` the first-variation constant counts as zero.
pub const ZERO_CONSTANT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckContext {
    pub p: f64,
    pub n: usize,
    pub mesh_h: f64,
    /// Parameter step of the finite differences or of the family.
    pub dt: Option<f64>,
    pub note: Option<String>,
}

impl CheckContext {
    pub fn new(p: f64, n: usize, mesh_h: f64) -> Self {
        CheckContext {
            p,
            n,
            mesh_h,
            dt: None,
            note: None,
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        CheckContext {
            dt: Some(dt),
            ..self
        }
    }

    pub fn with_note(self, note: impl Into<String>) -> Self {
        CheckContext {
            note: Some(note.into()),
            ..self
        }
    }
}

/// `passed ⇔ rel_error ≤ tolerance`; a NaN error never passes.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub context: CheckContext,
}

impl CheckResult {
    /// Error `|measured − expected| / |scale|`.
    pub fn scaled(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        scale: f64,
        tolerance: f64,
        context: CheckContext,
    ) -> Self {
        let rel_error = (measured - expected).abs() / scale.abs();
        CheckResult {
            name: name.into(),
            measured,
            expected,
            rel_error,
            tolerance,
            passed: rel_error <= tolerance,
            context,
        }
    }

    pub fn relative(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        context: CheckContext,
    ) -> Self {
        Self::scaled(name, measured, expected, expected, tolerance, context)
    }

    /// A check that could not be evaluated.
    pub fn failed(
        name: impl Into<String>,
        tolerance: f64,
        context: CheckContext,
        err: &Error,
    ) -> Self {
        CheckResult {
            name: name.into(),
            measured: f64::NAN,
            expected: f64::NAN,
            rel_error: f64::NAN,
            tolerance,
            passed: false,
            context: context.with_note(format!("{err}")),
        }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        CheckResult {
            passed: self.rel_error <= tolerance,
            tolerance,
            ..self
        }
    }
}

/// Radial `p`-harmonic function on `r0 < |x| < radius` in `R^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialSolution {
    pub n: usize,
    pub p: f64,
    /// `u = a r^β + b`, or `a ln r + b` when `p = n`.
    pub a: f64,
    pub b: f64,
    pub beta: Option<f64>,
}

impl RadialSolution {
    pub fn value(&self, r: f64) -> f64 {
        match self.beta {
            Some(beta) => self.a * r.powf(beta) + self.b,
            None => self.a * r.ln() + self.b,
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        match self.beta {
            Some(beta) => self.a * beta * r.powf(beta - 1.0),
            None => self.a / r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallOracle {
    /// `|u'(R)|^{p−1}`.
    pub density: f64,
    pub total_mass: f64,
    pub u: RadialSolution,
}

/// Surface area of the unit sphere in `R^n`: `2π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    // Γ(n/2) by recursion from Γ(1) = 1 or Γ(1/2) = √π.
    let mut g = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x + 0.5 < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / g
}

/// Closed form on the spherical shell `r0 < |x| < radius` with `u = 0` outside
/// and `u = inner_value` inside.
pub fn ball_oracle(n: usize, p: f64, radius: f64, r0: f64, inner_value: f64) -> Result<BallOracle> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if !(r0 > 0.0 && r0 < radius && radius.is_finite()) {
        return Err(Error::InvalidRing(format!("need 0 < r0 {r0} < R {radius}")));
    }
    let u = if (p - n as f64).abs() < 1e-12 {
        let a = inner_value / (r0 / radius).ln();
        RadialSolution {
            n,
            p,
            a,
            b: -a * radius.ln(),
            beta: None,
        }
    } else {
        let beta = (p - n as f64) / (p - 1.0);
        let a = inner_value / (r0.powf(beta) - radius.powf(beta));
        RadialSolution {
            n,
            p,
            a,
            b: -a * radius.powf(beta),
            beta: Some(beta),
        }
    };
    let density = u.slope(radius).abs().powf(p - 1.0);
    Ok(BallOracle {
        density,
        total_mass: density * sphere_area(n) * radius.powi(n as i32 - 1),
        u,
    })
}

/// Regular `k`-gon with inradius 1 and a facet normal along the first axis.
pub fn regular_polygon(k: usize) -> Result<Polytope> {
    use crate::geom::{sampling::uniform_circle, wulff_shape, SupportVector};
    wulff_shape(&SupportVector::new(uniform_circle(k, 0.0), vec![1.0; k])?)
}

fn perimeter(p: &Polytope) -> f64 {
    p.facets().iter().map(|f| f.area).sum()
}

/// Mean boundary density on the `k`-gon with inner data 1 on the circle of
/// radius 1/2 against the disk oracle at mesh size `h`, and whether its error
/// shrinks from `2h` to `h`.
pub fn oracle_check(p: f64, k: usize, h: f64) -> Result<[CheckResult; 2]> {
    let body = regular_polygon(k)?;
    let oracle = ball_oracle(2, p, 1.0, SHRINK, 1.0)?;
    let cfg = SolverConfig::new(p);
    let density_at = |h: f64| -> Result<f64> {
        let opts = MeshOptions {
            min_edges: 1,
            ..MeshOptions::with_h(h)
        };
        let (sol, _) = canonical_solution(&body, SHRINK, 1.0, &opts, None, &cfg)?;
        Ok(pharm_measure(&body, &sol)?.total_mass / perimeter(&body))
    };
    let coarse = density_at(2.0 * h)?;
    let fine = density_at(h)?;
    let err = |d: f64| (d / oracle.density - 1.0).abs();
    let ctx = CheckContext::new(p, 2, h);
    Ok([
        CheckResult::relative(
            format!("oracle_density_p{p}"),
            fine,
            oracle.density,
            0.02,
            ctx.clone(),
        ),
        CheckResult::scaled(
            format!("oracle_refinement_p{p}"),
            err(fine),
            0.0,
            err(coarse),
            1.0,
            ctx.with_note("error at h over error at 2h"),
        ),
    ])
}

/// Base solution on the canonical ring of `omega`, reused by every family
/// member of a check.
pub struct FamilyBase {
    pub omega: Polytope,
    pub ring: ConvexRing,
    pub solution: PHarmSolution,
    pub cfg: SolverConfig,
    pub mesh_h: f64,
}

impl FamilyBase {
    pub fn new(omega: &Polytope, p: f64, mesh_h: f64) -> Result<Self> {
        let cfg = SolverConfig::new(p);
        let (ring, mesh, _) = build_ring_with(omega, SHRINK, &MeshOptions::with_h(mesh_h), None)?;
        let solution = solve_dirichlet(Arc::new(mesh), |_| 1.0, &cfg)?;
        Ok(FamilyBase {
            omega: omega.clone(),
            ring,
            solution,
            cfg,
            mesh_h,
        })
    }

    pub fn p(&self) -> f64 {
        self.cfg.p
    }

    /// Body and measure of `Ω + tQ`.
    pub fn member(&self, q: &Polytope, t: f64) -> Result<(Polytope, MeasureAtomMap)> {
        let m = family_solve(&self.solution, &self.ring, q, t, &self.cfg)?;
        let mu = pharm_measure(&m.body, &m.solution)?;
        Ok((m.body, mu))
    }

    fn context(&self) -> CheckContext {
        CheckContext::new(self.p(), self.omega.dim(), self.mesh_h)
    }
}

/// `Σ h_Q(ξ_i) a_i`.
fn pair(q: &Polytope, mu: &MeasureAtomMap) -> Result<f64> {
    mu.normals
        .iter()
        .zip(&mu.masses)
        .map(|(xi, a)| Ok(support_function(q, xi.as_vector())? * a))
        .sum()
}

/// Total and per-atom mass ratios of `(1 + t)Ω` over `Ω` against
/// `(1 + t)^{n−p}`. The per-atom check is the largest deviation of an atom's
/// ratio from the total ratio.
pub fn scaling_check(base: &FamilyBase, t: f64) -> Result<[CheckResult; 2]> {
    let (_, mu0) = base.member(&base.omega, 0.0)?;
    let (_, mu1) = base.member(&base.omega, t)?;
    let n = base.omega.dim() as f64;
    let total = mu1.total_mass / mu0.total_mass;
    let spread = mu0
        .masses
        .iter()
        .zip(&mu1.masses)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| (b / a / total - 1.0).abs())
        .fold(0.0, f64::max);
    let ctx = base.context().with_dt(t);
    let p = base.p();
    Ok([
        CheckResult::relative(
            format!("scaling_total_p{p}"),
            total,
            (1.0 + t).powf(n - p),
            0.02,
            ctx.clone(),
        ),
        CheckResult::scaled(format!("scaling_atoms_p{p}"), spread, 0.0, 1.0, 0.01, ctx),
    ])
}

/// Central difference of `Γ(Ω + tQ)` at `t = 0` against
/// `(n − p + 1) Σ h_Q(ξ_i) a_i`. When the constant is within
/// [`ZERO_CONSTANT`] of zero the error is measured against the total mass.
pub fn hadamard_check(base: &FamilyBase, q: &Polytope, dt: f64) -> Result<CheckResult> {
    let (_, mu0) = base.member(q, 0.0)?;
    let gamma_at = |t: f64| -> Result<f64> {
        let (body, mu) = base.member(q, t)?;
        Ok(gamma(&body, &mu).value)
    };
    let fd = (gamma_at(dt)? - gamma_at(-dt)?) / (2.0 * dt);
    let k = base.omega.dim() as f64 - base.p() + 1.0;
    let expected = k * pair(q, &mu0)?;
    let ctx = base.context().with_dt(dt);
    let name = format!("hadamard_p{}", base.p());
    Ok(if k.abs() < ZERO_CONSTANT {
        CheckResult::scaled(
            name,
            fd,
            expected,
            mu0.total_mass,
            0.05,
            ctx.with_note("constant near zero; error relative to total mass"),
        )
    } else {
        CheckResult::relative(name, fd, expected, 0.05, ctx)
    })
}

/// `d/dt Σ h_{Q1}(ξ_i) a_i(Ω + tQ2)` against the same with `Q1`, `Q2`
/// swapped, both by central differences. The error is relative to the larger
/// magnitude, floored at `10⁻³` of the total mass.
pub fn selfadjoint_check(
    base: &FamilyBase,
    q1: &Polytope,
    q2: &Polytope,
    dt: f64,
) -> Result<CheckResult> {
    let cross = |v: &Polytope, w: &Polytope| -> Result<f64> {
        let (_, plus) = base.member(w, dt)?;
        let (_, minus) = base.member(w, -dt)?;
        Ok((pair(v, &plus)? - pair(v, &minus)?) / (2.0 * dt))
    };
    let s12 = cross(q1, q2)?;
    let s21 = cross(q2, q1)?;
    let (_, mu0) = base.member(&base.omega, 0.0)?;
    let scale = s12.abs().max(s21.abs()).max(1e-3 * mu0.total_mass);
    Ok(CheckResult::scaled(
        format!("selfadjoint_p{}", base.p()),
        s12,
        s21,
        scale,
        0.05,
        base.context().with_dt(dt),
    ))
}

#[cfg(test)]
mod tests;
