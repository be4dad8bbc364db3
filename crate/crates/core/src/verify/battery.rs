use core::f64::consts::PI;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    hadamard_check, oracle_check, regular_polygon, scaling_check, selfadjoint_check, CheckContext,
    CheckResult, FamilyBase,
};
use crate::geom::{
    gauss_map_measure, hausdorff_distance, sampling::uniform_circle, wulff_shape, Direction,
    Polytope, SphericalMeasure, SupportVector,
};
use crate::measure::{weak_convergence_probe, ProbeConfig};
use crate::prelude::*;
use crate::solver::{handle_p_exception, solve_classical, SolveConfig};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct BatteryConfig {
    /// Requested exponents; `p = 3` runs as 2.999.
    pub ps: Vec<f64>,
    pub mesh_h: f64,
    /// Mesh size of the disk oracle checks. Below about 0.03 the
    /// discretization error of the 64-gon falls under its gap to the disk,
    /// and refining no longer approaches the disk value.
    pub oracle_h: f64,
    /// Finite-difference step.
    pub dt: f64,
    /// Dilation parameter of the scaling checks.
    pub t: f64,
    /// Facet count of the disk proxy.
    pub gon: usize,
    pub classical_polygons: usize,
    pub seed: u64,
    /// Replaces every check's own tolerance.
    pub tolerance_override: Option<f64>,
    pub weak_convergence: bool,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            ps: vec![1.5, 2.0, 3.0],
            mesh_h: 0.02,
            oracle_h: 0.04,
            dt: 0.02,
            t: 0.1,
            gon: 64,
            classical_polygons: 20,
            seed: 0,
            tolerance_override: None,
            weak_convergence: true,
        }
    }
}

/// Random polygon with 5 to 11 facets whose normal gaps stay below π.
pub fn random_polygon(rng: &mut impl Rng) -> Result<Polytope> {
    let m = rng.random_range(5..12usize);
    let gaps: Vec<f64> = (0..m).map(|_| rng.random_range(0.3..1.0)).collect();
    let total: f64 = gaps.iter().sum();
    let theta0 = rng.random_range(0.0..2.0 * PI);
    let mut acc = 0.0;
    let normals = gaps
        .iter()
        .map(|g| {
            let d = Direction::from_angle(theta0 + 2.0 * PI * acc / total);
            acc += g;
            d
        })
        .collect();
    let heights = (0..m).map(|_| rng.random_range(0.5..1.5)).collect();
    wulff_shape(&SupportVector::new(normals, heights)?)
}

/// Runs every check in declaration order. Checks that cannot be evaluated
/// are reported as failures.
pub fn run_battery(cfg: &BatteryConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let disk = regular_polygon(cfg.gon);
    let square = regular_polygon(4);
    let diamond =
        SupportVector::new(uniform_circle(4, PI / 4.0), vec![1.0; 4]).and_then(|h| wulff_shape(&h));
    for &p_req in &cfg.ps {
        let p = handle_p_exception(p_req, 2);
        let ctx = CheckContext::new(p, 2, cfg.mesh_h);
        match oracle_check(p, cfg.gon, cfg.oracle_h) {
            Ok(r) => out.extend(r),
            Err(e) => out.push(CheckResult::failed(
                format!("oracle_p{p}"),
                0.02,
                ctx.clone(),
                &e,
            )),
        }
        let base = match disk
            .clone()
            .and_then(|d| FamilyBase::new(&d, p, cfg.mesh_h))
        {
            Ok(b) => b,
            Err(e) => {
                out.push(CheckResult::failed(
                    format!("family_base_p{p}"),
                    0.0,
                    ctx,
                    &e,
                ));
                continue;
            }
        };
        match scaling_check(&base, cfg.t) {
            Ok(r) => out.extend(r),
            Err(e) => out.push(CheckResult::failed(
                format!("scaling_p{p}"),
                0.02,
                ctx.clone(),
                &e,
            )),
        }
        let omega = base.omega.clone();
        out.push(hadamard_check(&base, &omega, cfg.dt).unwrap_or_else(|e| {
            CheckResult::failed(format!("hadamard_p{p}"), 0.05, ctx.clone(), &e)
        }));
        if let (Ok(q1), Ok(q2)) = (&square, &diamond) {
            out.push(
                selfadjoint_check(&base, q1, q2, cfg.dt).unwrap_or_else(|e| {
                    CheckResult::failed(format!("selfadjoint_p{p}"), 0.05, ctx.clone(), &e)
                }),
            );
        }
    }
    if cfg.weak_convergence {
        out.extend(weak_checks(cfg));
    }
    out.push(classical_check(cfg));
    if let Some(tol) = cfg.tolerance_override {
        out = out.into_iter().map(|r| r.with_tolerance(tol)).collect();
    }
    out
}

/// Mass gaps of the 8-, 16-, 32- and 64-gons against the 256-gon at `p = 2`.
fn weak_checks(cfg: &BatteryConfig) -> Vec<CheckResult> {
    let ctx = CheckContext::new(2.0, 2, cfg.mesh_h);
    let rows = [8, 16, 32, 64]
        .into_iter()
        .map(regular_polygon)
        .collect::<Result<Vec<_>>>()
        .and_then(|targets| {
            weak_convergence_probe(
                &targets,
                &regular_polygon(256)?,
                &ProbeConfig::new(2.0, cfg.mesh_h),
            )
        });
    match rows {
        Ok(rows) => {
            let growth = rows
                .windows(2)
                .map(|w| w[1].mass_gap / w[0].mass_gap)
                .fold(0.0, f64::max);
            let last = rows.last().map_or(f64::NAN, |r| r.mass_gap);
            vec![
                CheckResult::scaled(
                    "weak_gap_monotone",
                    growth,
                    0.0,
                    1.0,
                    1.1,
                    ctx.clone()
                        .with_note("largest ratio of consecutive mass gaps"),
                ),
                CheckResult::scaled("weak_gap_final", last, 0.0, 1.0, 0.01, ctx),
            ]
        }
        Err(e) => vec![CheckResult::failed("weak_convergence", 0.01, ctx, &e)],
    }
}

/// Largest Hausdorff distance between random centered polygons and the
/// classical solutions for their surface measures.
fn classical_check(cfg: &BatteryConfig) -> CheckResult {
    let ctx = CheckContext::new(2.0, 2, 0.0).with_note(format!(
        "{} random polygons, seed {}",
        cfg.classical_polygons, cfg.seed
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.classical_polygons {
        let mut run = || -> Result<f64> {
            let body = random_polygon(&mut rng)?;
            let body = body.translated(&-body.centroid().clone());
            let mu = SphericalMeasure::new(2, gauss_map_measure(&body)?)?;
            let out = solve_classical(&mu, &SolveConfig::default())?;
            hausdorff_distance(&body, &out.polytope, 256)
        };
        match run() {
            Ok(d) => worst = worst.max(d),
            Err(e) => return CheckResult::failed("classical_round_trip", 1e-6, ctx, &e),
        }
    }
    CheckResult::scaled("classical_round_trip", worst, 0.0, 1.0, 1e-6, ctx)
}

/// Fixed-width table, one row per check.
pub fn format_table(results: &[CheckResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<26} {:>6} {:>14} {:>14} {:>10} {:>10}  status",
        "check", "p", "measured", "expected", "error", "tol"
    );
    for r in results {
        let _ = writeln!(
            s,
            "{:<26} {:>6} {:>14.6e} {:>14.6e} {:>10.3e} {:>10.1e}  {}",
            r.name,
            r.context.p,
            r.measured,
            r.expected,
            r.rel_error,
            r.tolerance,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let _ = writeln!(s, "{passed}/{} passed", results.len());
    s
}
