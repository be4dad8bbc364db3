use nalgebra::DVector;

use super::{
    handle_p_exception, Diagnostics, FdCheck, IterationRecord, PdeRecord, RepairEvent, RepairKind,
    SolveConfig, SolveOutcome, UpdateMode,
};
use crate::fem::{PHarmSolution, SolverConfig};
use crate::geom::{
    check_measure_conditions, perturb_antipodal, support_function, wulff_shape, Direction,
    Polytope, SphericalMeasure, SupportVector,
};
use crate::measure::{gamma, pharm_measure, residual, solution_about, MeasureAtomMap};
use crate::mesh::{MeshLayout, MeshOptions};
use crate::prelude::*;
use crate::{Error, Result};

/// Fixed-point or gradient solve from the unit-height start.
///
/// The target must span and be centered; antipodal atoms are rotated apart
/// by `cfg.antipodal_eps` first. Returns the best iterate with
/// `converged = false` when the tolerances are not met.
pub fn solve_discrete(mu: &SphericalMeasure, cfg: &SolveConfig) -> Result<SolveOutcome> {
    solve_discrete_from(mu, cfg, None)
}

/// As [`solve_discrete`], starting from the support values of `start` at
/// the atom directions; `start` is re-centered first unless it contains the
/// origin.
pub fn solve_discrete_from(
    mu: &SphericalMeasure,
    cfg: &SolveConfig,
    start: Option<&Polytope>,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let cond = check_measure_conditions(mu);
    if !(cond.spans && cond.centered) {
        return Err(Error::Inadmissible(cond));
    }
    let perturbed = !cond.antipodal_pairs.is_empty();
    let target = if perturbed {
        perturb_antipodal(mu, cfg.antipodal_eps)?
    } else {
        mu.clone()
    };
    let p_eff = handle_p_exception(cfg.p, mu.dim());
    let mut run = Run::new(&target, cfg, p_eff);
    run.diag.perturbed = perturbed;
    let h0 = match start {
        Some(body) => {
            let support = |b: &Polytope| {
                run.normals
                    .iter()
                    .map(|xi| support_function(b, xi.as_vector()))
                    .collect::<Result<Vec<_>>>()
            };
            let h = support(body)?;
            if h.iter().all(|x| *x > 0.0) {
                h
            } else {
                support(&body.translated(&-body.centroid().clone()))?
            }
        }
        None => vec![1.0; run.normals.len()],
    };
    let last = match cfg.mode {
        UpdateMode::FixedPoint => run.fixed_point(h0)?,
        UpdateMode::Gradient { fd_every } => run.gradient(h0, fd_every)?,
    };
    run.finish(last, &target)
}

/// A solved iterate with unit inner data on a circle about the origin.
struct Eval {
    heights: Vec<f64>,
    body: Polytope,
    /// Atoms on the target directions.
    masses: Vec<f64>,
}

impl Eval {
    fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    fn gamma_unit(&self) -> f64 {
        self.heights
            .iter()
            .zip(&self.masses)
            .map(|(h, a)| h * a)
            .sum()
    }
}

struct Run<'a> {
    cfg: &'a SolveConfig,
    fem: SolverConfig,
    normals: Vec<Direction>,
    c: Vec<f64>,
    c_total: f64,
    dim: usize,
    p: f64,
    layout: Option<MeshLayout>,
    /// Inner radius over the mean support value `Σ c_i h_i / Σ c_i`.
    rho_rel: Option<f64>,
    /// The most recent PDE solve.
    last: Option<PHarmSolution>,
    diag: Diagnostics,
    history: Vec<IterationRecord>,
    iteration: usize,
}

impl<'a> Run<'a> {
    fn new(target: &SphericalMeasure, cfg: &'a SolveConfig, p: f64) -> Self {
        Run {
            cfg,
            fem: SolverConfig {
                p,
                ..cfg.fem.clone()
            },
            normals: target.directions(),
            c: target.weights(),
            c_total: target.total_mass(),
            dim: target.dim(),
            p,
            layout: None,
            rho_rel: None,
            last: None,
            diag: Diagnostics::new(cfg.p, p, target.dim()),
            history: Vec::new(),
            iteration: 0,
        }
    }

    fn mesh_options(&self, body: &Polytope) -> MeshOptions {
        let d = body.boundary_distance(&DVector::zeros(2));
        let shortest = body
            .facets()
            .iter()
            .map(|f| f.area)
            .fold(f64::INFINITY, f64::min);
        let base = self.cfg.mesh_h_rel * d;
        MeshOptions {
            min_edges: 1,
            ..MeshOptions::with_h(base.min((0.5 * shortest).max(0.25 * base)))
        }
    }

    /// Wulff shape of `h` with every target direction active, repairing
    /// slabs and missing facets.
    fn body_of(&mut self, mut h: Vec<f64>) -> Result<(Vec<f64>, Polytope)> {
        let mut repairs = 0;
        loop {
            let body = wulff_shape(&SupportVector::new(self.normals.clone(), h.clone())?)?;
            let kind = match body.degeneracy() {
                Some(report) => {
                    let opposed = self.most_opposed(report.slab_normal.as_ref());
                    for &i in &opposed {
                        h[i] *= 1.1;
                    }
                    Some(RepairKind::Slab { grown: opposed })
                }
                None => {
                    let missing: Vec<usize> =
                        (0..h.len()).filter(|&i| !body.is_active(i)).collect();
                    for &i in &missing {
                        h[i] = 0.97 * support_function(&body, self.normals[i].as_vector())?;
                    }
                    (!missing.is_empty()).then_some(RepairKind::InactiveFacets(missing))
                }
            };
            match kind {
                None => return Ok((h, body)),
                Some(kind) => {
                    if repairs == self.cfg.max_repairs {
                        return Err(Error::PersistentDegeneracy(repairs));
                    }
                    repairs += 1;
                    self.diag.repairs.push(RepairEvent {
                        iteration: self.iteration,
                        kind,
                    });
                }
            }
        }
    }

    fn most_opposed(&self, slab: Option<&Direction>) -> [usize; 2] {
        let m = self.normals.len();
        if let Some(s) = slab {
            let along = |i: &usize| self.normals[*i].dot(s.as_vector());
            let hi = (0..m)
                .max_by(|a, b| along(a).total_cmp(&along(b)))
                .unwrap_or(0);
            let lo = (0..m)
                .min_by(|a, b| along(a).total_cmp(&along(b)))
                .unwrap_or(0);
            return [hi, lo];
        }
        let mut best = ([0, 0], f64::INFINITY);
        for i in 0..m {
            for j in i + 1..m {
                let d = self.normals[i].dot(self.normals[j].as_vector());
                if d < best.1 {
                    best = ([i, j], d);
                }
            }
        }
        best.0
    }

    fn eval(&mut self, h: Vec<f64>) -> Result<Eval> {
        let (h, body) = self.body_of(h)?;
        let mu = self.solve_on(&body, &h, 1.0)?;
        Ok(Eval {
            heights: h,
            body,
            masses: mu.masses,
        })
    }

    /// Solves with data `value` on the circle about the origin whose radius
    /// follows the mean support value, which is smooth in `h` and blind to
    /// translations.
    fn solve_on(&mut self, body: &Polytope, h: &[f64], value: f64) -> Result<MeasureAtomMap> {
        let dist = body.boundary_distance(&DVector::zeros(2));
        let mean_h = dot(&self.c, h) / self.c_total;
        let rel = *self.rho_rel.get_or_insert(self.cfg.shrink * dist / mean_h);
        let rho = (rel * mean_h).min(0.9 * dist);
        let opts = self.mesh_options(body);
        let (sol, layout) = solution_about(
            body,
            [0.0, 0.0],
            rho,
            value,
            &opts,
            self.layout.as_ref(),
            &self.fem,
        )?;
        self.diag.pde.push(PdeRecord {
            iterations: sol.stats.iterations,
            final_increment: sol.stats.final_increment,
            triangles: sol.mesh().triangles().len(),
        });
        self.layout.get_or_insert(layout);
        let mu = pharm_measure(body, &sol)?.on_normals(&self.normals);
        self.last = Some(sol);
        mu
    }

    /// `Σ |a_i s − c_i| / Σ c` with `s` matching the total masses.
    fn share_residual(&self, e: &Eval) -> f64 {
        let s = self.c_total / e.total();
        e.masses
            .iter()
            .zip(&self.c)
            .map(|(a, c)| (a * s - c).abs())
            .sum::<f64>()
            / self.c_total
    }

    /// Dilation bringing `Γ` to 1 once the masses are matched to the target.
    fn unit_dilation(&self, e: &Eval) -> f64 {
        e.total() / (self.c_total * e.gamma_unit())
    }

    fn record(&mut self, e: Option<&Eval>, step: f64, accepted: bool) {
        let (residual, gamma, heights) = match e {
            Some(e) => (self.share_residual(e), e.gamma_unit(), e.heights.clone()),
            None => (f64::NAN, f64::NAN, Vec::new()),
        };
        self.history.push(IterationRecord {
            iteration: self.iteration,
            residual,
            gamma,
            step,
            heights,
            accepted,
        });
    }

    fn fixed_point(&mut self, h0: Vec<f64>) -> Result<Eval> {
        let cfg = self.cfg;
        let mut cur = self.eval(h0)?;
        let mut cur_res = self.share_residual(&cur);
        self.record(Some(&cur), 0.0, true);
        let mut damping = cfg.gamma0;
        while cur_res > cfg.tol && self.iteration < cfg.max_iter && damping >= cfg.gamma_min {
            self.iteration += 1;
            let lam = self.unit_dilation(&cur);
            let total = cur.total();
            let trial: Vec<f64> = (0..cur.masses.len())
                .map(|i| {
                    let target = self.c[i] / self.c_total;
                    let share = (cur.masses[i] / total).max(cfg.share_floor * target);
                    lam * cur.heights[i] * (share / target).powf(damping)
                })
                .collect();
            match self.eval(trial) {
                Ok(t) => {
                    let r = self.share_residual(&t);
                    let accepted = r <= cur_res;
                    self.record(Some(&t), damping, accepted);
                    if accepted {
                        cur = t;
                        cur_res = r;
                        damping = (1.5 * damping).min(cfg.gamma0);
                    } else {
                        damping *= 0.5;
                    }
                }
                Err(Error::NonConvergence { .. } | Error::Degenerate(_) | Error::PersistentDegeneracy(_)) => {
                    self.record(None, damping, false);
                    damping *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(cur)
    }

    fn gradient(&mut self, h0: Vec<f64>, fd_every: usize) -> Result<Eval> {
        let cfg = self.cfg;
        let k = self.dim as f64 - self.p + 1.0;
        if k.abs() < 0.05 {
            return Err(Error::InvalidConfig(format!(
                "gradient mode needs |n − p + 1| >= 0.05, got {k}"
            )));
        }
        // Dilating by Γ^{−1/k} gives Γ = 1 at unit inner data.
        let normalize = |e: &Eval| e.gamma_unit().powf(-1.0 / k);
        let objective = |c: &[f64], e: &Eval| {
            normalize(e) * c.iter().zip(&e.heights).map(|(c, h)| c * h).sum::<f64>()
        };
        const MAX_STEP: f64 = 0.2;
        let mut cur = self.eval(h0)?;
        let mut cur_j = objective(&self.c, &cur);
        self.record(Some(&cur), 0.0, true);
        let mut corr = self.fd_check(&cur, k)?;
        let mut fresh = true;
        let mut step = MAX_STEP;
        let mut accepted_steps = 0;
        while self.share_residual(&cur) > cfg.tol && self.iteration < cfg.max_iter {
            if step < 1e-4 && fresh {
                break;
            }
            if step < MAX_STEP / 16.0 && !fresh {
                // A stale correction can point uphill; measure again here.
                corr = self.fd_check(&cur, k)?;
                fresh = true;
                step = MAX_STEP;
            }
            self.iteration += 1;
            let lam = normalize(&cur);
            let h: Vec<f64> = cur.heights.iter().map(|x| lam * x).collect();
            // Masses of the dilated body scale by λ^{n−p}.
            let scale = lam.powf(self.dim as f64 - self.p);
            let grad: Vec<f64> = (0..h.len())
                .map(|i| k * scale * cur.masses[i] * corr[i])
                .collect();
            let proj = dot(&self.c, &grad) / dot(&grad, &grad);
            let g: Vec<f64> = self
                .c
                .iter()
                .zip(&grad)
                .map(|(c, d)| c - proj * d)
                .collect();
            let gmax = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if gmax == 0.0 {
                break;
            }
            let mean_h = h.iter().sum::<f64>() / h.len() as f64;
            let trial: Vec<f64> = h
                .iter()
                .zip(&g)
                .map(|(h, g)| h - step * mean_h * g / gmax)
                .collect();
            if trial.iter().any(|x| *x <= 0.0) {
                self.record(None, step, false);
                step *= 0.5;
                continue;
            }
            match self.eval(trial) {
                Ok(t) => {
                    let j = objective(&self.c, &t);
                    let accepted = j < cur_j;
                    self.record(Some(&t), step, accepted);
                    if accepted {
                        cur = t;
                        cur_j = j;
                        step = (1.5 * step).min(MAX_STEP);
                        accepted_steps += 1;
                        fresh = accepted_steps % fd_every == 0;
                        if fresh {
                            corr = self.fd_check(&cur, k)?;
                        }
                    } else {
                        step *= 0.5;
                    }
                }
                Err(Error::NonConvergence { .. } | Error::Degenerate(_) | Error::PersistentDegeneracy(_)) => {
                    self.record(None, step, false);
                    step *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(cur)
    }

    /// Central differences of `Γ` at unit inner data against the surrogate;
    /// returns per-direction correction factors.
    fn fd_check(&mut self, cur: &Eval, k: f64) -> Result<Vec<f64>> {
        let m = cur.heights.len();
        let mut fd = Vec::with_capacity(m);
        for i in 0..m {
            let delta = 1e-3 * cur.heights[i];
            let mut plus = cur.heights.clone();
            plus[i] += delta;
            let mut minus = cur.heights.clone();
            minus[i] -= delta;
            let gp = self.eval(plus)?.gamma_unit();
            let gm = self.eval(minus)?.gamma_unit();
            fd.push((gp - gm) / (2.0 * delta));
        }
        let surrogate: Vec<f64> = cur.masses.iter().map(|a| k * a).collect();
        let norm = surrogate.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let max_rel_error = fd
            .iter()
            .zip(&surrogate)
            .map(|(f, s)| (f - s).abs() / norm)
            .fold(0.0, f64::max);
        let corr = fd
            .iter()
            .zip(&surrogate)
            .map(|(f, s)| {
                if *s != 0.0 {
                    (f / s).clamp(0.05, 20.0)
                } else {
                    1.0
                }
            })
            .collect();
        self.diag.fd_checks.push(FdCheck {
            iteration: self.iteration,
            surrogate,
            finite_difference: fd,
            max_rel_error,
        });
        Ok(corr)
    }

    /// Dilates to `Γ = 1`, picks the inner data matching the total mass and
    /// re-solves on the output body.
    fn finish(mut self, cur: Eval, target: &SphericalMeasure) -> Result<SolveOutcome> {
        let lam = self.unit_dilation(&cur);
        let body = cur.body.scaled(lam);
        let heights: Vec<f64> = cur.heights.iter().map(|h| lam * h).collect();
        // Masses scale by λ^{n−p} under dilation and by κ^{p−1} with the data.
        let dilated_total = lam.powf(self.dim as f64 - self.p) * cur.total();
        let kappa = (self.c_total / dilated_total).powf(1.0 / (self.p - 1.0));
        let mu_p = self.solve_on(&body, &heights, kappa)?;
        let g = gamma(&body, &mu_p).value;
        let res = residual(&mu_p, target)?;
        self.diag.amplitude = kappa;
        self.diag.center_defect = mu_p.center_defect.clone();
        let c = body.centroid().clone();
        self.diag.ring_center = -&c;
        Ok(SolveOutcome {
            converged: res <= self.cfg.tol && (g - 1.0).abs() <= self.cfg.gamma_tol,
            polytope: body.translated(&-c),
            mu_p,
            residual: res,
            gamma: g,
            iterations: self.iteration,
            history: self.history,
            diagnostics: self.diag,
            solution: self.last,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
