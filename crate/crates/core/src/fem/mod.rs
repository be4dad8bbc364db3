//! P1 finite elements for the p-Laplace Dirichlet problem on a ring.
//!
//! The discrete solution minimizes the regularized energy
//! `Σ_T |T| (|∇w|² + ε²)^{p/2} / p` over continuous piecewise linear `w`
//! with `w = 0` on the polygon and prescribed values on the inner circle.
//! Each Picard (Kacanov) step freezes the weights `(|∇u|² + ε²)^{(p−2)/2}`,
//! solves the weighted Laplace problem by Jacobi-preconditioned CG and takes
//! the largest step in `2/p · (1, 1/2, 1/4, …)` that does not raise the energy.
//! `ε` starts at `eps0 · g` and halves whenever the increments stall, down to
//! `eps_min · g`, where `g = max|data| / ring width` is the gradient scale.

mod family;
mod sparse;

pub use family::{admissible_t, family_body, family_solve, FamilyMember};

use crate::mesh::{BoundaryTag, NodeKind, SimplicialMesh};
use crate::prelude::*;
use crate::{Error, Result};
use sparse::{pcg, Csr};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearch {
    /// Step factor applied on each rejected trial.
    pub shrink: f64,
    /// Smallest trial step before giving up on the direction.
    pub min_step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub p: f64,
    /// Initial regularization relative to the gradient scale.
    pub eps0: f64,
    /// Final regularization relative to the gradient scale.
    pub eps_min: f64,
    /// Relative H¹ increment at which the iteration stops.
    pub picard_tol: f64,
    pub max_picard: usize,
    pub damping: LineSearch,
    pub linear_tol: f64,
    pub max_linear: usize,
}

impl SolverConfig {
    pub fn new(p: f64) -> Self {
        SolverConfig {
            p,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidExponent(self.p));
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.eps_min) && positive(self.eps0) && self.eps_min <= self.eps0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < eps_min {} <= eps0 {}",
                self.eps_min, self.eps0
            )));
        }
        if !(positive(self.picard_tol) && positive(self.linear_tol)) || self.max_picard == 0 {
            return Err(Error::InvalidConfig(
                "tolerances and iteration caps must be positive".into(),
            ));
        }
        let ls = self.damping;
        if !(ls.shrink > 0.0 && ls.shrink < 1.0 && ls.min_step > 0.0 && ls.min_step < 1.0) {
            return Err(Error::InvalidConfig(
                "line search factors must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p: 2.0,
            eps0: 1e-3,
            eps_min: 1e-8,
            picard_tol: 1e-8,
            max_picard: 300,
            damping: LineSearch {
                shrink: 0.5,
                min_step: 1.0 / 64.0,
            },
            linear_tol: 1e-11,
            max_linear: 20_000,
        }
    }
}

/// One accepted Picard step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardStep {
    pub iteration: usize,
    pub energy: f64,
    /// Relative H¹ increment of the step.
    pub increment: f64,
    pub eps: f64,
    pub step: f64,
    pub linear_iterations: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub final_increment: f64,
    pub energy_history: Vec<f64>,
    pub steps: Vec<PicardStep>,
}

/// Discrete p-harmonic function on a ring mesh.
#[derive(Clone, Debug)]
pub struct PHarmSolution {
    mesh: Arc<SimplicialMesh>,
    pub nodal_values: Vec<f64>,
    pub element_gradients: Vec<[f64; 2]>,
    pub p: f64,
    pub eps_reg: f64,
    pub stats: SolveStats,
}

impl PHarmSolution {
    pub fn mesh(&self) -> &SimplicialMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<SimplicialMesh> {
        &self.mesh
    }
}

/// `|∇u|` on one outer boundary edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFlux {
    /// Index into [`SimplicialMesh::boundary`].
    pub element: usize,
    pub facet: usize,
    pub length: f64,
    /// Magnitude of the normal derivative.
    pub grad: f64,
    /// Magnitude of the tangential derivative.
    pub tangential: f64,
}

struct Element {
    area: f64,
    grads: [[f64; 2]; 3],
}

fn elements(mesh: &SimplicialMesh) -> Vec<Element> {
    let x = mesh.nodes();
    mesh.triangles()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| x[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            Element {
                area: 0.5 * det,
                grads: [
                    [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
                    [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
                    [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
                ],
            }
        })
        .collect()
}

fn gradient(e: &Element, t: &[usize; 3], u: &[f64]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for k in 0..3 {
        g[0] += u[t[k]] * e.grads[k][0];
        g[1] += u[t[k]] * e.grads[k][1];
    }
    g
}

struct Problem<'a> {
    mesh: &'a SimplicialMesh,
    elems: Vec<Element>,
    dof: Vec<Option<usize>>,
    free: Vec<usize>,
    matrix: Csr,
    slots: Vec<[usize; 9]>,
    p: f64,
}

impl<'a> Problem<'a> {
    fn new(mesh: &'a SimplicialMesh, p: f64) -> Self {
        let mut dof = vec![None; mesh.nodes().len()];
        let mut free = Vec::new();
        for (i, k) in mesh.node_kinds().iter().enumerate() {
            if *k == NodeKind::Interior {
                dof[i] = Some(free.len());
                free.push(i);
            }
        }
        let (matrix, slots) = Csr::pattern(mesh.triangles(), &dof, free.len());
        Problem {
            mesh,
            elems: elements(mesh),
            dof,
            free,
            matrix,
            slots,
            p,
        }
    }

    fn energy(&self, u: &[f64], eps: f64) -> f64 {
        let e2 = eps * eps;
        self.elems
            .iter()
            .zip(self.mesh.triangles())
            .map(|(e, t)| {
                let g = gradient(e, t, u);
                e.area * (g[0] * g[0] + g[1] * g[1] + e2).powf(self.p / 2.0) / self.p
            })
            .sum()
    }

    /// `(∫|∇v|², ∫|∇u|²)` with `v = a − b`.
    fn h1_seminorms(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let mut dv = 0.0;
        let mut du = 0.0;
        for (e, t) in self.elems.iter().zip(self.mesh.triangles()) {
            let ga = gradient(e, t, a);
            let gb = gradient(e, t, b);
            dv += e.area * ((ga[0] - gb[0]).powi(2) + (ga[1] - gb[1]).powi(2));
            du += e.area * (ga[0] * ga[0] + ga[1] * ga[1]);
        }
        (dv, du)
    }

    /// Minimizes `Σ |T| w_T |∇v|² / 2` over `v` agreeing with `u` on the
    /// boundary; the result overwrites a copy of `u`.
    fn weighted_solve(
        &mut self,
        u: &[f64],
        w: &[f64],
        cfg: &SolverConfig,
    ) -> Result<(Vec<f64>, usize)> {
        self.matrix.clear();
        let mut rhs = vec![0.0; self.free.len()];
        for (ti, t) in self.mesh.triangles().iter().enumerate() {
            let e = &self.elems[ti];
            let s = &self.slots[ti];
            for la in 0..3 {
                let Some(i) = self.dof[t[la]] else { continue };
                for lb in 0..3 {
                    let ga = e.grads[la];
                    let gb = e.grads[lb];
                    let k = e.area * w[ti] * (ga[0] * gb[0] + ga[1] * gb[1]);
                    match self.dof[t[lb]] {
                        Some(_) => self.matrix.vals[s[3 * la + lb]] += k,
                        None => rhs[i] -= k * u[t[lb]],
                    }
                }
            }
        }
        let mut x: Vec<f64> = self.free.iter().map(|&n| u[n]).collect();
        let iters = pcg(&self.matrix, &rhs, &mut x, cfg.linear_tol, cfg.max_linear)
            .ok_or_else(|| Error::LinearSolve(format!("CG did not reach {:e}", cfg.linear_tol)))?;
        let mut out = u.to_vec();
        for (k, &n) in self.free.iter().enumerate() {
            out[n] = x[k];
        }
        Ok((out, iters))
    }

    fn weights(&self, u: &[f64], eps: f64) -> Vec<f64> {
        let e2 = eps * eps;
        let q = (self.p - 2.0) / 2.0;
        self.elems
            .iter()
            .zip(self.mesh.triangles())
            .map(|(e, t)| {
                let g = gradient(e, t, u);
                (g[0] * g[0] + g[1] * g[1] + e2).powf(q)
            })
            .collect()
    }
}

/// Solves the Dirichlet problem with data `inner_data` on the inner circle
/// and zero on the outer polygon.
pub fn solve_dirichlet(
    mesh: Arc<SimplicialMesh>,
    inner_data: impl Fn([f64; 2]) -> f64,
    cfg: &SolverConfig,
) -> Result<PHarmSolution> {
    solve_with_guess(mesh, inner_data, None::<fn([f64; 2]) -> f64>, cfg)
}

/// As [`solve_dirichlet`], starting the iteration from `guess` at the free
/// nodes instead of the harmonic solution.
pub fn solve_with_guess(
    mesh: Arc<SimplicialMesh>,
    inner_data: impl Fn([f64; 2]) -> f64,
    guess: Option<impl Fn([f64; 2]) -> f64>,
    cfg: &SolverConfig,
) -> Result<PHarmSolution> {
    cfg.validate()?;
    let m = &*mesh;
    let mut u = vec![0.0; m.nodes().len()];
    let mut data_max: f64 = 0.0;
    for (i, k) in m.node_kinds().iter().enumerate() {
        match k {
            NodeKind::Inner => {
                let v = inner_data(m.nodes()[i]);
                if !v.is_finite() {
                    return Err(Error::InvalidConfig(format!("inner data {v} at node {i}")));
                }
                u[i] = v;
                data_max = data_max.max(v.abs());
            }
            NodeKind::Interior => {
                if let Some(g) = &guess {
                    u[i] = g(m.nodes()[i]);
                }
            }
            NodeKind::Outer => {}
        }
    }
    let c = m.center();
    let outer_nodes: Vec<&[f64; 2]> = m
        .nodes()
        .iter()
        .zip(m.node_kinds())
        .filter(|(_, k)| **k == NodeKind::Outer)
        .map(|(x, _)| x)
        .collect();
    let mean_r = outer_nodes
        .iter()
        .map(|x| (x[0] - c[0]).hypot(x[1] - c[1]))
        .sum::<f64>()
        / outer_nodes.len().max(1) as f64;
    let width = (mean_r - m.inner_radius()).max(f64::MIN_POSITIVE);
    let gscale = data_max / width;
    let eps_floor = cfg.eps_min * gscale;

    let mut prob = Problem::new(m, cfg.p);
    let mut stats = SolveStats::default();
    if data_max == 0.0 {
        return Ok(finish(
            mesh.clone(),
            &prob,
            vec![0.0; u.len()],
            cfg.p,
            eps_floor,
            stats,
        ));
    }
    let harmonic = cfg.p == 2.0;
    let mut eps = if harmonic {
        eps_floor
    } else {
        cfg.eps0 * gscale
    };
    if guess.is_none() || harmonic {
        let ones = vec![1.0; m.triangles().len()];
        let (v, iters) = prob.weighted_solve(&u, &ones, cfg)?;
        u = v;
        let energy = prob.energy(&u, eps);
        stats.energy_history.push(energy);
        stats.steps.push(PicardStep {
            iteration: 0,
            energy,
            increment: 1.0,
            eps,
            step: 1.0,
            linear_iterations: iters,
        });
    }
    if harmonic {
        stats.final_increment = 0.0;
        return Ok(finish(mesh.clone(), &prob, u, cfg.p, eps, stats));
    }

    let mut e_cur = prob.energy(&u, eps);
    let mut prev_inc = f64::INFINITY;
    for it in 1..=cfg.max_picard {
        let w = prob.weights(&u, eps);
        let (target, iters) = prob.weighted_solve(&u, &w, cfg)?;
        // The energy Hessian lies between A_w and (p − 1)·A_w (or the reverse
        // for p < 2), so 2/p is the optimal fixed relaxation of the step.
        let mut alpha = 2.0 / cfg.p;
        let mut trial: Vec<f64>;
        let mut e_trial;
        loop {
            trial = u
                .iter()
                .zip(&target)
                .map(|(a, b)| a + alpha * (b - a))
                .collect();
            e_trial = prob.energy(&trial, eps);
            if e_trial <= e_cur * (1.0 + 1e-14) {
                break;
            }
            alpha *= cfg.damping.shrink;
            if alpha < cfg.damping.min_step * 2.0 / cfg.p {
                alpha = 0.0;
                trial = u.clone();
                e_trial = e_cur;
                break;
            }
        }
        let (dv, du) = prob.h1_seminorms(&trial, &u);
        let inc = if du > 0.0 { (dv / du).sqrt() } else { 0.0 };
        u = trial;
        e_cur = e_trial;
        stats.iterations = it;
        stats.final_increment = inc;
        stats.energy_history.push(e_cur);
        stats.steps.push(PicardStep {
            iteration: it,
            energy: e_cur,
            increment: inc,
            eps,
            step: alpha,
            linear_iterations: iters,
        });
        let at_floor = eps <= eps_floor;
        if at_floor && inc <= cfg.picard_tol {
            return Ok(finish(mesh.clone(), &prob, u, cfg.p, eps, stats));
        }
        let stalled = inc > 0.95 * prev_inc;
        if !at_floor && (inc <= 100.0 * cfg.picard_tol || stalled) {
            eps = (eps / 2.0).max(eps_floor);
            e_cur = prob.energy(&u, eps);
            prev_inc = f64::INFINITY;
        } else {
            prev_inc = inc;
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_picard,
        last_increment: stats.final_increment,
        energy_history: stats.energy_history,
    })
}

fn finish(
    mesh: Arc<SimplicialMesh>,
    prob: &Problem<'_>,
    u: Vec<f64>,
    p: f64,
    eps: f64,
    stats: SolveStats,
) -> PHarmSolution {
    let element_gradients = prob
        .elems
        .iter()
        .zip(mesh.triangles())
        .map(|(e, t)| gradient(e, t, &u))
        .collect();
    PHarmSolution {
        mesh,
        nodal_values: u,
        element_gradients,
        p,
        eps_reg: eps,
        stats,
    }
}

/// Normal derivative on every outer boundary edge, from the gradient of the
/// adjacent triangle.
pub fn boundary_gradient(sol: &PHarmSolution) -> Vec<BoundaryFlux> {
    let m = sol.mesh();
    m.boundary()
        .iter()
        .enumerate()
        .filter_map(|(k, b)| {
            let BoundaryTag::Outer(facet) = b.tag else {
                return None;
            };
            let (p, q) = (m.nodes()[b.nodes[0]], m.nodes()[b.nodes[1]]);
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            let tan = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
            let g = sol.element_gradients[b.triangle];
            let along = g[0] * tan[0] + g[1] * tan[1];
            let normal = g[0] * tan[1] - g[1] * tan[0];
            Some(BoundaryFlux {
                element: k,
                facet,
                length: len,
                grad: normal.abs(),
                tangential: along.abs(),
            })
        })
        .collect()
}

/// P1 interpolant of the solution at `x`.
pub fn evaluate(sol: &PHarmSolution, x: [f64; 2]) -> Result<f64> {
    let m = sol.mesh();
    let (t, lam) = m.locate(x).ok_or(Error::OutOfDomain { x: x[0], y: x[1] })?;
    let tri = m.triangles()[t];
    Ok((0..3).map(|k| lam[k] * sol.nodal_values[tri[k]]).sum())
}

#[cfg(test)]
mod tests;
