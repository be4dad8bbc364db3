//! Mesh dumps, PDE statistics, run records and verification reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use pharmink_core::fem::SolveStats;
use pharmink_core::solver::{GeneralOutcome, SolveOutcome};
use pharmink_core::{BoundaryTag, CheckResult, SimplicialMesh};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{io_err, Result};
use crate::formats::{MeasureFile, PolytopeFile};

/// Plain-text mesh dump, nodes shifted by `offset`.
///
/// ```text
/// # pharmink ring mesh
/// # nodes: index x y kind          kind: interior | outer | inner
/// # triangles: index a b c         counter-clockwise node indices
/// # boundary: index a b tag tri    tag: outer:<facet> | inner
/// nodes N
/// ...
/// triangles T
/// ...
/// boundary B
/// ...
/// ```
pub fn mesh_dump(mesh: &SimplicialMesh, offset: [f64; 2]) -> String {
    let mut s = String::new();
    s.push_str("# pharmink ring mesh\n");
    s.push_str("# nodes: index x y kind          kind: interior | outer | inner\n");
    s.push_str("# triangles: index a b c         counter-clockwise node indices\n");
    s.push_str("# boundary: index a b tag tri    tag: outer:<facet> | inner\n");
    let _ = writeln!(s, "nodes {}", mesh.nodes().len());
    for (i, (x, kind)) in mesh.nodes().iter().zip(mesh.node_kinds()).enumerate() {
        let kind = format!("{kind:?}").to_lowercase();
        let _ = writeln!(s, "{i} {:.16e} {:.16e} {kind}", x[0] + offset[0], x[1] + offset[1]);
    }
    let _ = writeln!(s, "triangles {}", mesh.triangles().len());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(s, "{i} {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "boundary {}", mesh.boundary().len());
    for (i, b) in mesh.boundary().iter().enumerate() {
        let tag = match b.tag {
            BoundaryTag::Outer(f) => format!("outer:{f}"),
            BoundaryTag::Inner => "inner".into(),
        };
        let _ = writeln!(s, "{i} {} {} {tag} {}", b.nodes[0], b.nodes[1], b.triangle);
    }
    s
}

/// One row per Picard step: `iteration,energy,residual,eps`, where the
/// residual is the relative H¹ increment of the step.
pub fn stats_csv(stats: &SolveStats) -> String {
    let mut s = String::from("iteration,energy,residual,eps\n");
    for st in &stats.steps {
        let _ = writeln!(s, "{},{:e},{:e},{:e}", st.iteration, st.energy, st.increment, st.eps);
    }
    s
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

/// One evaluated iterate; values of failed evaluations are `None`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationEntry {
    pub iteration: usize,
    pub residual: Option<f64>,
    pub gamma: Option<f64>,
    pub step: f64,
    pub accepted: bool,
    pub heights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub converged: bool,
    pub residual: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub p_requested: f64,
    pub p_effective: f64,
    pub amplitude: f64,
    pub ring_center: Vec<f64>,
    pub center_defect: Vec<f64>,
    pub perturbed: bool,
    pub repairs: usize,
    pub polytope: PolytopeFile,
    /// Achieved masses on the target directions.
    pub measure: MeasureFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageEntry {
    pub m: usize,
    pub converged: bool,
    pub residual: f64,
    pub hausdorff_to_previous: Option<f64>,
}

/// Everything a `solve` run produced, including a failure that cut it short.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub iterations: Vec<IterationEntry>,
    pub stages: Vec<StageEntry>,
    pub outcome: Option<OutcomeEntry>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn new(config: RunConfig) -> Self {
        RunRecord {
            config,
            iterations: Vec::new(),
            stages: Vec::new(),
            outcome: None,
            error: None,
        }
    }

    pub fn with_outcome(mut self, o: &SolveOutcome) -> Self {
        self.iterations = o
            .history
            .iter()
            .map(|r| IterationEntry {
                iteration: r.iteration,
                residual: finite(r.residual),
                gamma: finite(r.gamma),
                step: r.step,
                accepted: r.accepted,
                heights: r.heights.clone(),
            })
            .collect();
        let d = &o.diagnostics;
        self.outcome = Some(OutcomeEntry {
            converged: o.converged,
            residual: o.residual,
            gamma: o.gamma,
            iterations: o.iterations,
            p_requested: d.p_requested,
            p_effective: d.p_effective,
            amplitude: d.amplitude,
            ring_center: d.ring_center.as_slice().to_vec(),
            center_defect: d.center_defect.as_slice().to_vec(),
            perturbed: d.perturbed,
            repairs: d.repairs.len(),
            polytope: PolytopeFile::from_polytope(&o.polytope),
            measure: MeasureFile::from_atom_map(o.polytope.dim(), &o.mu_p),
        });
        self
    }

    /// Stage table of a scheduled run; the finest completed stage becomes
    /// the outcome and an early failure the error.
    pub fn with_general(mut self, g: &GeneralOutcome) -> Self {
        self.stages = g
            .stages
            .iter()
            .map(|s| StageEntry {
                m: s.m,
                converged: s.outcome.converged,
                residual: s.outcome.residual,
                hausdorff_to_previous: s.hausdorff_to_previous,
            })
            .collect();
        if let Some(f) = g.finest() {
            self = self.with_outcome(f);
        }
        if let Some(e) = &g.failure {
            self.error = Some(e.to_string());
        }
        self
    }

    pub fn with_error(mut self, e: impl std::fmt::Display) -> Self {
        self.error = Some(e.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckContextEntry {
    pub p: f64,
    pub n: usize,
    pub mesh_h: f64,
    pub dt: Option<f64>,
    pub note: Option<String>,
}

/// One verification result; non-finite values serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub measured: Option<f64>,
    pub expected: Option<f64>,
    pub rel_error: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub context: CheckContextEntry,
}

impl From<&CheckResult> for CheckEntry {
    fn from(r: &CheckResult) -> Self {
        CheckEntry {
            name: r.name.clone(),
            measured: finite(r.measured),
            expected: finite(r.expected),
            rel_error: finite(r.rel_error),
            tolerance: r.tolerance,
            passed: r.passed,
            context: CheckContextEntry {
                p: r.context.p,
                n: r.context.n,
                mesh_h: r.context.mesh_h,
                dt: r.context.dt,
                note: r.context.note.clone(),
            },
        }
    }
}

pub fn verify_json(results: &[CheckResult]) -> Result<String> {
    let entries: Vec<CheckEntry> = results.iter().map(CheckEntry::from).collect();
    crate::formats::to_json(&entries)
}
