use super::{solve_discrete_from, SolveConfig, SolveOutcome};
use crate::geom::{discretize_measure, hausdorff_distance, Direction};
use crate::prelude::*;
use crate::{Error, Result};

/// One entry of the atom-count schedule.
#[derive(Clone, Debug)]
pub struct ScheduleStage {
    pub m: usize,
    pub outcome: SolveOutcome,
    /// Hausdorff distance to the previous stage's body.
    pub hausdorff_to_previous: Option<f64>,
}

/// Results of every completed stage and the failure that ended the run early.
#[derive(Clone, Debug)]
pub struct GeneralOutcome {
    pub stages: Vec<ScheduleStage>,
    pub failure: Option<Error>,
}

impl GeneralOutcome {
    /// The last completed stage.
    pub fn finest(&self) -> Option<&SolveOutcome> {
        self.stages.last().map(|s| &s.outcome)
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Discretizes `density` with each atom count of `schedule` in turn and
/// solves, warm-starting from the previous body.
pub fn solve_general(
    dim: usize,
    density: impl Fn(&Direction) -> f64,
    schedule: &[usize],
    cfg: &SolveConfig,
) -> Result<GeneralOutcome> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let mut stages: Vec<ScheduleStage> = Vec::new();
    let mut failure = None;
    for &m in schedule {
        let mu = match discretize_measure(dim, &density, m) {
            Ok(mu) => mu,
            Err(e) => {
                failure = Some(Error::stage(format!("discretize m = {m}"), e));
                break;
            }
        };
        let prev = stages.last().map(|s| &s.outcome.polytope);
        // Warm start in the previous stage's circle-centered frame.
        let start = stages.last().map(|s| {
            s.outcome
                .polytope
                .translated(&-&s.outcome.diagnostics.ring_center)
        });
        let outcome = match solve_discrete_from(&mu, cfg, start.as_ref()) {
            Ok(o) => o,
            Err(e) => {
                failure = Some(Error::stage(format!("solve m = {m}"), e));
                break;
            }
        };
        let hausdorff_to_previous = match prev {
            Some(p) => Some(hausdorff_distance(p, &outcome.polytope, 256)?),
            None => None,
        };
        stages.push(ScheduleStage {
            m,
            outcome,
            hausdorff_to_previous,
        });
    }
    Ok(GeneralOutcome { stages, failure })
}
