use crate::geom::{DegeneracyReport, MeasureConditions};
use crate::prelude::*;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("half-space intersection is unbounded (normals do not positively span)")]
    Unbounded,

    #[error("degenerate body (thickness {:.3e})", .0.thickness)]
    Degenerate(DegeneracyReport),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("origin is not interior to the body")]
    OriginNotInterior,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure has no mass")]
    EmptyMeasure,

    #[error("need at least {min} atoms, got {got}")]
    TooFewAtoms { got: usize, min: usize },

    #[error("antipodal perturbation failed at eps={eps:e}: {reason}; try a smaller eps")]
    PerturbationFailed { eps: f64, reason: String },

    #[error("measure is not admissible (spans={}, centered={})", .0.spans, .0.centered)]
    Inadmissible(MeasureConditions),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error(
        "mesh size {h:e} cannot resolve facet {facet} of length {length:e} with {min_edges} edges"
    )]
    MeshTooCoarse {
        facet: usize,
        length: f64,
        h: f64,
        min_edges: usize,
    },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("exponent p={0} outside (1, inf)")]
    InvalidExponent(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last increment {last_increment:e})")]
    NonConvergence {
        iterations: usize,
        last_increment: f64,
        energy_history: Vec<f64>,
    },

    #[error("linear solver failed: {0}")]
    LinearSolve(String),

    #[error("point ({x}, {y}) lies outside the mesh")]
    OutOfDomain { x: f64, y: f64 },

    #[error("family parameter t={t} outside admissible range |t| <= {tau}")]
    FamilyParameter { t: f64, tau: f64 },

    #[error("boundary tag does not match facet {0}")]
    TagMismatch(usize),

    #[error("atom directions of the two measures differ")]
    DirectionMismatch,

    #[error("degeneracy persisted after {0} repairs")]
    PersistentDegeneracy(usize),

    #[error("empty discretization schedule")]
    EmptySchedule,

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn stage(stage: impl Into<String>, source: Error) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(source),
        }
    }
}
