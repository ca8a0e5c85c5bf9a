//! Total-variation reconstruction from parallel-beam CT data by two routes:
//! superiorized ART, which interlaces TV-reducing perturbations into
//! feasibility-seeking sweeps, and the projected subgradient method, which
//! projects onto the full constraint set at every step.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod compare;
pub mod config;
pub mod error;
pub mod feasibility;
pub mod geometry;
pub mod image;
pub mod objective;
pub mod outcome;
pub mod psm;
pub mod scenario;
pub mod superiorize;
pub mod system;
pub mod trace;

pub use bounds::BoxBounds;
pub use compare::{run_comparison, Comparison, ComparisonReport};
pub use config::{ConfigDocument, RunConfig};
pub use error::{Error, Result};
pub use feasibility::{
    apply_operator, art_row_update, box_project, run_basic_algorithm, AlgorithmicOperator, ArtSweep, BasicRun,
};
pub use geometry::{build_system, trace_ray, Ellipse, GridSpec, PhantomSpec, ScanGeometry};
pub use image::ImageVector;
pub use objective::{nonascending_direction, tv_gradient, tv_subgradient, tv_value, NonascendingDirection, TVGradient};
pub use outcome::{EpsilonOutput, FailureReason, Outcome, RunFailure};
pub use psm::{project_onto_c, run_psm, PsmRun, PsmStop};
pub use scenario::{Scenario, SolverSetup};
pub use superiorize::{run_superiorized, PerturbationRecord, PerturbationSchedule, SuperiorizedRun};
pub use system::{SparseLinearSystem, SparseRow};
pub use trace::{IterationTrace, RunSummary, TraceRecord};
