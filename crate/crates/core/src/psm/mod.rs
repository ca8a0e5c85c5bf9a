//! Projected subgradient minimization of TV over `{Ax = b} ∩ box`.
//!
//! Each outer step takes a normalized subgradient step and projects the
//! result onto the feasible set. The projection is computed through its
//! Lagrangian dual, maximized with an accelerated gradient method with
//! backtracking.

mod dual;
mod run;

pub use dual::{
    dual_objective, nesterov_beta_next, project_onto_c, project_onto_c_from, DualState, DualValue,
    ProjectionResult, ProjectionSettings,
};
pub use run::{run_psm, InnerSolveStats, PsmRun, PsmState, PsmStop};
