//! Paired PSM-versus-superiorization experiment.
//!
//! PSM runs first, to its own stopping rule; the proximity of its output
//! becomes the target for the superiorized run, which stops at its first
//! iterate at least as constraint-compatible.

use std::time::Instant;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::image::ImageVector;
use crate::objective::tv_value;
use crate::psm::{run_psm, PsmRun, PsmStop};
use crate::superiorize::{run_superiorized, SuperiorizedRun};
use crate::system::SparseLinearSystem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub epsilon_used: f64,
    pub psm_tv: f64,
    pub psm_seconds: f64,
    pub psm_iterations: usize,
    pub sm_tv: f64,
    pub sm_seconds: f64,
    pub sm_iterations: usize,
    pub sm_converged: bool,
    pub speedup_ratio: f64,
    pub failure: Option<String>,
}

impl ComparisonReport {
    /// Two-row text table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("epsilon = {:.6e}\n", self.epsilon_used));
        s.push_str("solver  TV value        time (s)    iterations\n");
        s.push_str(&format!(
            "PSM     {:<15.6} {:<11.3} {}\n",
            self.psm_tv, self.psm_seconds, self.psm_iterations
        ));
        s.push_str(&format!(
            "SM      {:<15.6} {:<11.3} {}\n",
            self.sm_tv, self.sm_seconds, self.sm_iterations
        ));
        s.push_str(&format!("speedup {:.2}x\n", self.speedup_ratio));
        if let Some(f) = &self.failure {
            s.push_str(&format!("note: {f}\n"));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: ComparisonReport,
    pub psm: PsmRun,
    pub sm: SuperiorizedRun,
}

fn failure_note(psm: &PsmRun, sm: &SuperiorizedRun) -> Option<String> {
    let mut notes = Vec::new();
    if psm.stop == PsmStop::IterationCap {
        notes.push("PSM hit its iteration cap before the stopping rule fired".to_string());
    }
    if let Some(r) = sm.outcome.failure() {
        notes.push(format!("superiorized run failed: {}", r.as_str()));
    }
    (!notes.is_empty()).then(|| notes.join("; "))
}

/// Runs PSM then SM from the zero image of shape `rows x cols`.
pub fn run_comparison(system: &SparseLinearSystem, rows: usize, cols: usize, config: &RunConfig) -> Result<Comparison> {
    let x0 = ImageVector::zeros(rows, cols);
    system.check_len(x0.len())?;

    let clock = Instant::now();
    let psm = run_psm(system, config.bounds, &x0, config)?;
    let psm_seconds = clock.elapsed().as_secs_f64();
    let epsilon = psm.achieved_epsilon;

    let clock = Instant::now();
    // a zero target cannot be chased; fall back to the smallest positive value
    let sm = run_superiorized(system, config.bounds, &x0, config, epsilon.max(f64::MIN_POSITIVE))?;
    let sm_seconds = clock.elapsed().as_secs_f64();

    let report = ComparisonReport {
        epsilon_used: epsilon,
        psm_tv: tv_value(&psm.x),
        psm_seconds,
        psm_iterations: psm.state.k,
        sm_tv: tv_value(sm.outcome.iterate()),
        sm_seconds,
        sm_iterations: sm.outcome.index(),
        sm_converged: sm.outcome.is_converged(),
        speedup_ratio: psm_seconds / sm_seconds.max(f64::MIN_POSITIVE),
        failure: failure_note(&psm, &sm),
    };
    Ok(Comparison { report, psm, sm })
}
