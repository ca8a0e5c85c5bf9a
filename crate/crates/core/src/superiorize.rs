//! Superiorized version of the ART feasibility-seeking loop.
//!
//! Between consecutive sweeps the iterate receives `N` perturbations along
//! TV-nonascending directions. The step of each perturbation is drawn from the
//! geometric schedule `eta_l = a^l`; draws continue (with `l` never reset)
//! until the perturbed point's TV does not exceed the TV of the iterate the
//! sweep started from.

use std::time::Instant;

use crate::bounds::BoxBounds;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::feasibility::{AlgorithmicOperator, ArtSweep};
use crate::image::ImageVector;
use crate::objective::{nonascending_direction_slice, tv_value_slice};
use crate::outcome::{EpsilonOutput, FailureReason, Outcome, RunFailure};
use crate::system::SparseLinearSystem;
use crate::trace::IterationTrace;

/// Geometric step schedule `eta_l = a^l` with a cursor that only advances.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSchedule {
    eta_base: f64,
    ell: i64,
}

impl PerturbationSchedule {
    pub fn new(eta_base: f64) -> Result<Self> {
        if !(eta_base > 0.0 && eta_base < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "schedule base must lie in (0, 1), got {eta_base}"
            )));
        }
        Ok(Self { eta_base, ell: -1 })
    }

    pub fn eta_base(&self) -> f64 {
        self.eta_base
    }

    /// Index of the last value handed out; `-1` before the first draw.
    pub fn ell(&self) -> i64 {
        self.ell
    }

    /// Sum of the whole schedule, `1 / (1 - a)`.
    pub fn total_mass(&self) -> f64 {
        1.0 / (1.0 - self.eta_base)
    }

    pub fn next_beta(&mut self) -> f64 {
        self.ell += 1;
        match i32::try_from(self.ell) {
            Ok(e) => self.eta_base.powi(e),
            Err(_) => self.eta_base.powf(self.ell as f64),
        }
    }
}

/// One accepted perturbation `y^{k,n+1} = y^{k,n} + beta * v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationRecord {
    pub k: usize,
    pub n: usize,
    pub ell: i64,
    pub beta: f64,
    pub direction_norm: f64,
    /// TV of the accepted point.
    pub phi_candidate: f64,
    /// TV of the sweep's starting iterate `y^k`.
    pub phi_anchor: f64,
    /// Schedule draws spent on this acceptance.
    pub draws: usize,
}

#[derive(Debug, Clone)]
pub struct SuperiorizedRun {
    pub outcome: Outcome,
    pub trace: IterationTrace,
    pub perturbations: Vec<PerturbationRecord>,
    /// Sum of the accepted steps.
    pub total_beta_consumed: f64,
    pub ell_final: i64,
}

pub fn run_superiorized(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    y0: &ImageVector,
    config: &RunConfig,
    epsilon: f64,
) -> Result<SuperiorizedRun> {
    config.validate()?;
    system.check_len(y0.len())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if !bounds.contains(y0.as_slice()) {
        return Err(Error::InvalidParameter("starting point must lie in the box".into()));
    }
    let (rows, cols) = (y0.rows(), y0.cols());
    let op = ArtSweep::new(system, bounds);
    let mut schedule = PerturbationSchedule::new(config.eta_base)?;
    let start = Instant::now();

    let mut y = y0.as_slice().to_vec();
    let mut inner = vec![0.0; y.len()];
    let mut candidate = vec![0.0; y.len()];
    let mut direction = vec![0.0; y.len()];
    let mut scratch = vec![false; y.len()];

    let mut trace = IterationTrace::new();
    let mut perturbations = Vec::new();
    let mut total_beta = 0.0;
    let mut k = 0;

    let finish = |outcome, trace, perturbations, total_beta, schedule: &PerturbationSchedule| SuperiorizedRun {
        outcome,
        trace,
        perturbations,
        total_beta_consumed: total_beta,
        ell_final: schedule.ell(),
    };
    let image = |v: &[f64]| ImageVector::new(rows, cols, v.to_vec()).expect("shape preserved");

    loop {
        let prox = system.residual_norm_unchecked(&y);
        let phi_anchor = tv_value_slice(&y, rows, cols);
        trace.push(k, prox, phi_anchor, start.elapsed().as_secs_f64());
        if prox <= epsilon {
            let outcome = Outcome::Converged(EpsilonOutput {
                iterate: image(&y),
                index: k,
                prox_value: prox,
                epsilon,
            });
            return Ok(finish(outcome, trace, perturbations, total_beta, &schedule));
        }
        let fail = |reason| {
            Outcome::Failed(RunFailure {
                reason,
                last_iterate: image(&y),
                last_index: k,
                last_prox: prox,
            })
        };
        if k == config.max_iterations {
            let outcome = fail(FailureReason::IterationsExhausted);
            return Ok(finish(outcome, trace, perturbations, total_beta, &schedule));
        }

        inner.copy_from_slice(&y);
        let mut phi_inner = phi_anchor;
        let mut n = 0;
        while n < config.perturbations_per_sweep {
            let v_norm = nonascending_direction_slice(&inner, rows, cols, config.derivative_guard, &mut direction, &mut scratch);
            let mut draws = 0;
            loop {
                let beta = schedule.next_beta();
                draws += 1;
                if beta < f64::MIN_POSITIVE {
                    let outcome = fail(FailureReason::ScheduleExhausted);
                    return Ok(finish(outcome, trace, perturbations, total_beta, &schedule));
                }
                if draws > config.max_draws_per_perturbation {
                    let outcome = fail(FailureReason::DrawCapReached);
                    return Ok(finish(outcome, trace, perturbations, total_beta, &schedule));
                }
                let phi_candidate = if v_norm == 0.0 {
                    // z = y^{k,n} exactly
                    candidate.copy_from_slice(&inner);
                    phi_inner
                } else {
                    for ((z, &a), &d) in candidate.iter_mut().zip(&inner).zip(&direction) {
                        *z = a + beta * d;
                    }
                    tv_value_slice(&candidate, rows, cols)
                };
                if phi_candidate <= phi_anchor {
                    perturbations.push(PerturbationRecord {
                        k,
                        n,
                        ell: schedule.ell(),
                        beta,
                        direction_norm: v_norm,
                        phi_candidate,
                        phi_anchor,
                        draws,
                    });
                    total_beta += beta;
                    std::mem::swap(&mut inner, &mut candidate);
                    phi_inner = phi_candidate;
                    n += 1;
                    break;
                }
            }
        }

        op.apply_in_place(&mut inner);
        std::mem::swap(&mut y, &mut inner);
        k += 1;
    }
}
