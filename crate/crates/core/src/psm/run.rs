use std::time::Instant;

use crate::bounds::BoxBounds;
use crate::config::RunConfig;
use crate::error::Result;
use crate::image::{norm2, ImageVector};
use crate::objective::{tv_subgradient_slice, tv_value_slice};
use crate::system::SparseLinearSystem;
use crate::trace::IterationTrace;

use super::dual::{project_slice, ProjectionSettings};

/// Best-objective bookkeeping for the stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsmState {
    pub k: usize,
    pub curr: f64,
    pub prev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsmStop {
    /// The best objective improved by less than `prev / M` over the last `K` steps.
    Stalled,
    IterationCap,
}

impl PsmStop {
    pub fn as_str(&self) -> &'static str {
        match self {
            PsmStop::Stalled => "stalled",
            PsmStop::IterationCap => "iteration-cap",
        }
    }
}

/// Per-outer-iteration statistics of the inner projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolveStats {
    pub k: usize,
    pub inner_iterations: usize,
    pub gradient_norm: f64,
    pub exact: bool,
    /// Step length `t_k * ||phi'(x^k)||` actually taken; zero for a pure projection.
    pub step_norm: f64,
    pub min_decrease_margin: f64,
}

#[derive(Debug, Clone)]
pub struct PsmRun {
    pub x: ImageVector,
    pub trace: IterationTrace,
    /// Proximity of the final iterate.
    pub achieved_epsilon: f64,
    pub stop: PsmStop,
    pub inner: Vec<InnerSolveStats>,
    /// `curr` after every outer iteration.
    pub curr_history: Vec<f64>,
    pub state: PsmState,
}

/// Runs `x^{k+1} = P_C(x^k - t_k phi'(x^k))` with `t_k = k^(-e) / ||phi'(x^k)||`.
///
/// The first iteration (`k = 0`, where `k^(-e)` is undefined) and any iteration
/// with a zero subgradient project the current point without a descent step.
/// `curr` and `prev` start from the TV of the first projected iterate. Every
/// `K` completed iterations the run stops if `prev - curr <= prev / M`.
pub fn run_psm(system: &SparseLinearSystem, bounds: BoxBounds, x0: &ImageVector, config: &RunConfig) -> Result<PsmRun> {
    config.validate()?;
    system.check_len(x0.len())?;
    let (rows, cols) = (x0.rows(), x0.cols());
    let settings = ProjectionSettings {
        tolerance: config.inner_tolerance * (1.0 + system.rhs_norm()),
        max_inner: config.max_inner,
        alpha_init: config.nesterov_alpha_init,
    };
    let start = Instant::now();

    let mut x = x0.as_slice().to_vec();
    let mut q = vec![0.0; x.len()];
    let mut sub = vec![0.0; x.len()];
    let mut lambda: Option<Vec<f64>> = None;

    let mut trace = IterationTrace::new();
    trace.push(
        0,
        system.residual_norm_unchecked(&x),
        tv_value_slice(&x, rows, cols),
        start.elapsed().as_secs_f64(),
    );
    let mut inner = Vec::new();
    let mut curr_history = Vec::new();
    let mut state = PsmState {
        k: 0,
        curr: tv_value_slice(&x, rows, cols),
        prev: tv_value_slice(&x, rows, cols),
    };

    let stop = loop {
        let k = state.k;
        tv_subgradient_slice(&x, rows, cols, &mut sub);
        let sub_norm = norm2(&sub);
        let step_norm = if k == 0 || sub_norm == 0.0 {
            q.copy_from_slice(&x);
            0.0
        } else {
            let gamma = (k as f64).powf(-config.step_exponent);
            let t = gamma / sub_norm;
            for ((qi, &xi), &si) in q.iter_mut().zip(&x).zip(&sub) {
                *qi = xi - t * si;
            }
            gamma
        };

        let warm = if config.warm_start { lambda.as_deref() } else { None };
        let proj = project_slice(system, bounds, &q, &settings, warm)?;
        inner.push(InnerSolveStats {
            k,
            inner_iterations: proj.inner_iterations,
            gradient_norm: proj.gradient_norm,
            exact: proj.exact,
            step_norm,
            min_decrease_margin: proj.min_decrease_margin,
        });
        x = proj.x;
        lambda = Some(proj.lambda);
        state.k = k + 1;

        let phi = tv_value_slice(&x, rows, cols);
        trace.push(state.k, system.residual_norm_unchecked(&x), phi, start.elapsed().as_secs_f64());
        if k == 0 {
            state.curr = phi;
            state.prev = phi;
        } else if phi <= state.curr {
            state.curr = phi;
        }
        curr_history.push(state.curr);

        if state.k.is_multiple_of(config.psm_check_period) {
            if state.prev - state.curr <= state.prev / config.psm_improvement_divisor as f64 {
                break PsmStop::Stalled;
            }
            state.prev = state.curr;
        }
        if state.k >= config.psm_max_iterations {
            break PsmStop::IterationCap;
        }
    };

    let achieved_epsilon = trace.last().map_or(0.0, |r| r.prox);
    Ok(PsmRun {
        x: ImageVector::new(rows, cols, x)?,
        trace,
        achieved_epsilon,
        stop,
        inner,
        curr_history,
        state,
    })
}
