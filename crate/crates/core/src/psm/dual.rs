use crate::bounds::BoxBounds;
use crate::error::{Error, Result};
use crate::image::{dot, ImageVector};
use crate::system::SparseLinearSystem;

/// Dual function value and gradient at one multiplier vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DualValue {
    /// `f(lambda)`, which is maximized.
    pub value: f64,
    /// `grad f(lambda) = A P(q - A^T lambda) - b`.
    pub gradient: Vec<f64>,
    /// The clamped primal candidate `P(q - A^T lambda)`.
    pub primal: Vec<f64>,
}

/// Evaluates
/// `f(l) = ½||u - P(u)||² - ½||u||² - <l, b> + ½||q||²` with `u = q - A^T l`.
pub fn dual_objective(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    q: &ImageVector,
    lambda: &[f64],
) -> Result<DualValue> {
    system.check_len(q.len())?;
    if lambda.len() != system.num_rows() {
        return Err(Error::DimensionMismatch {
            expected: system.num_rows(),
            found: lambda.len(),
        });
    }
    let mut u = vec![0.0; q.len()];
    system.apply_transpose(lambda, &mut u);
    for (ui, &qi) in u.iter_mut().zip(q.as_slice()) {
        *ui = qi - *ui;
    }
    let mut primal = u.clone();
    bounds.project_in_place(&mut primal);
    let lb: f64 = lambda.iter().zip(system.rows()).map(|(l, r)| l * r.rhs()).sum();
    let value = shifted_value(&u, &primal) - lb + 0.5 * dot(q.as_slice(), q.as_slice());
    let mut gradient = vec![0.0; system.num_rows()];
    system.apply(&primal, &mut gradient);
    for (g, r) in gradient.iter_mut().zip(system.rows()) {
        *g -= r.rhs();
    }
    Ok(DualValue {
        value,
        gradient,
        primal,
    })
}

/// `½||u - p||² - ½||u||²`
fn shifted_value(u: &[f64], p: &[f64]) -> f64 {
    u.iter()
        .zip(p)
        .map(|(&a, &b)| {
            let d = a - b;
            0.5 * (d * d - a * a)
        })
        .sum()
}

/// `beta_{k+1} = ½ + ½ sqrt(4 beta_k² + 1)`
pub fn nesterov_beta_next(beta: f64) -> f64 {
    0.5 + 0.5 * (4.0 * beta * beta + 1.0).sqrt()
}

/// State of the accelerated method between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda_prev: Vec<f64>,
    pub mu: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl DualState {
    pub fn new(start: Vec<f64>, alpha_init: f64) -> Self {
        Self {
            lambda_prev: start.clone(),
            mu: start,
            alpha: alpha_init,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSettings {
    /// Stop once `||b - A x|| <= tolerance` for the current primal candidate.
    pub tolerance: f64,
    pub max_inner: usize,
    pub alpha_init: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub x: Vec<f64>,
    /// Multipliers that produced `x`, usable as a warm start.
    pub lambda: Vec<f64>,
    pub inner_iterations: usize,
    /// `||b - A x||`, the dual gradient norm at the returned point.
    pub gradient_norm: f64,
    /// False when the iteration cap was hit before the tolerance.
    pub exact: bool,
    pub backtracks: usize,
    /// Smallest margin by which an accepted step beat the sufficient-decrease
    /// bound; nonnegative unless a step was forced.
    pub min_decrease_margin: f64,
    pub forced_steps: usize,
}

/// Projection of `q` onto `{Ax = b} ∩ box`, starting the dual from zero.
pub fn project_onto_c(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    q: &ImageVector,
    settings: &ProjectionSettings,
) -> Result<ProjectionResult> {
    system.check_len(q.len())?;
    project_slice(system, bounds, q.as_slice(), settings, None)
}

/// As [`project_onto_c`], starting the dual from `lambda0`.
pub fn project_onto_c_from(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    q: &ImageVector,
    settings: &ProjectionSettings,
    lambda0: &[f64],
) -> Result<ProjectionResult> {
    system.check_len(q.len())?;
    if lambda0.len() != system.num_rows() {
        return Err(Error::DimensionMismatch {
            expected: system.num_rows(),
            found: lambda0.len(),
        });
    }
    project_slice(system, bounds, q.as_slice(), settings, Some(lambda0))
}

/// Working storage for one dual evaluation.
struct Probe {
    u: Vec<f64>,
    p: Vec<f64>,
}

impl Probe {
    fn new(j: usize) -> Self {
        Self {
            u: vec![0.0; j],
            p: vec![0.0; j],
        }
    }

    /// Loads `u = q - at` and `p = P(u)`.
    fn load(&mut self, q: &[f64], at: &[f64], bounds: BoxBounds) {
        for ((u, p), (&qi, &ai)) in self.u.iter_mut().zip(self.p.iter_mut()).zip(q.iter().zip(at)) {
            *u = qi - ai;
            *p = bounds.clamp(*u);
        }
    }
}

/// `theta(mu) - theta(mu - step g) - step/2 ||g||²` for `theta = -f` and
/// `g = b - A P(u)`, without forming either theta value.
///
/// Moving the multipliers by `-step g` moves `u` by `d = step A^T g`. The
/// first-order part of the change in theta is `-step ||g||²` exactly, so the
/// margin is `step/2 ||g||²` plus the remainders
/// `-int_0^d (P(u + t) - P(u)) dt`, which are computed per component. Taking
/// the difference of the two theta values directly loses the test to
/// rounding once `||g||` is small.
fn decrease_margin(here: &Probe, at_grad: &[f64], step: f64, g_sq: f64, bounds: BoxBounds) -> f64 {
    let rest: f64 = here
        .u
        .iter()
        .zip(&here.p)
        .zip(at_grad)
        .map(|((&u, &p), &ag)| clamp_remainder(u, p, step * ag, bounds))
        .sum();
    0.5 * step * g_sq + rest
}

/// `-int_0^d (clamp(u + t) - p) dt` with `p = clamp(u)`.
fn clamp_remainder(u: f64, p: f64, d: f64, bounds: BoxBounds) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let (a, b) = if d > 0.0 { (0.0, d) } else { (d, 0.0) };
    // breakpoints of t -> clamp(u + t), relative to u
    let t_lo = bounds.lo() - u;
    let t_hi = bounds.hi() - u;
    let mut total = 0.0;
    let mut piece = |s: f64, e: f64, f: &dyn Fn(f64, f64) -> f64| {
        if e > s {
            total += f(s, e);
        }
    };
    piece(a, b.min(t_lo), &|s, e| (bounds.lo() - p) * (e - s));
    piece(a.max(t_lo), b.min(t_hi), &|s, e| (u - p) * (e - s) + 0.5 * (e - s) * (e + s));
    piece(a.max(t_hi), b, &|s, e| (bounds.hi() - p) * (e - s));
    if d > 0.0 {
        -total
    } else {
        total
    }
}

pub(crate) fn project_slice(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    q: &[f64],
    settings: &ProjectionSettings,
    lambda0: Option<&[f64]>,
) -> Result<ProjectionResult> {
    if !(settings.tolerance > 0.0) || settings.max_inner == 0 || !(settings.alpha_init > 0.0) {
        return Err(Error::InvalidParameter("projection settings must be positive".into()));
    }
    const REFRESH: usize = 64;
    const MAX_HALVINGS: u32 = 200;

    let (m, jdim) = (system.num_rows(), system.num_cols());
    let rhs = system.rhs();

    let mut state = DualState::new(lambda0.map_or_else(|| vec![0.0; m], <[f64]>::to_vec), settings.alpha_init);
    // A^T lambda_prev and A^T mu, updated through the same linear combinations
    // as the multipliers and refreshed periodically.
    let mut at_prev = vec![0.0; jdim];
    system.apply_transpose(&state.lambda_prev, &mut at_prev);
    let mut at_mu = at_prev.clone();

    let mut here = Probe::new(jdim);
    let mut grad = vec![0.0; m];
    let mut at_grad = vec![0.0; jdim];
    let mut lambda = vec![0.0; m];
    let mut at_lambda = vec![0.0; jdim];

    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut backtracks = 0;
    let mut forced = 0;
    let mut min_margin = f64::INFINITY;

    for iter in 0..settings.max_inner {
        if iter > 0 && iter % REFRESH == 0 {
            system.apply_transpose(&state.mu, &mut at_mu);
            system.apply_transpose(&state.lambda_prev, &mut at_prev);
        }
        here.load(q, &at_mu, bounds);
        // grad theta = b - A p
        system.apply(&here.p, &mut grad);
        for (g, &b) in grad.iter_mut().zip(&rhs) {
            *g = b - *g;
        }
        let g_sq = dot(&grad, &grad);
        let g_norm = g_sq.sqrt();
        if best.as_ref().is_none_or(|(n, _, _)| g_norm < *n) {
            best = Some((g_norm, here.p.clone(), state.mu.clone()));
        }
        if g_norm <= settings.tolerance {
            return Ok(ProjectionResult {
                x: here.p,
                lambda: state.mu,
                inner_iterations: iter,
                gradient_norm: g_norm,
                exact: true,
                backtracks,
                min_decrease_margin: min_margin,
                forced_steps: forced,
            });
        }

        system.apply_transpose(&grad, &mut at_grad);
        let mut s = 0;
        let step = loop {
            let step = state.alpha * 0.5f64.powi(s as i32);
            let margin = decrease_margin(&here, &at_grad, step, g_sq, bounds);
            if margin >= 0.0 {
                min_margin = min_margin.min(margin);
                break step;
            }
            if s >= MAX_HALVINGS {
                forced += 1;
                break step;
            }
            s += 1;
            backtracks += 1;
        };
        for ((a, &m_), &g) in at_lambda.iter_mut().zip(&at_mu).zip(&at_grad) {
            *a = m_ - step * g;
        }
        state.alpha = step;
        for ((l, &m_), &g) in lambda.iter_mut().zip(&state.mu).zip(&grad) {
            *l = m_ - step * g;
        }
        let beta_next = nesterov_beta_next(state.beta);
        let c = (state.beta - 1.0) / beta_next;
        for ((mu, &l), &lp) in state.mu.iter_mut().zip(&lambda).zip(&state.lambda_prev) {
            *mu = l + c * (l - lp);
        }
        for ((am, &al), &ap) in at_mu.iter_mut().zip(&at_lambda).zip(&at_prev) {
            *am = al + c * (al - ap);
        }
        std::mem::swap(&mut state.lambda_prev, &mut lambda);
        std::mem::swap(&mut at_prev, &mut at_lambda);
        state.beta = beta_next;
    }

    let (gradient_norm, x, lambda) = best.expect("at least one inner iteration");
    Ok(ProjectionResult {
        x,
        lambda,
        inner_iterations: settings.max_inner,
        gradient_norm,
        exact: false,
        backtracks,
        min_decrease_margin: min_margin,
        forced_steps: forced,
    })
}
