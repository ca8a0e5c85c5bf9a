//! Sequential ART sweeps with a box projection, and the basic
//! feasibility-seeking loop built on them.

use std::time::Instant;

use crate::bounds::BoxBounds;
use crate::error::{Error, Result};
use crate::image::ImageVector;
use crate::objective::tv_value;
use crate::outcome::{EpsilonOutput, FailureReason, Outcome, RunFailure};
use crate::system::{SparseLinearSystem, SparseRow};
use crate::trace::IterationTrace;

/// Maps any vector into the box while seeking the constraint set.
pub trait AlgorithmicOperator {
    fn bounds(&self) -> BoxBounds;

    fn apply_in_place(&self, x: &mut [f64]);

    fn apply(&self, x: &ImageVector) -> ImageVector {
        let mut y = x.clone();
        self.apply_in_place(y.as_mut_slice());
        y
    }
}

/// One ART sweep over the rows in order, then a clamp to the box.
#[derive(Debug, Clone, Copy)]
pub struct ArtSweep<'a> {
    system: &'a SparseLinearSystem,
    bounds: BoxBounds,
}

impl<'a> ArtSweep<'a> {
    pub fn new(system: &'a SparseLinearSystem, bounds: BoxBounds) -> Self {
        Self { system, bounds }
    }

    pub fn system(&self) -> &SparseLinearSystem {
        self.system
    }
}

impl AlgorithmicOperator for ArtSweep<'_> {
    fn bounds(&self) -> BoxBounds {
        self.bounds
    }

    fn apply_in_place(&self, x: &mut [f64]) {
        for row in self.system.rows() {
            project_onto_hyperplane(row, x);
        }
        self.bounds.project_in_place(x);
    }
}

#[inline]
fn project_onto_hyperplane(row: &SparseRow, x: &mut [f64]) {
    let residual = row.rhs() - row.dot(x);
    if residual != 0.0 {
        row.axpy(residual / row.squared_norm(), x);
    }
}

/// Orthogonal projection of `x` onto the hyperplane `<a^i, x> = b_i`.
pub fn art_row_update(x: &ImageVector, row: &SparseRow) -> Result<ImageVector> {
    if !(row.squared_norm() > 0.0) {
        return Err(Error::ZeroNormRow(0));
    }
    if let Some(&last) = row.indices().last() {
        if last as usize >= x.len() {
            return Err(Error::DimensionMismatch {
                expected: last as usize + 1,
                found: x.len(),
            });
        }
    }
    let mut y = x.clone();
    project_onto_hyperplane(row, y.as_mut_slice());
    Ok(y)
}

/// Componentwise clamp to `[lo, hi]`.
pub fn box_project(x: &ImageVector, bounds: BoxBounds) -> ImageVector {
    let mut y = x.clone();
    bounds.project_in_place(y.as_mut_slice());
    y
}

/// `Q(U_I(... U_1(x)))`.
pub fn apply_operator(system: &SparseLinearSystem, bounds: BoxBounds, x: &ImageVector) -> Result<ImageVector> {
    system.check_len(x.len())?;
    Ok(ArtSweep::new(system, bounds).apply(x))
}

#[derive(Debug, Clone)]
pub struct BasicRun {
    pub outcome: Outcome,
    pub trace: IterationTrace,
}

/// Iterates `x^{k+1} = A_C(x^k)` from `x0` until the first iterate with
/// proximity at most `epsilon`. Proximity is checked once per sweep.
pub fn run_basic_algorithm(
    system: &SparseLinearSystem,
    bounds: BoxBounds,
    x0: &ImageVector,
    epsilon: f64,
    max_iterations: usize,
) -> Result<BasicRun> {
    system.check_len(x0.len())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if !bounds.contains(x0.as_slice()) {
        return Err(Error::InvalidParameter("starting point must lie in the box".into()));
    }
    let op = ArtSweep::new(system, bounds);
    let start = Instant::now();
    let mut x = x0.clone();
    let mut trace = IterationTrace::new();
    let mut k = 0;
    loop {
        let prox = system.residual_norm_unchecked(x.as_slice());
        trace.push(k, prox, tv_value(&x), start.elapsed().as_secs_f64());
        if prox <= epsilon {
            let outcome = Outcome::Converged(EpsilonOutput {
                iterate: x,
                index: k,
                prox_value: prox,
                epsilon,
            });
            return Ok(BasicRun { outcome, trace });
        }
        if k == max_iterations {
            let outcome = Outcome::Failed(RunFailure {
                reason: FailureReason::IterationsExhausted,
                last_iterate: x,
                last_index: k,
                last_prox: prox,
            });
            return Ok(BasicRun { outcome, trace });
        }
        op.apply_in_place(x.as_mut_slice());
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn img(v: &[f64]) -> ImageVector {
        ImageVector::new(1, v.len(), v.to_vec()).unwrap()
    }

    fn row(dense: &[f64], b: f64) -> SparseRow {
        SparseLinearSystem::from_dense(&[dense.to_vec()], &[b]).unwrap().rows()[0].clone()
    }

    #[test]
    fn row_update_hits_hyperplane() {
        let y = art_row_update(&img(&[0.0, 0.0]), &row(&[1.0, 0.0], 3.0)).unwrap();
        assert_eq!(y.as_slice(), &[3.0, 0.0]);
        let on = img(&[3.0, 7.0]);
        assert_eq!(art_row_update(&on, &row(&[1.0, 0.0], 3.0)).unwrap(), on);
    }

    #[test]
    fn row_update_matches_least_squares_projection() {
        // the closest point of x1 + x2 = 2 to the origin is (1, 1)
        let y = art_row_update(&img(&[0.0, 0.0]), &row(&[1.0, 1.0], 2.0)).unwrap();
        assert!((y.as_slice()[0] - 1.0).abs() < 1e-15 && (y.as_slice()[1] - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..3.0)).collect();
            let b = rng.gen_range(-10.0..10.0);
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let r = row(&a, b);
            let y = art_row_update(&img(&x), &r).unwrap();
            let residual = (r.dot(y.as_slice()) - b).abs();
            assert!(residual <= 1e-10 * (1.0 + b.abs()));
            // y - x is parallel to a
            let d: Vec<f64> = y.as_slice().iter().zip(&x).map(|(p, q)| p - q).collect();
            let scale = d[0] / a[0];
            for j in 1..5 {
                assert!((d[j] - scale * a[j]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn row_update_rejects_oversized_row() {
        let r = SparseRow::new(vec![4], vec![1.0], 1.0).unwrap();
        assert!(art_row_update(&img(&[0.0, 0.0]), &r).is_err());
    }

    #[test]
    fn box_projection_clamps() {
        let y = box_project(&img(&[-0.5, 0.5, 1.5]), BoxBounds::default());
        assert_eq!(y.as_slice(), &[0.0, 0.5, 1.0]);
        let inside = img(&[0.0, 0.25, 1.0]);
        assert_eq!(box_project(&inside, BoxBounds::default()), inside);
    }

    #[test]
    fn operator_is_composition() {
        let sys = SparseLinearSystem::from_dense(&[vec![2.0, 1.0]], &[3.0]).unwrap();
        let x = img(&[0.9, -0.4]);
        let direct = box_project(&art_row_update(&x, &sys.rows()[0]).unwrap(), BoxBounds::default());
        assert_eq!(apply_operator(&sys, BoxBounds::default(), &x).unwrap(), direct);
    }

    #[test]
    fn operator_matches_scripted_sweep() {
        let a = [[1.0, 2.0], [3.0, 1.0], [1.0, 1.0]];
        let b = [1.0, 1.5, 0.8];
        let sys = SparseLinearSystem::from_dense(&a.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), &b).unwrap();
        let mut x = [0.3, -0.2];
        for (ai, bi) in a.iter().zip(b) {
            let r = bi - (ai[0] * x[0] + ai[1] * x[1]);
            let n = ai[0] * ai[0] + ai[1] * ai[1];
            x[0] += r / n * ai[0];
            x[1] += r / n * ai[1];
        }
        let expected = [x[0].clamp(0.0, 1.0), x[1].clamp(0.0, 1.0)];
        let got = apply_operator(&sys, BoxBounds::default(), &img(&[0.3, -0.2])).unwrap();
        for j in 0..2 {
            assert!((got.as_slice()[j] - expected[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn feasible_points_are_fixed() {
        let sys = SparseLinearSystem::from_dense(&[vec![1.0, 1.0], vec![1.0, -1.0]], &[1.0, 0.0]).unwrap();
        let x = img(&[0.5, 0.5]);
        assert_eq!(apply_operator(&sys, BoxBounds::default(), &x).unwrap(), x);
    }

    #[test]
    fn basic_algorithm_paths() {
        let sys = SparseLinearSystem::from_dense(&[vec![1.0, 1.0], vec![1.0, -1.0]], &[1.0, 0.2]).unwrap();
        let bounds = BoxBounds::default();
        let start = img(&[0.6, 0.4]);
        let run = run_basic_algorithm(&sys, bounds, &start, 1e-6, 100).unwrap();
        assert_eq!(run.outcome.index(), 0);
        assert_eq!(run.trace.len(), 1);

        let run = run_basic_algorithm(&sys, bounds, &img(&[0.0, 0.0]), 1e-6, 100).unwrap();
        let out = run.outcome.converged().unwrap();
        assert!(out.prox_value <= 1e-6);
        assert!(run.trace.records()[..run.trace.len() - 1].iter().all(|r| r.prox > 1e-6));

        let skew = SparseLinearSystem::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.001]], &[1.0, 1.0007]).unwrap();
        let run = run_basic_algorithm(&skew, bounds, &img(&[0.0, 0.0]), 1e-14, 3).unwrap();
        assert_eq!(run.outcome.failure(), Some(FailureReason::IterationsExhausted));
        assert_eq!(run.trace.len(), 4);
    }

    #[test]
    fn basic_algorithm_requires_start_in_box() {
        let sys = SparseLinearSystem::from_dense(&[vec![1.0, 1.0]], &[1.0]).unwrap();
        assert!(run_basic_algorithm(&sys, BoxBounds::default(), &img(&[2.0, 0.0]), 1e-3, 10).is_err());
    }
}
