use std::fs;

use suptv_core::{
    apply_operator, nonascending_direction, run_basic_algorithm, run_superiorized, tv_value, ImageVector, RunConfig,
    Scenario, SparseLinearSystem,
};

fn small_scenario() -> (SparseLinearSystem, usize, usize) {
    let text = "rows = 16\ncols = 16\npixel_size = 1\nnum_views = 8\nangle_increment_deg = 22.5\ndetector_spacing = 1\n\
[ellipses]\n0 0 7 6 0 0.6\n0 0 6.5 5.5 0 -0.4\n2 1 2 1.5 30 0.1\n";
    let s = Scenario::parse(text).unwrap();
    let phantom = s.rasterize().unwrap();
    (s.build_system(&phantom).unwrap(), 16, 16)
}

/// Rebuilds the iterates from the recorded steps alone and checks them
/// against the trace.
#[test]
fn recorded_perturbations_replay_to_the_trace() {
    let (sys, rows, cols) = small_scenario();
    let cfg = RunConfig::default();
    let eps = 1e-2;
    let y0 = ImageVector::zeros(rows, cols);
    let run = run_superiorized(&sys, cfg.bounds, &y0, &cfg, eps).unwrap();
    assert!(run.outcome.is_converged());

    let mut y = y0;
    let mut records = run.perturbations.iter();
    for rec in &run.trace.records()[..run.trace.len() - 1] {
        assert_eq!(rec.phi, tv_value(&y));
        let anchor = rec.phi;
        let mut inner = y.clone();
        for n in 0..cfg.perturbations_per_sweep {
            let p = records.next().expect("one record per perturbation");
            assert_eq!((p.k, p.n), (rec.k, n));
            let v = nonascending_direction(&inner, cfg.derivative_guard);
            assert!((p.direction_norm - v.norm()).abs() <= 1e-12);
            assert!(v.norm() == 0.0 || (v.norm() - 1.0).abs() <= 1e-12);
            let z: Vec<f64> = inner.as_slice().iter().zip(&v.direction).map(|(a, d)| a + p.beta * d).collect();
            let z = inner.with_values(z).unwrap();
            assert!(tv_value(&z) <= anchor);
            assert_eq!(tv_value(&z), p.phi_candidate);
            inner = z;
        }
        y = apply_operator(&sys, cfg.bounds, &inner).unwrap();
    }
    assert!(records.next().is_none());
    assert_eq!(&y, run.outcome.iterate());
}

#[test]
fn consumed_steps_are_bounded_by_schedule_mass() {
    let (sys, rows, cols) = small_scenario();
    let cfg = RunConfig::default();
    let run = run_superiorized(&sys, cfg.bounds, &ImageVector::zeros(rows, cols), &cfg, 1e-3).unwrap();
    let sum: f64 = run.perturbations.iter().map(|p| p.beta).sum();
    assert!((sum - run.total_beta_consumed).abs() <= 1e-9 * sum.max(1.0));
    assert!(sum <= 1.0 / (1.0 - cfg.eta_base));
    // betas come off the schedule in order
    assert!(run.perturbations.windows(2).all(|w| w[1].beta < w[0].beta && w[1].ell > w[0].ell));
}

#[test]
fn zero_perturbations_give_the_basic_trace() {
    let (sys, rows, cols) = small_scenario();
    let cfg = RunConfig {
        perturbations_per_sweep: 0,
        ..RunConfig::default()
    };
    let x0 = ImageVector::zeros(rows, cols);
    let sm = run_superiorized(&sys, cfg.bounds, &x0, &cfg, 1e-3).unwrap();
    let basic = run_basic_algorithm(&sys, cfg.bounds, &x0, 1e-3, cfg.max_iterations).unwrap();
    assert_eq!(sm.trace.to_csv_untimed(), basic.trace.to_csv_untimed());
    assert_eq!(sm.outcome.iterate(), basic.outcome.iterate());
    assert!(sm.perturbations.is_empty());
}

#[test]
fn superiorized_output_has_lower_tv_than_basic() {
    let (sys, rows, cols) = small_scenario();
    let cfg = RunConfig::default();
    let x0 = ImageVector::zeros(rows, cols);
    let eps = 5e-2;
    let sm = run_superiorized(&sys, cfg.bounds, &x0, &cfg, eps).unwrap();
    let basic = run_basic_algorithm(&sys, cfg.bounds, &x0, eps, 100_000).unwrap();
    assert!(tv_value(sm.outcome.iterate()) < tv_value(basic.outcome.iterate()));
}

#[test]
fn system_file_round_trip_preserves_runs() {
    let (sys, rows, cols) = small_scenario();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.scts");
    sys.write_to(fs::File::create(&path).unwrap()).unwrap();
    let back = SparseLinearSystem::read_from(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, sys);
    let cfg = RunConfig::default();
    let x0 = ImageVector::zeros(rows, cols);
    let a = run_superiorized(&sys, cfg.bounds, &x0, &cfg, 1e-2).unwrap();
    let b = run_superiorized(&back, cfg.bounds, &x0, &cfg, 1e-2).unwrap();
    assert_eq!(a.trace.to_csv_untimed(), b.trace.to_csv_untimed());
}

#[test]
fn superiorized_run_reaches_what_basic_reaches() {
    let (sys, rows, cols) = small_scenario();
    let cfg = RunConfig::default();
    let x0 = ImageVector::zeros(rows, cols);
    // stop the basic run early and take whatever proximity it got to
    let basic = run_basic_algorithm(&sys, cfg.bounds, &x0, 1e-300, 400).unwrap();
    let reached = basic.trace.last().unwrap().prox;
    let sm = run_superiorized(&sys, cfg.bounds, &x0, &cfg, reached).unwrap();
    assert!(sm.outcome.is_converged());
    assert!(sm.outcome.prox() <= reached);
}
