use std::fs;
use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};
use suptv_core::psm::{project_onto_c, ProjectionSettings};
use suptv_core::{
    apply_operator, build_system, nonascending_direction, trace_ray, tv_value, ImageVector, Scenario,
};

fn desk() -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/head64.cfg");
    Scenario::parse(&fs::read_to_string(path).unwrap()).unwrap()
}

fn geometry(c: &mut Criterion) {
    let s = desk();
    let grid = s.grid();
    let phantom = s.rasterize().unwrap();
    c.bench_function("trace_ray oblique 64x64", |b| {
        let dir = (0.6f64.cos(), 0.6f64.sin());
        b.iter(|| trace_ray(black_box((-150.0, -40.0)), dir, &grid))
    });
    c.bench_function("build_system 64x64 30 views", |b| {
        b.iter(|| build_system(black_box(&phantom), &grid, &s.scan).unwrap())
    });
}

fn solvers(c: &mut Criterion) {
    let s = desk();
    let phantom = s.rasterize().unwrap();
    let sys = s.build_system(&phantom).unwrap();
    let x = ImageVector::constant(64, 64, 0.2);
    c.bench_function("ART sweep 64x64", |b| b.iter(|| apply_operator(&sys, s.run.bounds, black_box(&x)).unwrap()));
    c.bench_function("tv_value 64x64", |b| b.iter(|| tv_value(black_box(&phantom))));
    c.bench_function("nonascending_direction 64x64", |b| {
        b.iter(|| nonascending_direction(black_box(&phantom), 1e-20))
    });
    let settings = ProjectionSettings {
        tolerance: 1e-12,
        max_inner: 50,
        alpha_init: 10.0,
    };
    c.bench_function("projection 50 inner iterations 64x64", |b| {
        b.iter(|| project_onto_c(&sys, s.run.bounds, black_box(&x), &settings).unwrap())
    });
}

criterion_group!(benches, geometry, solvers);
criterion_main!(benches);
