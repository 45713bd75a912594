//! Benchmarks for the hot paths of the verification pipeline: building the
//! symbolic derivative caches, evaluating a point frame, and the per-point
//! work of the two heaviest checks.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hspace_core::expr::{rat, rat_int, Point};
use hspace_core::verify::{check_eisenhart, parallel_constraint_system};
use hspace_core::{HSpaceModel, HSpaceParams};

fn fixture_point() -> Point {
    Point::of_coordinates([
        rat_int(1),
        rat_int(1),
        rat(1, 2),
        rat_int(2),
        rat(1, 3),
        rat_int(3),
    ])
}

fn bench_pipeline(c: &mut Criterion) {
    let model = HSpaceModel::build(HSpaceParams::default()).unwrap();
    let point = fixture_point();

    c.bench_function("geometry-build", |b| {
        b.iter(|| black_box(model.geometry()))
    });

    let geometry = model.geometry();
    c.bench_function("frame-at-point", |b| {
        b.iter(|| black_box(geometry.frame_at(&point).unwrap()))
    });

    let frames = vec![geometry.frame_at(&point).unwrap()];
    c.bench_function("eisenhart-at-point", |b| {
        b.iter(|| black_box(check_eisenhart(&frames, model.h(), model.phi(), "h,phi")))
    });

    c.bench_function("parallel-nullspace-at-point", |b| {
        b.iter(|| {
            let system = parallel_constraint_system(&frames[0]);
            black_box(system.nullspace())
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_pipeline
}
criterion_main!(benches);
