use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dynamo_core::curve::{curve_orbit, Curve2};
use dynamo_core::exceptional::{
    chebyshev, classify, power_map, DEFAULT_COLLISION_TOL, DEFAULT_MAX_ORBIT,
};
use dynamo_core::harness::{measure_compare, rational_terms};
use dynamo_core::heights::{canonical_height, decide_preperiodic};
use dynamo_core::measure::{green, sample_invariant_measure};
use dynamo_core::orbits::periodic_points;
use dynamo_core::{Caps, Hypersurface, ProjectivePoint, RationalMapLift};
use num_complex::Complex64;

fn quad(c: i64) -> RationalMapLift {
    RationalMapLift::from_i64(&[c, 0, 1], &[1, 0, 0]).unwrap()
}

fn heights(c: &mut Criterion) {
    let f = quad(1);
    let p = ProjectivePoint::new(355, 113).unwrap();
    // exact orbits double in size each step, so non-power maps stop well short of 1e-9
    c.bench_function("canonical_height z^2+1 err 1e-4", |b| {
        b.iter(|| canonical_height(black_box(&f), black_box(&p), 1e-4).unwrap())
    });
    let sq = power_map(2).unwrap();
    c.bench_function("canonical_height z^2 err 1e-9", |b| {
        b.iter(|| canonical_height(black_box(&sq), black_box(&p), 1e-9).unwrap())
    });
    let g = quad(-1);
    let q = ProjectivePoint::new(7, 5).unwrap();
    c.bench_function("decide_preperiodic z^2-1", |b| {
        b.iter(|| decide_preperiodic(black_box(&g), black_box(&q)).unwrap())
    });
}

fn cycles_and_classification(c: &mut Criterion) {
    let f = quad(-1);
    c.bench_function("periodic_points period 4", |b| {
        b.iter(|| periodic_points(black_box(&f), 4, 1e-9).unwrap())
    });
    let t = chebyshev(4).unwrap();
    c.bench_function("classify T_4", |b| {
        b.iter(|| classify(black_box(&t), DEFAULT_MAX_ORBIT, DEFAULT_COLLISION_TOL).unwrap())
    });
}

fn measures(c: &mut Criterion) {
    let f = quad(-1);
    c.bench_function("sample_invariant_measure 10k depth 30", |b| {
        b.iter(|| sample_invariant_measure(black_box(&f), 10_000, 30, 7).unwrap())
    });
    let z = Complex64::new(0.3, 0.7);
    c.bench_function("green depth 40", |b| {
        b.iter(|| green(black_box(&f), black_box(z), 40).unwrap())
    });

    let plane = Hypersurface::new(
        vec![1, 1, 1],
        rational_terms(&[(vec![1, 0, 0], 1), (vec![0, 1, 0], 1), (vec![0, 0, 1], -1)]),
    )
    .unwrap();
    let maps = [
        power_map(2).unwrap(),
        power_map(2).unwrap(),
        power_map(2).unwrap(),
    ];
    let mut group = c.benchmark_group("harness");
    group.sample_size(10);
    group.bench_function("measure_compare plane 2000", |b| {
        b.iter(|| measure_compare(&plane, &maps, 0, 1, 2000, 30, 7, None).unwrap())
    });
    group.finish();
}

fn curves(c: &mut Criterion) {
    let line = Curve2::from_terms((1, 1), &[(1, 0, 1), (0, 1, -1), (0, 0, 1)]).unwrap();
    let f = quad(0);
    let mut group = c.benchmark_group("curves");
    group.sample_size(10);
    group.bench_function("curve_orbit shifted line 4 steps", |b| {
        b.iter(|| curve_orbit(black_box(&line), &f, &f, 4, &Caps::default()).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    heights,
    cycles_and_classification,
    measures,
    curves
);
criterion_main!(benches);
