use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use glslab_core::intersection::{oracle_count, OracleMode, SubtorusSpec};
use glslab_core::invariants::GradedSemigroup;
use glslab_core::lattice::{enumerate_points_with, sumset_with, IntVector, RationalPolytope};
use glslab_core::series::{catalog, Series};
use glslab_core::Strategy;

const STRATEGIES: [Strategy; 2] = [Strategy::Sequential, Strategy::Parallel];

fn sumsets(c: &mut Criterion) {
    let s = Series::new(catalog::load("full_O1_P2")).evaluate(24);
    let mut group = c.benchmark_group("sumset S_24 + S_24");
    for strategy in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{strategy:?}")), &strategy, |b, &st| {
            b.iter(|| sumset_with(&s, &s, st).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let verts = [
        IntVector::from_i64(&[0, 0, 0]),
        IntVector::from_i64(&[1, 0, 0]),
        IntVector::from_i64(&[0, 1, 0]),
        IntVector::from_i64(&[0, 0, 1]),
    ];
    let p = RationalPolytope::from_int_points(3, &verts).unwrap().scaled_int(40);
    let mut group = c.benchmark_group("lattice points of 40Δ_3");
    for strategy in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{strategy:?}")), &strategy, |b, &st| {
            b.iter(|| enumerate_points_with(&p, None, st))
        });
    }
    group.finish();
}

fn degree_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("slices and lattices to bound 32");
    group.sample_size(20);
    for strategy in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{strategy:?}")), &strategy, |b, &st| {
            b.iter(|| {
                let s = Series::new(catalog::load("parabola_index2")).with_strategy(st);
                GradedSemigroup::new(&s, 32)
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let s = Series::new(catalog::load("full_O1_P2"));
    let z = SubtorusSpec::identity(2).with_seed(1);
    let mut group = c.benchmark_group("oracle m = 2, 16 trials");
    group.sample_size(10);
    for strategy in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{strategy:?}")), &strategy, |b, &st| {
            b.iter(|| oracle_count(&s, 2, &z, 10007, 16, OracleMode::Closure, st).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sumsets, enumeration, degree_sweep, oracle);
criterion_main!(benches);
