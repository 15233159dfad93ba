//! Criterion benchmarks for the hot paths: the cubic triangle scan, greedy
//! covering, and batch prediction.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use gapnn::synthetic::{build_dissimilarity, cross_dissimilarity, Family, FamilySpec};
use gapnn::{fit, greedy_cover, metricity_report, predict_batch, Class, Mode};

pub fn benchmarks(c: &mut Criterion) {
    metricity(c);
    cover(c);
    predict(c);
}

fn metricity(c: &mut Criterion) {
    let mut group = c.benchmark_group("metricity_report");
    group.sample_size(10);
    for per_class in [50, 150, 300] {
        let spec = FamilySpec::new(Family::Box, per_class, 1);
        let d = build_dissimilarity(&spec.train_objects().unwrap(), spec.measure).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(2 * per_class), &d, |b, d| {
            b.iter(|| metricity_report(black_box(d.matrix())).unwrap())
        });
    }
    group.finish();
}

fn cover(c: &mut Criterion) {
    let spec = FamilySpec::new(Family::Box, 500, 42);
    let d = build_dissimilarity(&spec.train_objects().unwrap(), spec.measure).unwrap();
    c.bench_function("greedy_cover/box_500", |b| {
        b.iter(|| greedy_cover(black_box(&d), Class::A, 0.1).unwrap())
    });
}

fn predict(c: &mut Criterion) {
    let mut group = c.benchmark_group("predict_batch");
    for family in [Family::Box, Family::Shapes] {
        let spec = FamilySpec::new(family, 200, 7);
        let train = spec.train_objects().unwrap();
        let test = spec.test_objects(500).unwrap();
        let d = build_dissimilarity(&train, spec.measure).unwrap();
        let t = cross_dissimilarity(&train, &test, spec.measure).unwrap();
        let model = fit(&d, None, None).unwrap();
        for mode in [Mode::Rules, Mode::Smooth] {
            group.bench_function(format!("{family}/{mode}"), |b| {
                b.iter(|| predict_batch(&model, black_box(&t), mode).unwrap())
            });
        }
    }
    group.finish();
}
