use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixel_bench::Fixture;
use mixel_core::analysis::{solve_level, ExpSineSolution};
use mixel_core::assembly::LoadModel;
use mixel_core::verify::{local_divergence_rank, reference_triangle};
use mixel_core::{solve, ComplianceTensor, Diagonal};

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble");
    for (k, level) in [(3, 4), (4, 3), (5, 3)] {
        let f = Fixture::new(k, level).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("k{k}-l{level}")), &f, |b, f| {
            b.iter(|| black_box(f.assemble().unwrap()))
        });
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for (k, level) in [(3, 3), (3, 4), (5, 3)] {
        let sys = Fixture::new(k, level).unwrap().assemble().unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(format!("k{k}-l{level}")), &sys, |b, s| {
            b.iter(|| black_box(solve(s).unwrap()))
        });
    }
    g.finish();
}

fn full_level(c: &mut Criterion) {
    let material = ComplianceTensor::new(0.5, 1.0).unwrap();
    let mut g = c.benchmark_group("level");
    g.sample_size(10);
    g.bench_function("k4-l3", |b| {
        b.iter(|| {
            let run = solve_level(4, 3, &material, Diagonal::NorthWest, LoadModel::Projected, &ExpSineSolution);
            black_box(run.unwrap().report)
        })
    });
    g.finish();
}

fn local_rank(c: &mut Criterion) {
    c.bench_function("local-rank-k5", |b| b.iter(|| black_box(local_divergence_rank(5, reference_triangle()).unwrap())));
}

criterion_group!(benches, assembly, solver, full_level, local_rank);
criterion_main!(benches);
