//! Sequential vs rayon execution of the main replica and enumeration loops.
//! Build with `--no-default-features` to bench the sequential fallback alone.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plancherel_core::decomposable::{divergence_report, PermutationDistribution};
use plancherel_core::models::{ModelKind, ModelSpec};
use plancherel_core::plancherel::{exact_moments_with, sample_statistics, AcceptanceSet};
use plancherel_core::report::simulate_replicas;
use plancherel_core::{Exec, Partition};

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::sequential()), ("parallel", Exec::default())]
}

fn plancherel_sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_statistics_n1331_x200");
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(sample_statistics(1331, 200, 1, &exec)))
        });
    }
    g.finish();
}

fn ar1_simulation(c: &mut Criterion) {
    let spec = ModelSpec::new(ModelKind::Ar1 { rho: 0.5 }, 2000).unwrap();
    let mut g = c.benchmark_group("simulate_ar1_n2000_x100");
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(simulate_replicas(&spec, 100, 1, &exec).unwrap()))
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumeration_n50");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::new("moments", name), |b| {
            b.iter(|| black_box(exact_moments_with(50, 130, &exec).unwrap()))
        });
        g.bench_function(BenchmarkId::new("acceptance_set", name), |b| {
            b.iter(|| black_box(AcceptanceSet::build_with(50, 0.05, &exec).unwrap()))
        });
    }
    g.finish();
}

fn decomposition(c: &mut Criterion) {
    let d = PermutationDistribution::shape_uniform(Partition::new(vec![3, 2, 1, 1, 1]).unwrap()).unwrap();
    let mut g = c.benchmark_group("decompose_shape_32111");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(divergence_report(&d, &exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, plancherel_sampling, ar1_simulation, enumeration, decomposition);
criterion_main!(benches);
