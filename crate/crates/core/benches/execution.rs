//! Sequential vs parallel execution of the seed loop and the validation
//! sweeps. Build with `--no-default-features` to time the fallback path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hte_bandit::harness::validate::{comparison_sweep, identity_sweep};
use hte_bandit::harness::{execute, RunConfig};
use hte_bandit::parallel::Execution;
use hte_bandit::policy::Algorithm;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn seeds(c: &mut Criterion) {
    let mut cfg = RunConfig {
        algorithm: Algorithm::HteIgw,
        seeds: (1..=8).collect(),
        ..RunConfig::default()
    };
    cfg.environment.d = 10;
    cfg.environment.horizon = 2000;
    cfg.oracle.c_xi = 0.01;
    let mut group = c.benchmark_group("execute");
    group.sample_size(10);
    for (name, mode) in MODES {
        cfg.execution = mode;
        group.bench_with_input(BenchmarkId::new("lin_lin_8_seeds", name), &cfg, |b, cfg| {
            b.iter(|| black_box(execute(cfg).unwrap()))
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("validation");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new("identity_50", name), |b| {
            b.iter(|| black_box(identity_sweep(7, 50, mode).unwrap()))
        });
        group.bench_function(BenchmarkId::new("comparison_100x20", name), |b| {
            b.iter(|| black_box(comparison_sweep(7, 100, 20, 8, mode).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, seeds, sweeps);
criterion_main!(benches);
