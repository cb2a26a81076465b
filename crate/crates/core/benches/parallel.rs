//! Sequential vs rayon execution for the two data-parallel engines.
//! Both modes produce bit-identical output; only wall time differs.

use std::hint::black_box;

use bslab::clt_lab::{sample_row_sum, ArraySpec, IncrementModel};
use bslab::lattice_mc::{mc_price, McConfig};
use bslab::pricing::OptionSpec;
use bslab::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn monte_carlo(c: &mut Criterion) {
    let spec = OptionSpec::new(50.0, 52.0, 0.04, 1.0, 0.15).unwrap();
    let mut group = c.benchmark_group("mc_price");
    for paths in [10_000usize, 200_000] {
        group.throughput(Throughput::Elements(paths as u64));
        for (name, exec) in MODES {
            let cfg = McConfig::with_paths(paths, 1).unwrap().execution(exec);
            group.bench_with_input(BenchmarkId::new(name, paths), &cfg, |b, cfg| {
                b.iter(|| mc_price(black_box(&spec), cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn row_sums(c: &mut Criterion) {
    let models = [
        IncrementModel::normal(0.0225).unwrap(),
        IncrementModel::poisson_jump(1.0, 2.0).unwrap(),
    ];
    let mut group = c.benchmark_group("sample_row_sum");
    group.sample_size(20);
    for model in models {
        let spec = ArraySpec::new(model, 1.0, 256, 10_000, 1).unwrap();
        group.throughput(Throughput::Elements((spec.rows * spec.samples) as u64));
        for (name, exec) in MODES {
            let spec = spec.execution(exec);
            group.bench_with_input(BenchmarkId::new(name, model.kind()), &spec, |b, spec| {
                b.iter(|| sample_row_sum(black_box(spec)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, row_sums);
criterion_main!(benches);
