use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use quickfv::harness;
use quickfv::problems;
use quickfv::residual::assemble_residual_in;
use quickfv::{Execution, SchemeConfig, State};

fn residual_assembly(c: &mut Criterion) {
    let p = problems::unsteady_burgers();
    let cfg = SchemeConfig::quick();
    let mut g = c.benchmark_group("residual");
    g.sample_size(20);
    for shift in [14u32, 17, 20] {
        let n = 1usize << shift;
        let s = State::from_fn(p.grid(n).unwrap(), |x| p.initial(x)).unwrap();
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            g.bench_with_input(BenchmarkId::new(name, n), &s, |b, s| {
                b.iter(|| assemble_residual_in(exec, black_box(s), &p, &cfg).unwrap())
            });
        }
    }
    g.finish();
}

fn experiment_sweep(c: &mut Criterion) {
    let mut spec = harness::preset("fig8").unwrap();
    spec.grids = vec![32, 64, 128];
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        g.bench_function(name, |b| b.iter(|| harness::run_experiment(black_box(&spec), exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, residual_assembly, experiment_sweep);
criterion_main!(benches);
