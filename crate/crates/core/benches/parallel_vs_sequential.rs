use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mdbspline::eval::{eval_grid, uniform_grid};
use mdbspline::par::Execution;
use mdbspline::{build, presets, experiment, Strategy};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn grids(c: &mut Criterion) {
    let p = presets::test5();
    let b = build::<f64>(&p.space, Strategy::Rki).unwrap();
    let mut g = c.benchmark_group("eval_grid");
    for n in [1_000, 20_000] {
        let pts = uniform_grid(p.space.a, p.space.b, n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &pts, |bch, pts| {
                bch.iter(|| eval_grid(&b, black_box(pts), exec).unwrap())
            });
        }
    }
    g.finish();
}

fn experiments(c: &mut Criterion) {
    let ps: Vec<_> = ["test1", "test2", "test3", "test4", "join-demo", "elevation-demo"]
        .iter()
        .flat_map(|n| presets::lookup(n).unwrap())
        .collect();
    let methods = [Strategy::Rki, Strategy::Derivative, Strategy::Rde];
    let mut g = c.benchmark_group("experiment_with_oracle");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |bch| bch.iter(|| experiment::run(black_box(&ps), &methods, true, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, grids, experiments);
criterion_main!(benches);
