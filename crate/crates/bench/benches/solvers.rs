//! Criterion comparison of the two solvers across instance sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pickroute_bench::bench_instance;
use pickroute_core::baseline::{solve_ancar, BaselineConfig};
use pickroute_core::model::Family;
use pickroute_core::scheduler::{solve, SchedulerConfig};

fn solver_comparison(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve-smt");
    group.sample_size(10);
    for &tasks in &[100usize, 420, 800] {
        let instance = bench_instance(tasks, 10, Family::Smt, 42);
        group.bench_with_input(
            BenchmarkId::new("done-cpta", tasks),
            &instance,
            |b, inst| {
                let config = SchedulerConfig::default();
                b.iter(|| solve(inst, &config).expect("solves"));
            },
        );
        group.bench_with_input(BenchmarkId::new("a-ncar", tasks), &instance, |b, inst| {
            let config = BaselineConfig::default();
            b.iter(|| solve_ancar(inst, &config).expect("solves"));
        });
    }
    group.finish();
}

criterion_group!(benches, solver_comparison);
criterion_main!(benches);
