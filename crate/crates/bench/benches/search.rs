use aevo_core::search::{cma_run, sphere, CmaEs, FnObjective};
use aevo_core::OptimizerConfig;
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

fn cma_step(c: &mut Criterion) {
    let config = OptimizerConfig::default();
    c.bench_function("cma_ask_tell_n100_lambda40", |b| {
        b.iter_batched(
            || CmaEs::new(&config).unwrap(),
            |mut es| {
                let candidates = es.ask();
                let fitness: Vec<f64> = candidates.iter().map(|z| sphere(z.as_slice())).collect();
                es.tell(&candidates, &fitness);
                es
            },
            BatchSize::SmallInput,
        )
    });
}

fn sphere_run(c: &mut Criterion) {
    let config = OptimizerConfig {
        latent_dim: 20,
        population: 12,
        generations: 100,
        budget_evals: 1200,
        ..OptimizerConfig::default()
    };
    let mut g = c.benchmark_group("sphere_run");
    g.sample_size(10);
    g.bench_function("cma_n20_100_generations", |b| {
        b.iter(|| cma_run(&FnObjective(sphere), black_box(&config)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, cma_step, sphere_run);
criterion_main!(benches);
