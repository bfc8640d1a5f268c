use aevo_core::aesthetics::{gcf, mean_hue, reflectional_symmetry, smoothness};
use aevo_core::genesis::{BuiltinGenerator, BuiltinKind};
use aevo_core::{Image, LatentVector};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn noise_image(side: usize) -> Image {
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    Image::from_fn(side, side, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let b = state.to_le_bytes();
        [b[0], b[1], b[2]]
    })
    .unwrap()
}

fn measures(c: &mut Criterion) {
    let img = noise_image(128);
    let mut g = c.benchmark_group("measures_128");
    g.bench_function("gcf", |b| b.iter(|| gcf(black_box(&img))));
    g.bench_function("smoothness", |b| b.iter(|| smoothness(black_box(&img)).unwrap()));
    g.bench_function("hue", |b| b.iter(|| mean_hue(black_box(&img))));
    g.bench_function("symmetry", |b| b.iter(|| reflectional_symmetry(black_box(&img))));
    g.finish();
}

fn generate(c: &mut Criterion) {
    let z = LatentVector::new((0..100).map(|i| ((i as f64) * 0.37).sin()).collect());
    let mut g = c.benchmark_group("generate_128");
    for kind in [BuiltinKind::Linear, BuiltinKind::Coherent] {
        let gen = BuiltinGenerator::new(kind, 0, 100, 128, 128).unwrap();
        g.bench_function(format!("{kind:?}").to_lowercase(), |b| {
            b.iter(|| gen.generate(black_box(&z)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, measures, generate);
criterion_main!(benches);
