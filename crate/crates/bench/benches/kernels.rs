use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hodgepar::exactlin::{q, ExactScalar, Matrix};
use hodgepar::extcalc::{build_aut_model, build_gal_model, hodge_recovery, t_d_for_module, Egl3Template};
use hodgepar::filphi::sample::random_module;
use hodgepar::glncomb::exact_sequence_checks;
use hodgepar::ParabolicShape;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_algebra(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = Matrix::from_fn(24, 24, |_, _| q(rng.gen_range(-9..=9)));
    c.bench_function("rref 24x24", |b| b.iter(|| black_box(&m).rref()));
}

fn combinatorics(c: &mut Criterion) {
    c.bench_function("identities n=6 d_K=3 all shapes", |b| {
        b.iter(|| {
            for s in ParabolicShape::all(6) {
                black_box(exact_sequence_checks(6, 3, Some(&s)).unwrap());
            }
        })
    });
}

fn models(c: &mut Criterion) {
    let t = Egl3Template::standard(5);
    let d3 = t.module(&q(3)).unwrap();
    let d4 = random_module(&mut ChaCha8Rng::seed_from_u64(4), 5, 4, 1, true).unwrap();
    c.bench_function("automorphic model n=4 d_K=2", |b| b.iter(|| build_aut_model(4, 2).unwrap()));
    c.bench_function("Galois model n=3", |b| b.iter(|| build_gal_model(black_box(&d3)).unwrap()));
    c.bench_function("kernel n=3", |b| b.iter(|| t_d_for_module(black_box(&d3)).unwrap()));
    c.bench_function("kernel n=4", |b| b.iter(|| t_d_for_module(black_box(&d4)).unwrap()));
}

fn sweep(c: &mut Criterion) {
    let t = Egl3Template::standard(5);
    let samples: Vec<ExactScalar> = (2..10).map(q).collect();
    let mut g = c.benchmark_group("recovery sweep (8 samples)");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| hodge_recovery(&t, &samples, false).unwrap()));
    g.bench_function("parallel", |b| b.iter(|| hodge_recovery(&t, &samples, true).unwrap()));
    g.finish();
}

criterion_group!(benches, linear_algebra, combinatorics, models, sweep);
criterion_main!(benches);
