use std::f64::consts::FRAC_1_SQRT_2;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lqca::automaton::{Alphabet, Automaton, Configuration, Interval, Neighborhood};
use lqca::border::WeightMatrix;
use lqca::evolution::Evolution;
use lqca::numerics::{Amplitude, Tolerance};
use lqca::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn qflip() -> Automaton {
    let c = |re| Amplitude::new(re, 0.0);
    let h = FRAC_1_SQRT_2;
    let alphabet = Alphabet::new(["a", "b"], "a").unwrap();
    Automaton::from_fn(alphabet, Neighborhood::standard(2), |w| match w {
        [0, 0] => vec![c(1.0), c(0.0)],
        [1, 0] => vec![c(0.0), c(1.0)],
        [0, 1] => vec![c(h), c(h)],
        _ => vec![c(h), c(-h)],
    })
}

fn gram(c: &mut Criterion) {
    let a = qflip();
    let mut group = c.benchmark_group("column_gram_window_10");
    group.sample_size(10);
    for (name, mode) in MODES {
        let evo = Evolution::new(&a).with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evo.truncated_column_gram(black_box(Interval::new(0, 9))).unwrap())
        });
    }
    group.finish();
}

fn row_norm(c: &mut Criterion) {
    let a = qflip();
    let d = Configuration::from_cells([(-1, 1)]);
    let mut group = c.benchmark_group("truncated_row_norm_window_18");
    group.sample_size(10);
    for (name, mode) in MODES {
        let evo = Evolution::new(&a).with_execution(mode);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evo.truncated_row_norm(black_box(&d), Interval::new(-17, 0)).unwrap())
        });
    }
    group.finish();
}

fn kleene(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut group = c.benchmark_group("kleene_closure");
    group.sample_size(10);
    for n in [64usize, 256] {
        let weights: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.0..1.0) / n as f64).collect();
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &weights, |b, w| {
                b.iter(|| WeightMatrix::from_weights(n, w).close(&tol, mode))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, gram, row_norm, kleene);
criterion_main!(benches);
