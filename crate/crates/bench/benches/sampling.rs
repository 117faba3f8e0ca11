use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpts_core::gp::{cholesky_jittered, kernel_matrix, GpSampler};
use gpts_core::rng::rng_from_seed;
use gpts_core::{ActionSpace, KernelSpec};

fn cholesky(c: &mut Criterion) {
    let spec = KernelSpec::matern_half(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("cholesky");
    for n in [8usize, 16, 24] {
        let space = ActionSpace::cube_grid(2, n).unwrap();
        let k = kernel_matrix(&spec, space.points()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &k, |b, k| {
            b.iter(|| cholesky_jittered(black_box(k), 1.0).unwrap())
        });
    }
    group.finish();
}

fn draw(c: &mut Criterion) {
    let spec = KernelSpec::matern_half(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("draw");
    let grid = ActionSpace::cube_grid(1, 1024).unwrap();
    let coords: Vec<f64> = grid.points().iter().map(|p| p[0]).collect();
    let samplers = [
        ("markov_1d", GpSampler::markov_1d(&spec, &coords).unwrap()),
        ("dense_1d", GpSampler::dense(&spec, grid.points()).unwrap()),
    ];
    for (name, sampler) in &samplers {
        let mut rng = rng_from_seed(1);
        let mut out = vec![0.0; sampler.len()];
        group.bench_function(*name, |b| b.iter(|| sampler.sample_into(1.0, &mut rng, black_box(&mut out))));
    }
    group.finish();
}

criterion_group!(benches, cholesky, draw);
criterion_main!(benches);
