use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use deathchain::coalescent::{CoalescentParams, CollisionSampler};
use deathchain::exact::{moments_n, moments_x, pmf_x};
use deathchain::limits::phi;
use deathchain::rng::replicate_stream;
use deathchain::sim::simulate_replicate;
use deathchain::{JumpLaw, StableLaw, TransitionKernel};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    let kernel = TransitionKernel::from_law(JumpLaw::bolthausen_sznitman());
    for n in [1_000usize, 10_000] {
        g.bench_with_input(BenchmarkId::new("moments_x_k2", n), &n, |b, &n| {
            b.iter(|| moments_x(&kernel, n, 2).unwrap())
        });
    }
    g.bench_function("moments_x_k4_n10000", |b| b.iter(|| moments_x(&kernel, 10_000, 4).unwrap()));
    g.bench_function("moments_n_k2_n10000", |b| {
        let law = JumpLaw::beta_col_b1(1.5).unwrap();
        b.iter(|| moments_n(&law, 10_000, 2).unwrap())
    });
    g.bench_function("pmf_x_n1000", |b| b.iter(|| pmf_x(&kernel, 1000).unwrap()));
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    for (name, law) in [
        ("bs", JumpLaw::bolthausen_sznitman()),
        ("beta_1.5", JumpLaw::beta_col_b1(1.5).unwrap()),
        ("geometric_0.5", JumpLaw::geometric(0.5).unwrap()),
    ] {
        g.bench_function(BenchmarkId::new(name, 10_000), |b| {
            let mut r = 0u64;
            b.iter(|| {
                r += 1;
                simulate_replicate(&law, 10_000, &mut replicate_stream(1, r)).unwrap()
            })
        });
    }
    let p = CoalescentParams::new(1.5, 1.0).unwrap();
    let sampler = CollisionSampler::new(&p, 1000).unwrap();
    g.bench_function("collisions_a1.5_n1000", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r += 1;
            sampler.simulate(1000, &mut replicate_stream(2, r)).unwrap()
        })
    });
    g.finish();
}

fn limits(c: &mut Criterion) {
    let mut g = c.benchmark_group("limits");
    let law = StableLaw::unit_skewed(1.5).unwrap();
    g.bench_function("stable_cdf", |b| b.iter(|| law.cdf(black_box(0.7)).unwrap()));
    g.bench_function("stable_cdf_far", |b| b.iter(|| law.cdf(black_box(-25.0)).unwrap()));
    g.bench_function("phi", |b| b.iter(|| phi(black_box(0.5), black_box(3.3)).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, simulation, limits);
criterion_main!(benches);
