use deathchain::coalescent::{collision_kernel, CoalescentParams, CollisionSampler};
use deathchain::exact::pmf_x;
use deathchain::limits::bs_b;
use deathchain::rng::replicate_stream;
use deathchain::stats::{chi_square_gof, histogram};

#[test]
fn collision_counts_match_exact_law() {
    let p = CoalescentParams::new(1.5, 1.0).unwrap();
    let sampler = CollisionSampler::new(&p, 12).unwrap();
    let kernel = collision_kernel(&p, None);
    for n in 3..=12usize {
        let counts = (0..1_000_000u64).map(|r| {
            let mut rng = replicate_stream(n as u64, r);
            sampler.simulate(n, &mut rng).unwrap()
        });
        let h = histogram(counts);
        let pv = chi_square_gof(&h, &pmf_x(&kernel, n).unwrap(), 5.0).unwrap().p_value;
        assert!(pv > 1e-3, "n={n}: {pv}");
    }
}

#[test]
fn general_b_counts_match_exact_law() {
    let p = CoalescentParams::new(0.8, 2.5).unwrap();
    let sampler = CollisionSampler::new(&p, 40).unwrap();
    let h = histogram((0..200_000u64).map(|r| sampler.simulate(40, &mut replicate_stream(3, r)).unwrap()));
    let pv = chi_square_gof(&h, &pmf_x(&collision_kernel(&p, None), 40).unwrap(), 5.0).unwrap().p_value;
    assert!(pv > 1e-3, "{pv}");
}

fn iqr(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[3 * v.len() / 4] - v[v.len() / 4]
}

#[test]
fn bolthausen_sznitman_counts_concentrate() {
    let p = CoalescentParams::bolthausen_sznitman();
    let sampler = CollisionSampler::new(&p, 10_000).unwrap();
    let spread = |n: usize| {
        let nf = n as f64;
        let scale = nf.ln().powi(2) / nf;
        let xs: Vec<f64> = (0..10_000u64)
            .map(|r| (sampler.simulate(n, &mut replicate_stream(n as u64, r)).unwrap() as f64 - bs_b(nf)) * scale)
            .collect();
        iqr(xs)
    };
    // relative spread (X_n - b(n)) / b(n) shrinks
    let r3 = spread(1000) / (bs_b(1000.0) * 1000f64.ln().powi(2) / 1000.0);
    let r4 = spread(10_000) / (bs_b(1e4) * 1e4f64.ln().powi(2) / 1e4);
    assert!(r4 < r3, "{r4} vs {r3}");
}
