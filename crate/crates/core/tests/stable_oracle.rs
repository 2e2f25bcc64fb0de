//! The inversion CDF against independently simulated stable variates.

use std::f64::consts::{FRAC_PI_2, PI};

use deathchain::limits::StableLaw;
use deathchain::rng::{open_unit, replicate_stream, Stream};
use deathchain::stats::ks_statistic;

/// Chambers-Mallows-Stuck draw from `S_1(scale, skew, 0)`.
fn cms(alpha: f64, scale: f64, skew: f64, rng: &mut Stream) -> f64 {
    let v = PI * (open_unit(rng) - 0.5);
    let w = -open_unit(rng).ln();
    if alpha == 1.0 {
        let h = FRAC_PI_2 + skew * v;
        let x = (h * v.tan() - skew * (FRAC_PI_2 * w * v.cos() / h).ln()) / FRAC_PI_2;
        return scale * x + skew * scale * scale.ln() / FRAC_PI_2;
    }
    let t = skew * (FRAC_PI_2 * alpha).tan();
    let b = t.atan() / alpha;
    let s = (1.0 + t * t).powf(1.0 / (2.0 * alpha));
    let x = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
        * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
    scale * x
}

fn cell_check(law: StableLaw, grid: &[f64], draws: usize, seed: u64) {
    let p = law.standard();
    let mut counts = vec![0u64; grid.len() - 1];
    // 64 streams so the sample does not depend on one long sequence
    let per = draws / 64;
    for s in 0..64 {
        let mut rng = replicate_stream(seed, s);
        for _ in 0..per {
            let x = cms(p.alpha, p.scale, p.skew, &mut rng);
            if let Some(i) = grid.windows(2).position(|w| x > w[0] && x <= w[1]) {
                counts[i] += 1;
            }
        }
    }
    let total = (per * 64) as f64;
    for (i, w) in grid.windows(2).enumerate() {
        let exact = law.cdf(w[1]).unwrap() - law.cdf(w[0]).unwrap();
        let freq = counts[i] as f64 / total;
        let se = (exact * (1.0 - exact) / total).sqrt();
        assert!((freq - exact).abs() <= 3.0 * se, "cell ({}, {}]: freq {freq} vs {exact}, se {se}", w[0], w[1]);
    }
}

#[test]
fn alpha_three_halves_matches_cms() {
    let law = StableLaw::new(1.5, 1.0).unwrap();
    cell_check(law, &[-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0], 10_000_000, 17);
}

#[test]
fn alpha_one_matches_cms() {
    let law = StableLaw::new(1.0, 1.0).unwrap();
    cell_check(law, &[-6.0, -3.0, -1.5, 0.0, 1.0, 2.0, 4.0, 8.0], 4_000_000, 5);
}

#[test]
fn unit_skewed_law_has_unit_exponent() {
    // E exp(itS) = exp(|t|^α (cos(πα/2) + i sin(πα/2) sgn t))
    let law = StableLaw::unit_skewed(1.5).unwrap();
    for t in [-2.0f64, -0.5, 0.3, 1.0, 3.0] {
        let ang = FRAC_PI_2 * 1.5;
        let e = num_complex_exp(t.abs().powf(1.5) * ang.cos(), t.abs().powf(1.5) * ang.sin() * t.signum());
        let z = law.cf(t);
        assert!((z.re - e.0).abs() < 1e-13 && (z.im - e.1).abs() < 1e-13, "t={t}");
    }
}

fn num_complex_exp(re: f64, im: f64) -> (f64, f64) {
    let m = re.exp();
    (m * im.cos(), m * im.sin())
}

#[test]
fn normal_draws_against_gaussian_case() {
    let law = StableLaw::new(2.0, 1.0).unwrap();
    let tab = law.tabulate(-6.0, 6.0, 2401).unwrap();
    let mut rng = replicate_stream(99, 0);
    let mut xs = Vec::with_capacity(1_000_000);
    while xs.len() < 1_000_000 {
        let r = (-2.0 * open_unit(&mut rng).ln()).sqrt();
        let th = 2.0 * PI * open_unit(&mut rng);
        xs.push(r * th.cos());
        xs.push(r * th.sin());
    }
    let d = ks_statistic(&xs, |x| tab.eval(x)).unwrap();
    assert!(d < 0.005, "{d}");
}
