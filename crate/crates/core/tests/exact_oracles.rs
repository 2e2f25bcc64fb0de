use deathchain::exact::{moments_n, moments_x, pmf_n, pmf_s, pmf_w, pmf_x, pmf_y, renewal_seq};
use deathchain::{JumpLaw, TransitionKernel};

#[test]
fn moments_n_geometric_matches_walk_sum() {
    let law = JumpLaw::geometric(0.5).unwrap();
    let b = moments_n(&law, 10, 1).unwrap().get(1, 10);
    let want = 1.0 + (1..=9).map(|m| pmf_s(&law, m, 9).pmf.cdf(9)).sum::<f64>();
    assert!((b - want).abs() < 1e-12, "{b} vs {want}");
}

#[test]
fn moments_n_bs_scale() {
    let n = 10_000;
    let b = moments_n(&JumpLaw::bolthausen_sznitman(), n, 1).unwrap().get(1, n);
    let r = b * (n as f64).ln() / n as f64;
    assert!((0.8..=1.2).contains(&r), "{r}");
}

#[test]
fn pmf_n_mean_matches_moments() {
    for law in [JumpLaw::bolthausen_sznitman(), JumpLaw::geometric(0.3).unwrap(), JumpLaw::beta_col_b1(0.7).unwrap()] {
        let t = moments_n(&law, 100, 1).unwrap();
        for n in 1..=100 {
            assert!((pmf_n(&law, n).unwrap().mean() - t.get(1, n)).abs() < 1e-10, "{law} n={n}");
        }
    }
}

#[test]
fn first_moment_bounds_and_monotonicity() {
    for law in [JumpLaw::bolthausen_sznitman(), JumpLaw::geometric(0.8).unwrap(), JumpLaw::beta_col_b1(1.9).unwrap()] {
        let x = moments_x(&TransitionKernel::from_law(law.clone()), 2000, 2).unwrap();
        let nn = moments_n(&law, 2000, 1).unwrap();
        for n in 1..=2000 {
            assert!(x.get(1, n) <= (n - 1) as f64 + 1e-9);
            assert!(nn.get(1, n) <= n as f64 + 1e-9);
            assert!(x.get(2, n) >= 0.0);
            if n > 1 {
                assert!(x.get(1, n) >= x.get(1, n - 1) - 1e-12, "{law} n={n}");
            }
        }
    }
}

#[test]
fn renewal_masses_bounded() {
    for law in [JumpLaw::bolthausen_sznitman(), JumpLaw::beta_col_b1(1.5).unwrap(), JumpLaw::custom(&[0.1, 0.0, 0.9]).unwrap()] {
        let u = renewal_seq(&law, 3000);
        assert_eq!(u.get(0), 1.0);
        assert!(u.values().iter().all(|&v| v <= 1.0 + 1e-12));
    }
}

#[test]
fn gap_law_approaches_stationary_gap() {
    for law in [JumpLaw::geometric(0.5).unwrap(), JumpLaw::beta_col_b1(0.5).unwrap(), JumpLaw::custom(&[0.3, 0.3, 0.4]).unwrap()] {
        let mut prev = f64::INFINITY;
        for n in [50, 100, 200, 400] {
            let tv = pmf_y(&law, n).unwrap().tv_distance(&pmf_w(&law, 4 * n).unwrap());
            assert!(tv < prev || tv < 1e-12, "{law} n={n}: {tv}");
            prev = tv;
        }
    }
}

#[test]
fn pmf_x_matches_first_moment_at_moderate_n() {
    let k = TransitionKernel::from_law(JumpLaw::beta_col_b1(0.5).unwrap());
    let p = pmf_x(&k, 1500).unwrap();
    let t = moments_x(&k, 1500, 2).unwrap();
    assert!(p.is_normalized(1e-10));
    assert!((p.mean() - t.get(1, 1500)).abs() < 1e-8 * t.get(1, 1500));
    assert!((p.moment(2) - t.get(2, 1500)).abs() < 1e-8 * t.get(2, 1500));
}
