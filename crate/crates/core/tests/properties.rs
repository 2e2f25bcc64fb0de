use deathchain::coalescent::{rate_gnk, total_rate, CoalescentParams};
use deathchain::exact::{moments_n, moments_x, pmf_x, renewal_seq};
use deathchain::limits::phi;
use deathchain::rng::replicate_stream;
use deathchain::sim::simulate_replicate;
use deathchain::{JumpLaw, TransitionKernel};
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = Vec<f64>> {
    (0.01f64..1.0, prop::collection::vec(0.0f64..1.0, 0..11)).prop_map(|(p1, rest)| {
        let mut w = vec![p1];
        w.extend(rest);
        w
    })
}

/// Non-increasing weights.
fn decreasing_weights() -> impl Strategy<Value = Vec<f64>> {
    weights().prop_map(|mut w| {
        w.sort_by(|a, b| b.total_cmp(a));
        w
    })
}

#[test]
fn gapped_support_breaks_monotonicity() {
    let law = JumpLaw::custom(&[0.01, 0.0, 0.0, 0.99]).unwrap();
    let a = moments_x(&TransitionKernel::from_law(law), 5, 1).unwrap();
    assert_eq!(a.get(1, 4), 3.0);
    assert!(a.get(1, 5) < 1.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn absorption_pmfs_sum_to_one(w in weights(), n in 1usize..200) {
        let law = JumpLaw::custom(&w).unwrap();
        let p = pmf_x(&TransitionKernel::from_law(law), n).unwrap();
        prop_assert!((p.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn first_moments_bounded(w in weights()) {
        let law = JumpLaw::custom(&w).unwrap();
        let a = moments_x(&TransitionKernel::from_law(law.clone()), 300, 1).unwrap();
        let b = moments_n(&law, 300, 1).unwrap();
        for n in 1..=300 {
            prop_assert!(a.get(1, n) <= (n - 1) as f64 + 1e-9);
            prop_assert!(b.get(1, n) <= n as f64 + 1e-9);
        }
    }

    #[test]
    fn first_moment_monotone_for_decreasing_laws(w in decreasing_weights()) {
        let law = JumpLaw::custom(&w).unwrap();
        let a = moments_x(&TransitionKernel::from_law(law), 300, 1).unwrap();
        for n in 2..=300 {
            prop_assert!(a.get(1, n) >= a.get(1, n - 1) - 1e-12, "n={}", n);
        }
    }

    #[test]
    fn renewal_masses_at_most_one(w in weights()) {
        let u = renewal_seq(&JumpLaw::custom(&w).unwrap(), 500);
        prop_assert!(u.values().iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn kernel_rows_are_distributions(w in weights(), n in 2usize..300) {
        let k = TransitionKernel::from_law(JumpLaw::custom(&w).unwrap());
        let row = k.row(n).unwrap();
        let s: f64 = row.iter().map(|e| e.1).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!(row.iter().all(|&(j, p)| j < n && p >= 0.0));
    }

    #[test]
    fn laplace_exponent_increasing(alpha in 0.05f64..0.95, x in 0.0f64..20.0, dx in 0.01f64..5.0) {
        prop_assert!(phi(alpha, x + dx).unwrap() > phi(alpha, x).unwrap());
    }

    #[test]
    fn coalescent_rates_positive(a in 0.1f64..1.99, b in 0.2f64..4.0, n in 2usize..60) {
        let p = CoalescentParams::new(a, b).unwrap();
        let mut s = 0.0;
        for k in 1..n {
            let g = rate_gnk(&p, n, k).unwrap();
            prop_assert!(g > 0.0);
            s += g;
        }
        let t = total_rate(&p, n).unwrap();
        prop_assert!((s - t).abs() <= 1e-9 * t);
    }

    #[test]
    fn coupled_paths_consistent(w in weights(), n in 2u64..500, seed in any::<u64>()) {
        let law = JumpLaw::custom(&w).unwrap();
        let r = simulate_replicate(&law, n, &mut replicate_stream(seed, 0)).unwrap();
        prop_assert!(r.m >= 1 && r.m < n);
        prop_assert!(r.first_passage >= 1 && r.first_passage <= n);
        prop_assert!(r.y >= 1 && r.y <= n);
        prop_assert_eq!(r.t, r.m + r.m0);
        prop_assert!(r.decomposition_value() >= 0);
        let jumps = r.jump_counts.unwrap();
        prop_assert_eq!(jumps.values().sum::<u64>(), r.m);
        prop_assert_eq!(jumps.iter().map(|(i, c)| i * c).sum::<u64>(), n - 1);
    }
}
