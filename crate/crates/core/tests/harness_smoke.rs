use deathchain::harness::{run_acceptance, run_criterion, AcceptanceConfig, Criterion};

#[test]
fn smoke_scale_reports_standard_errors() {
    let r = run_criterion(Criterion::A2, &AcceptanceConfig::default().with_reps(10_000));
    assert!(r.error.is_none(), "{:?}", r.error);
    let mc: Vec<_> = r.rows.iter().filter(|row| row.check.starts_with("MC")).collect();
    assert!(!mc.is_empty());
    assert!(mc.iter().all(|row| row.std_error.is_some_and(|s| s > 0.0)));
}

#[test]
fn identity_criterion_is_fast() {
    let report = run_acceptance(&[Criterion::A6], &AcceptanceConfig::default());
    let r = &report.results[0];
    assert!(r.pass, "{}", r.summary_line());
    assert!(r.runtime_s < 1.0, "{}", r.runtime_s);
}

#[test]
fn failures_are_recorded_not_raised() {
    let mut cfg = AcceptanceConfig::default();
    cfg.set("identity_tol", "0").unwrap();
    let report = run_acceptance(&[Criterion::A6, Criterion::A12], &cfg);
    assert_eq!(report.results.len(), 2);
    assert!(!report.results[0].pass);
    assert!(report.results[1].pass);
    assert!(!report.all_pass());
}
