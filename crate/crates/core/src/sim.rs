//! Monte Carlo of the random-walk coupling.
//!
//! One sequence `ξ_1, ξ_2, ...` drives both the free walk `S_k` and the
//! constrained walk `R_k`, which accepts `ξ_k` only if `R_{k-1} + ξ_k < n`.
//! `M_n` counts accepted jumps until `R` reaches `n - 1`; its law is that
//! of the absorption time `X_n`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::JumpLaw;
use crate::error::{Error, Result};
use crate::exact::pmf_y;
use crate::rng::{self, open_unit, Stream};

/// Default proposal budget per replicate.
pub const DEFAULT_ITERATION_CAP: u64 = 100_000_000;

/// Outcome of one coupled run started from `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub n: u64,
    /// Accepted jumps `M_n`.
    pub m: u64,
    /// First-passage index `N_n = inf{k : S_k >= n}`.
    pub first_passage: u64,
    /// `Y_n = n - S_{N_n - 1}`.
    pub y: u64,
    /// Proposals until `R` first equals `n - 1`.
    pub t: u64,
    /// Rejected proposals `M_n^{(0)}` among the first `t`.
    pub m0: u64,
    /// Accepted jump sizes `i -> M_n^{(i)}`, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jump_counts: Option<BTreeMap<u64, u64>>,
}

impl ReplicateResult {
    /// `M_n - N_n + 1`, the jumps taken after the walk first overshoots.
    /// Zero when `Y_n = 1`.
    pub fn decomposition_value(&self) -> i64 {
        self.m as i64 - self.first_passage as i64 + 1
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub iteration_cap: u64,
    pub record_jumps: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { iteration_cap: DEFAULT_ITERATION_CAP, record_jumps: false }
    }
}

/// One coupled replicate with jump-size counts recorded.
pub fn simulate_replicate(law: &JumpLaw, n: u64, rng: &mut Stream) -> Result<ReplicateResult> {
    simulate_with(law, n, rng, SimOptions { record_jumps: true, ..SimOptions::default() })
}

/// One coupled replicate.
pub fn simulate_with(
    law: &JumpLaw,
    n: u64,
    rng: &mut Stream,
    opts: SimOptions,
) -> Result<ReplicateResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("simulation needs n >= 2, got {n}")));
    }
    let target = n - 1;
    let mut counts = opts.record_jumps.then(BTreeMap::new);
    let (mut r, mut s) = (0u64, 0u64);
    let (mut k, mut m, mut m0) = (0u64, 0u64, 0u64);
    let mut passage: Option<(u64, u64)> = None;
    let mut t = None;
    while t.is_none() || passage.is_none() {
        if k >= opts.iteration_cap {
            return Err(Error::IterationCap(opts.iteration_cap));
        }
        let xi = law.sample(rng);
        k += 1;
        if passage.is_none() {
            let next = s.saturating_add(xi);
            if next >= n {
                passage = Some((k, n - s));
            }
            s = next;
        }
        if t.is_none() {
            if xi < n - r {
                r += xi;
                m += 1;
                if let Some(c) = counts.as_mut() {
                    *c.entry(xi).or_insert(0) += 1;
                }
                if r == target {
                    t = Some(k);
                }
            } else {
                m0 += 1;
            }
        }
    }
    let (first_passage, y) = passage.expect("loop exits with passage set");
    Ok(ReplicateResult { n, m, first_passage, y, t: t.expect("loop exits with t set"), m0, jump_counts: counts })
}

/// Runs replicates `0..reps` on the rayon pool; the output is in replicate
/// order and independent of the schedule.
pub fn run_replicates(
    law: &JumpLaw,
    n: u64,
    reps: u64,
    seed: u64,
    opts: SimOptions,
) -> Result<Vec<ReplicateResult>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::replicate_stream(seed, r);
            simulate_with(law, n, &mut rng, opts)
        })
        .collect()
}

/// Raw per-replicate quantity a tracked statistic is built from.
#[derive(Clone)]
pub enum Quantity {
    M,
    FirstPassage,
    Y,
    T,
    M0,
    /// `M_n - N_n + 1`
    Decomposition,
    Custom { name: String, f: Arc<dyn Fn(&ReplicateResult) -> f64 + Send + Sync> },
}

impl Quantity {
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&ReplicateResult) -> f64 + Send + Sync + 'static,
    {
        Quantity::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        match self {
            Quantity::M => "M",
            Quantity::FirstPassage => "N",
            Quantity::Y => "Y",
            Quantity::T => "T",
            Quantity::M0 => "M0",
            Quantity::Decomposition => "M-N+1",
            Quantity::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, r: &ReplicateResult) -> f64 {
        match self {
            Quantity::M => r.m as f64,
            Quantity::FirstPassage => r.first_passage as f64,
            Quantity::Y => r.y as f64,
            Quantity::T => r.t as f64,
            Quantity::M0 => r.m0 as f64,
            Quantity::Decomposition => r.decomposition_value() as f64,
            Quantity::Custom { f, .. } => f(r),
        }
    }
}

impl fmt::Debug for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(quantity - center) / scale`, summarized over replicates.
#[derive(Debug, Clone)]
pub struct TrackedStatistic {
    pub quantity: Quantity,
    pub center: f64,
    pub scale: f64,
    pub keep_sample: bool,
}

impl TrackedStatistic {
    pub fn raw(quantity: Quantity) -> Self {
        TrackedStatistic { quantity, center: 0.0, scale: 1.0, keep_sample: false }
    }

    pub fn scaled(quantity: Quantity, center: f64, scale: f64) -> Self {
        TrackedStatistic { quantity, center, scale, keep_sample: false }
    }

    pub fn keep(mut self) -> Self {
        self.keep_sample = true;
        self
    }

    pub fn eval(&self, r: &ReplicateResult) -> f64 {
        (self.quantity.eval(r) - self.center) / self.scale
    }
}

/// Moments of one tracked statistic.
#[derive(Debug, Clone, Serialize)]
pub struct StatSummary {
    pub name: String,
    pub center: f64,
    pub scale: f64,
    pub mean: f64,
    /// Raw sample moments `E Z^k`, `k = 1..=4`.
    pub moments: [f64; 4],
    /// Standard errors of `moments`; `None` for a single replicate.
    pub std_errors: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<Vec<f64>>,
}

impl StatSummary {
    pub fn se_mean(&self) -> Option<f64> {
        self.std_errors.map(|s| s[0])
    }

    fn from_values(t: &TrackedStatistic, values: Vec<f64>) -> Self {
        let reps = values.len() as f64;
        // power sums up to order 8 give the moments and their variances
        let mut sums = [0.0f64; 8];
        for &x in &values {
            let mut p = 1.0;
            for s in sums.iter_mut() {
                p *= x;
                *s += p;
            }
        }
        let avg: Vec<f64> = sums.iter().map(|s| s / reps).collect();
        let moments = [avg[0], avg[1], avg[2], avg[3]];
        let std_errors = (values.len() > 1).then(|| {
            let mut se = [0.0; 4];
            for k in 0..4 {
                let var = (avg[2 * k + 1] - avg[k] * avg[k]).max(0.0) * reps / (reps - 1.0);
                se[k] = (var / reps).sqrt();
            }
            se
        });
        StatSummary {
            name: t.quantity.name().to_string(),
            center: t.center,
            scale: t.scale,
            mean: moments[0],
            moments,
            std_errors,
            sample: t.keep_sample.then_some(values),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub law: String,
    pub n: u64,
    pub reps: u64,
    pub seed: u64,
    pub stats: Vec<StatSummary>,
}

impl ExperimentSummary {
    pub fn get(&self, name: &str) -> Option<&StatSummary> {
        self.stats.iter().find(|s| s.name == name)
    }
}

/// Simulates `reps` replicates and summarizes each tracked statistic.
pub fn run_experiment(
    law: &JumpLaw,
    n: u64,
    reps: u64,
    seed: u64,
    tracked: &[TrackedStatistic],
) -> Result<ExperimentSummary> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    let rows: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::replicate_stream(seed, r);
            let res = simulate_with(law, n, &mut rng, SimOptions::default())?;
            Ok(tracked.iter().map(|t| t.eval(&res)).collect())
        })
        .collect::<Result<_>>()?;
    let stats = tracked
        .iter()
        .enumerate()
        .map(|(i, t)| StatSummary::from_values(t, rows.iter().map(|row| row[i]).collect()))
        .collect();
    Ok(ExperimentSummary { law: law.to_string(), n, reps, seed, stats })
}

/// Samples for comparing `M_n - N_n + 1` with an independent `M'_{Y}`.
#[derive(Debug, Clone)]
pub struct DecompositionSamples {
    /// `(M_n - N_n + 1, Y_n)` from coupled replicates.
    pub coupled: Vec<(u64, u64)>,
    /// `M'_Y` with `Y` drawn from the exact law of `Y_n` and a fresh chain.
    pub resampled: Vec<u64>,
}

pub fn decomposition_check(law: &JumpLaw, n: u64, reps: u64, seed: u64) -> Result<DecompositionSamples> {
    let coupled: Vec<(u64, u64)> = run_replicates(law, n, reps, seed, SimOptions::default())?
        .into_iter()
        .map(|r| {
            let v = r.decomposition_value();
            debug_assert!(v >= 0);
            (v as u64, r.y)
        })
        .collect();
    let y_law = pmf_y(law, n as usize)?;
    let resampled = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, rng::domain::RESAMPLE, r);
            let y = y_law.quantile(open_unit(&mut rng)) as u64;
            if y < 2 {
                return Ok(0);
            }
            Ok(simulate_with(law, y, &mut rng, SimOptions::default())?.m)
        })
        .collect::<Result<_>>()?;
    Ok(DecompositionSamples { coupled, resampled })
}
