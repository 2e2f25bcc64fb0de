//! Block counts of the beta(a, b) coalescent.
//!
//! From `n` blocks, each group of `n - k + 1` blocks merges at rate
//! `∫ x^{n-k-1} (1-x)^{k-1} Λ(dx)` with `Λ = Beta(a, b)`, so the total rate
//! of jumping to `k` blocks is
//! `g_{nk} = C(n, k-1) B(a+n-k-1, b+k-1) / B(a, b)`.
//! The block count is a death chain with `P{I_n = k} = g_{n,n-k} / g_n`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{Row, TransitionKernel};
use crate::rng::{open_unit, Rng};
use crate::special::{harmonic, ln_beta, ln_binomial, ln_gamma};

/// Default byte budget for cached cumulative rows.
pub const DEFAULT_ROW_CACHE_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoalescentParams {
    pub a: f64,
    pub b: f64,
}

impl CoalescentParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta parameters must be positive, got a={a}, b={b}")));
        }
        Ok(CoalescentParams { a, b })
    }

    pub fn bolthausen_sznitman() -> Self {
        CoalescentParams { a: 1.0, b: 1.0 }
    }

    /// Whether the kernel is a conditioned i.i.d. step law (`b = 1`, `0 < a < 2`).
    pub fn has_step_law(&self) -> bool {
        self.b == 1.0 && self.a < 2.0
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("rate g_{{n,k}} needs 1 <= k < n, got n={n}, k={k}")));
    }
    Ok(())
}

/// `g_{nk}`, rate of the jump from `n` to `k` blocks.
pub fn rate_gnk(p: &CoalescentParams, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok((ln_binomial(nf, kf - 1.0) + ln_beta(p.a + nf - kf - 1.0, p.b + kf - 1.0) - ln_beta(p.a, p.b)).exp())
}

/// `g_{nk}` for `b = 1`: `n!/(n-k+1)! · a · Γ(a+n-k-1)/Γ(a+n-1)`.
pub fn rate_gnk_b1(a: f64, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    Ok((ln_gamma(nf + 1.0) - ln_gamma(nf - kf + 2.0) + a.ln() + ln_gamma(a + nf - kf - 1.0)
        - ln_gamma(a + nf - 1.0))
    .exp())
}

/// Unnormalized row `h(i) = g_{n,n-i}`, `i = 1..n-1`, by the term ratio
/// `h(i+1)/h(i) = (n-i-1)(a+i-1) / ((i+2)(b+n-i-2))`.
fn row_terms(p: &CoalescentParams, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut out = Vec::with_capacity(n - 1);
    let mut h = (ln_binomial(nf, 2.0) + ln_beta(p.a, p.b + nf - 2.0) - ln_beta(p.a, p.b)).exp();
    for i in 1..n {
        out.push(h);
        let fi = i as f64;
        h *= (nf - fi - 1.0) * (p.a + fi - 1.0) / ((fi + 2.0) * (p.b + nf - fi - 2.0));
    }
    out
}

/// `g_n = Σ_k g_{nk}`.
pub fn total_rate(p: &CoalescentParams, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("total rate needs n >= 2, got {n}")));
    }
    Ok(row_terms(p, n).iter().sum())
}

/// Closed form of `g_n` for `b = 1`:
/// `a/(a-2) (1 - Γ(a)Γ(n+1)/Γ(a+n-1))`, or `2(h_n - 1)` when `a = 2`.
pub fn total_rate_b1(a: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("total rate needs n >= 2, got {n}")));
    }
    if a == 2.0 {
        return Ok(2.0 * (harmonic(n as u64) - 1.0));
    }
    let r = (ln_gamma(a) + ln_gamma(n as f64 + 1.0) - ln_gamma(a + n as f64 - 1.0)).exp();
    Ok(a / (a - 2.0) * (1.0 - r))
}

/// `P{I_n = i} = g_{n,n-i} / g_n` as a kernel on states up to `n_max`.
pub fn collision_kernel(p: &CoalescentParams, n_max: Option<usize>) -> TransitionKernel {
    let params = *p;
    let kernel = TransitionKernel::explicit(
        format!("beta({}, {}) coalescent", p.a, p.b),
        n_max,
        move |n| -> Row {
            let terms = row_terms(&params, n);
            let g: f64 = terms.iter().sum();
            terms.into_iter().enumerate().map(|(i, h)| (i + 1, h / g)).collect()
        },
    );
    if p.b == 1.0 && p.a >= 2.0 {
        kernel.with_note("outside the regime with an i.i.d. step law (a >= 2): limit theorems do not apply")
    } else if p.b != 1.0 {
        kernel.with_note("b != 1: the kernel is not a conditioned i.i.d. step law")
    } else {
        kernel
    }
}

/// Samples decrements of the collision chain.
///
/// Total rates are tabulated up front; cumulative rows are cached until the
/// byte budget is spent and otherwise scanned term by term.
#[derive(Debug)]
pub struct CollisionSampler {
    params: CoalescentParams,
    totals: Vec<f64>,
    cache: RwLock<RowCache>,
}

#[derive(Debug)]
struct RowCache {
    rows: HashMap<usize, Arc<[f64]>>,
    bytes: usize,
    budget: usize,
}

impl CollisionSampler {
    pub fn new(p: &CoalescentParams, n_max: usize) -> Result<Self> {
        Self::with_cache_budget(p, n_max, DEFAULT_ROW_CACHE_BYTES)
    }

    pub fn with_cache_budget(p: &CoalescentParams, n_max: usize, budget: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter("collision sampler needs n_max >= 2".into()));
        }
        let mut totals = vec![0.0; n_max + 1];
        for (n, t) in totals.iter_mut().enumerate().skip(2) {
            *t = row_terms(p, n).iter().sum();
        }
        Ok(CollisionSampler {
            params: *p,
            totals,
            cache: RwLock::new(RowCache { rows: HashMap::new(), bytes: 0, budget }),
        })
    }

    pub fn n_max(&self) -> usize {
        self.totals.len() - 1
    }

    pub fn cached_bytes(&self) -> usize {
        self.cache.read().expect("cache lock").bytes
    }

    fn cumulative_row(&self, n: usize) -> Option<Arc<[f64]>> {
        if let Some(r) = self.cache.read().expect("cache lock").rows.get(&n) {
            return Some(r.clone());
        }
        let size = (n - 1) * std::mem::size_of::<f64>();
        let mut cache = self.cache.write().expect("cache lock");
        if let Some(r) = cache.rows.get(&n) {
            return Some(r.clone());
        }
        if cache.bytes + size > cache.budget {
            return None;
        }
        let mut acc = 0.0;
        let row: Arc<[f64]> = row_terms(&self.params, n)
            .into_iter()
            .map(|h| {
                acc += h;
                acc
            })
            .collect();
        cache.bytes += size;
        cache.rows.insert(n, row.clone());
        Some(row)
    }

    /// One decrement `I_n`.
    pub fn sample_decrement<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> usize {
        debug_assert!(n >= 2 && n <= self.n_max());
        let target = open_unit(rng) * self.totals[n];
        if let Some(row) = self.cumulative_row(n) {
            return (row.partition_point(|&c| c < target) + 1).min(n - 1);
        }
        let nf = n as f64;
        let p = &self.params;
        let mut h = (ln_binomial(nf, 2.0) + ln_beta(p.a, p.b + nf - 2.0) - ln_beta(p.a, p.b)).exp();
        let mut acc = 0.0;
        for i in 1..n {
            acc += h;
            if acc >= target {
                return i;
            }
            let fi = i as f64;
            h *= (nf - fi - 1.0) * (p.a + fi - 1.0) / ((fi + 2.0) * (p.b + nf - fi - 2.0));
        }
        n - 1
    }

    /// Number of collisions until one block remains, starting from `n`.
    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<u64> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("collision count needs n >= 2, got {n}")));
        }
        if n > self.n_max() {
            return Err(Error::SizeGuard { n, cap: self.n_max() });
        }
        let mut state = n;
        let mut jumps = 0;
        while state > 1 {
            state -= self.sample_decrement(state, rng);
            jumps += 1;
        }
        Ok(jumps)
    }
}

/// One collision count from `n` blocks.
pub fn simulate_collisions<R: Rng + ?Sized>(p: &CoalescentParams, n: usize, rng: &mut R) -> Result<u64> {
    CollisionSampler::with_cache_budget(p, n.max(2), 0)?.simulate(n, rng)
}
