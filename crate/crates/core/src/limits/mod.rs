//! Limit laws of the absorption time and their normalizing sequences.
//!
//! For `0 < α < 1` the limit is the exponential functional `∫ e^{-U_t} dt`
//! of a driftless subordinator with Laplace exponent
//! `Φ(x) = Γ(1-α) Γ(αx+1) / Γ(α(x-1)+1) - 1`; it is represented by its
//! moments. For finite mean and in the `α = 1` regime the limits are
//! stable laws, see [`stable`].

pub mod stable;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::dist::{Family, JumpLaw, Normalizers};
use crate::error::{Error, Result};
use crate::quad::{integrate_pieces, QuadConfig};
use crate::special::{gamma, ln_factorial, ln_gamma};

pub use stable::{StableLaw, StandardParams, TabulatedCdf};

/// Largest order for exponential-functional moments.
pub const EXP_MOMENT_K_CAP: usize = 12;

fn check_alpha_open(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("α = {alpha} outside (0, 1)")))
    }
}

/// Laplace exponent `Φ(x)`, `0 < α < 1`, `x >= 0`.
pub fn phi(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("Φ needs x >= 0, got {x}")));
    }
    Ok((ln_gamma(1.0 - alpha) + ln_gamma(alpha * x + 1.0) - ln_gamma(alpha * (x - 1.0) + 1.0)).exp_m1())
}

/// `∫_0^∞ (1 - e^{-xy}) e^{-y/α} (1 - e^{-y/α})^{-α-1} dy` by quadrature.
///
/// The integrand behaves like `y^{-α}` at the origin; with `y = s^{1/(1-α)}`
/// the transformed integrand is bounded.
pub fn phi_levy_integral(alpha: f64, x: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    let p = 1.0 / (1.0 - alpha);
    let density = |y: f64| {
        let u = -(-y / alpha).exp_m1();
        -(-x * y).exp_m1() * (-y / alpha).exp() / u.powf(alpha + 1.0)
    };
    let integrand = |s: f64| {
        if s <= 0.0 {
            // limit of the transformed integrand at s = 0
            return p * x * alpha.powf(alpha + 1.0);
        }
        let y = s.powf(p);
        density(y) * p * y / s
    };
    // e^{-y/α} is below 1e-20 past y = 46α
    let y_max = 46.0 * alpha;
    let breaks: Vec<f64> = [0.0, 1e-3, 0.05, 0.5, 2.0, 8.0]
        .into_iter()
        .filter(|&y| y < y_max)
        .chain(std::iter::once(y_max))
        .map(|y: f64| y.powf(1.0 - alpha))
        .collect();
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-13, ..QuadConfig::default() };
    integrate_pieces(integrand, &breaks, cfg)
}

/// `E (∫ e^{-U_t} dt)^k = k! / (Φ(1) ⋯ Φ(k))`, `k = 0..=k_max`.
pub fn exp_functional_moments(alpha: f64, k_max: usize) -> Result<Vec<f64>> {
    exp_functional_moments_with(|x| phi(alpha, x), k_max)
}

/// Same for an arbitrary Laplace exponent `φ`.
pub fn exp_functional_moments_with<F: Fn(f64) -> Result<f64>>(phi: F, k_max: usize) -> Result<Vec<f64>> {
    if k_max > EXP_MOMENT_K_CAP {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} exceeds {EXP_MOMENT_K_CAP}")));
    }
    let mut out = vec![1.0];
    for k in 1..=k_max {
        let prev = out[k - 1];
        out.push(prev * k as f64 / phi(k as f64)?);
    }
    Ok(out)
}

/// Mittag-Leffler moments `k! / (Γ(1-α)^k Γ(1+kα))`, `0 <= α < 1`.
pub fn mittag_leffler_moments(alpha: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("α = {alpha} outside [0, 1)")));
    }
    let lg = ln_gamma(1.0 - alpha);
    Ok((0..=k_max)
        .map(|k| (ln_factorial(k as u32) - k as f64 * lg - ln_gamma(1.0 + k as f64 * alpha)).exp())
        .collect())
}

/// `Γ(α(m-1)+1) / (Γ(1-α) Γ(αm+1))`, a moment of order `mα` of `η_α`.
pub fn eta_moment(alpha: f64, m: f64) -> Result<f64> {
    check_alpha_open(alpha)?;
    Ok((ln_gamma(alpha * (m - 1.0) + 1.0) - ln_gamma(1.0 - alpha) - ln_gamma(alpha * m + 1.0)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MixedKind {
    /// `E Q^n M^m = n! / ∏_{k=0}^{n} (1 + φ(m+k))`
    QM,
    /// `E Q^n A^m = E Q^n M^m · m! / (φ(1) ⋯ φ(m))`
    QA,
}

pub fn mixed_moments(alpha: f64, n: u32, m: u32, which: MixedKind) -> Result<f64> {
    mixed_moments_with(|x| phi(alpha, x), n, m, which)
}

pub fn mixed_moments_with<F: Fn(f64) -> Result<f64>>(phi: F, n: u32, m: u32, which: MixedKind) -> Result<f64> {
    let mut v = 1.0;
    for k in 0..=n {
        v /= 1.0 + phi((m + k) as f64)?;
    }
    for k in 1..=n {
        v *= k as f64;
    }
    if which == MixedKind::QA {
        for j in 1..=m {
            v *= j as f64 / phi(j as f64)?;
        }
    }
    Ok(v)
}

/// `j! Γ(α(i-1)+1) / (Γ(1-α)^{j+1} Γ(α(i+j)+1))`: the limit of
/// `E w(Y_n)^i N_n^j / w(n)^{i+j}` with `w(n) = 1/P{ξ >= n}`.
pub fn bivar_limit_moments(alpha: f64, i: u32, j: u32) -> Result<f64> {
    check_alpha_open(alpha)?;
    let (i, jf) = (i as f64, j as f64);
    Ok((ln_factorial(j) + ln_gamma(alpha * (i - 1.0) + 1.0)
        - (jf + 1.0) * ln_gamma(1.0 - alpha)
        - ln_gamma(alpha * (i + jf) + 1.0))
    .exp())
}

/// Which limit theorem a normalization belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Regime {
    /// `X_n / b_n -> 1` in probability.
    Wlln,
    /// Finite mean; stable (or normal) limit of `(X_n - b_n) / a_n`.
    StableFiniteMean { alpha: f64, c: f64, finite_variance: bool },
    /// `X_n / a_n` converges to the exponential functional.
    ExpFunctional { alpha: f64 },
    /// Infinite mean with `P{ξ >= n} ~ L(n)/n`; limit `μ_1` with `C = 1`.
    Stable1,
}

type Seq = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Centering `b_n`, scaling `a_n` and target law of `(X_n - b_n) / a_n`.
#[derive(Clone)]
pub struct LimitSpec {
    pub regime: Regime,
    pub target: Option<StableLaw>,
    center: Seq,
    scale: Seq,
}

impl fmt::Debug for LimitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LimitSpec").field("regime", &self.regime).field("target", &self.target).finish()
    }
}

impl LimitSpec {
    fn new(regime: Regime, target: Option<StableLaw>, center: Seq, scale: Seq) -> Self {
        LimitSpec { regime, target, center, scale }
    }

    pub fn a(&self, n: f64) -> f64 {
        (self.scale)(n)
    }

    pub fn b(&self, n: f64) -> f64 {
        (self.center)(n)
    }

    pub fn standardize(&self, x: f64, n: f64) -> f64 {
        (x - self.b(n)) / self.a(n)
    }
}

/// Weak law: `b_n = a_n = n / L(n)`, `L(n) = Σ_{m<=n} P{ξ >= m}`, tabulated
/// up to `n_max`.
pub fn normalizers_thm1(law: &JumpLaw, n_max: usize) -> LimitSpec {
    let table = Arc::new(law.normalizers(n_max));
    let t2 = table.clone();
    let b: Seq = Arc::new(move |n| n / table.l((n as usize).min(table.n_max())));
    let a: Seq = Arc::new(move |n| n / t2.l((n as usize).min(t2.n_max())));
    LimitSpec::new(Regime::Wlln, None, b, a)
}

/// Finite-mean stable normalization.
pub fn normalizers_thm2(law: &JumpLaw) -> Result<LimitSpec> {
    let m = law.mean().ok_or(Error::InfiniteMean("normalizers_thm2"))?;
    if let Some(var) = law.variance() {
        let b: Seq = Arc::new(move |n| n / m);
        let a: Seq = Arc::new(move |n| (var * n / (m * m * m)).sqrt());
        let target = StableLaw::new(2.0, 1.0)?;
        return Ok(LimitSpec::new(
            Regime::StableFiniteMean { alpha: 2.0, c: 1.0, finite_variance: true },
            Some(target),
            b,
            a,
        ));
    }
    match law.family() {
        Family::BetaColB1 { a } if a < 1.0 => {
            let alpha = 2.0 - a;
            let c = 1.0 / gamma(a);
            let k = (alpha - 1.0).powf((alpha + 1.0) / alpha);
            let b: Seq = Arc::new(move |n| n * (alpha - 1.0));
            let s: Seq = Arc::new(move |n| k * n.powf(1.0 / alpha));
            Ok(LimitSpec::new(
                Regime::StableFiniteMean { alpha, c, finite_variance: false },
                Some(StableLaw::new(alpha, c)?),
                b,
                s,
            ))
        }
        _ => Err(Error::OutsideRegime("no closed-form stable normalization for this law")),
    }
}

/// Exponential-functional normalization `a_n = Γ(2-α) n^α`, `b_n = 0`, for
/// `BetaColB1(a)` with `1 < a < 2`, `α = 2 - a`.
pub fn normalizers_thm3(law: &JumpLaw) -> Result<LimitSpec> {
    match law.family() {
        Family::BetaColB1 { a } if a > 1.0 => {
            let alpha = 2.0 - a;
            let g = gamma(2.0 - alpha);
            Ok(LimitSpec::new(
                Regime::ExpFunctional { alpha },
                None,
                Arc::new(|_| 0.0),
                Arc::new(move |n| g * n.powf(alpha)),
            ))
        }
        _ => Err(Error::OutsideRegime("exponential-functional limit needs BetaColB1 with 1 < a < 2")),
    }
}

/// Closed-form normalizers for `p_k = 1/(k(k+1))`: `c(x) = x`,
/// `b(x) = x/log x + x log log x / (log x)^2`, `a(x) = b(x)^2 / x`.
pub fn bs_b(x: f64) -> f64 {
    let l = x.ln();
    x / l + x * l.ln() / (l * l)
}

pub fn bs_a(x: f64) -> f64 {
    let b = bs_b(x);
    b * b / x
}

/// `c`, `ψ`, `b` and `a` for the `α = 1` regime computed from the law:
/// `c(x)` is the first `n` with `x P{ξ >= n} <= 1`, `ψ(x) = x ∫_0^{c(x)} P{ξ > y} dy`,
/// `b` inverts `ψ` by bisection and `a(x) = b(x) c(b(x)) / x`.
#[derive(Debug, Clone)]
pub struct Stable1Normalizers {
    law: JumpLaw,
    table: Normalizers,
}

impl Stable1Normalizers {
    /// Tables everything needed for arguments up to `x_max`.
    pub fn new(law: &JumpLaw, x_max: f64) -> Result<Self> {
        if law.mean().is_some() {
            return Err(Error::OutsideRegime("the α = 1 normalization needs an infinite mean"));
        }
        let cap = Self::first_below(law, 1.0 / x_max)?;
        Ok(Stable1Normalizers { law: law.clone(), table: law.normalizers(cap as usize) })
    }

    fn first_below(law: &JumpLaw, level: f64) -> Result<u64> {
        let mut hi = 1u64;
        while law.tail(hi) > level {
            hi = hi.checked_mul(2).filter(|&h| h < 1 << 40).ok_or_else(|| {
                Error::Bisection(format!("tail never drops below {level:e}"))
            })?;
        }
        let mut lo = hi / 2;
        // tail(lo) > level >= tail(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if law.tail(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi.max(1))
    }

    pub fn c(&self, x: f64) -> Result<f64> {
        let n = Self::first_below(&self.law, 1.0 / x)?;
        if n as usize > self.table.n_max() {
            return Err(Error::SizeGuard { n: n as usize, cap: self.table.n_max() });
        }
        Ok(n as f64)
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(x * self.table.m_trunc(self.c(x)?))
    }

    /// Solves `ψ(b) = x` to relative tolerance `1e-9`.
    pub fn b(&self, x: f64) -> Result<f64> {
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        if self.psi(lo)? > x {
            return Err(Error::Bisection(format!("ψ(1) already exceeds {x}")));
        }
        while self.psi(hi)? < x {
            lo = hi;
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Bisection(format!("no bracket for ψ(b) = {x}")));
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-9 * hi {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if self.psi(mid)? < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Bisection(format!("ψ(b) = {x} did not converge")))
    }

    pub fn a(&self, x: f64) -> Result<f64> {
        let b = self.b(x)?;
        Ok(b * self.c(b)? / x)
    }
}

/// Normalization in the `α = 1` regime, closed form for the
/// Bolthausen-Sznitman step law and computed otherwise (valid for
/// arguments up to `x_max`).
pub fn normalizers_thm4(law: &JumpLaw, x_max: f64) -> Result<LimitSpec> {
    let target = Some(StableLaw::new(1.0, 1.0)?);
    if law.family() == Family::BolthausenSznitman {
        return Ok(LimitSpec::new(Regime::Stable1, target, Arc::new(bs_b), Arc::new(bs_a)));
    }
    let g = Arc::new(Stable1Normalizers::new(law, x_max)?);
    let g2 = g.clone();
    Ok(LimitSpec::new(
        Regime::Stable1,
        target,
        Arc::new(move |x| g.b(x).unwrap_or(f64::NAN)),
        Arc::new(move |x| g2.a(x).unwrap_or(f64::NAN)),
    ))
}
