//! Step distributions on the positive integers.
//!
//! A [`JumpLaw`] is the law of the i.i.d. step `ξ` with `p_k = P{ξ = k}`.
//! Laws are immutable after construction and cheap to clone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pmf::PmfVector;
use crate::rng::open_unit;
use crate::special::ln_gamma;

/// Number of leading tail values cached for table-driven sampling.
const TAIL_CACHE: usize = 4096;

/// Largest value a draw is reported as; heavier draws saturate here.
pub const SAMPLE_CAP: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `p_k = (2-a) Γ(a+k-1) / (Γ(a) Γ(k+2))`, `0 < a < 2`: the step law
    /// behind the β(a, 1) coalescent.
    BetaColB1 { a: f64 },
    /// `p_k = 1 / (k (k+1))`.
    BolthausenSznitman,
    /// `p_k = (1-q) q^{k-1}`.
    Geometric { q: f64 },
    /// Finite table over `1..=K`.
    CustomTable,
}

#[derive(Clone)]
pub struct JumpLaw {
    family: Family,
    /// `p_k` for `CustomTable` (index `k - 1`); empty otherwise.
    table: Arc<[f64]>,
    /// `P{ξ >= n}` at index `n - 1`, for `n = 1..=len`.
    tails: Arc<[f64]>,
}

impl fmt::Debug for JumpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JumpLaw({self})")
    }
}

impl PartialEq for JumpLaw {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.table == other.table
    }
}

impl JumpLaw {
    pub fn beta_col_b1(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 2.0) {
            return Err(Error::InvalidLaw(format!(
                "BetaColB1 requires 0 < a < 2 for non-negative weights, got a = {a}"
            )));
        }
        Ok(Self::closed_form(Family::BetaColB1 { a }))
    }

    pub fn bolthausen_sznitman() -> Self {
        Self::closed_form(Family::BolthausenSznitman)
    }

    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidLaw(format!("Geometric requires 0 < q < 1, got q = {q}")));
        }
        Ok(Self::closed_form(Family::Geometric { q }))
    }

    /// Builds a finite law from weights over `1..=K`; weights are
    /// renormalized and `p_1 > 0` is required.
    pub fn custom(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidLaw("empty probability table".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidLaw("table entries must be finite and non-negative".into()));
        }
        if weights[0] <= 0.0 {
            return Err(Error::InvalidLaw("p_1 must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        while probs.last() == Some(&0.0) {
            probs.pop();
        }
        let mut tails = vec![0.0; probs.len() + 1];
        for k in (0..probs.len()).rev() {
            tails[k] = tails[k + 1] + probs[k];
        }
        // Renormalized so that tail(1) is exactly one.
        let t1 = tails[0];
        for t in tails.iter_mut() {
            *t /= t1;
        }
        tails[0] = 1.0;
        Ok(JumpLaw { family: Family::CustomTable, table: probs.into(), tails: tails.into() })
    }

    fn closed_form(family: Family) -> Self {
        let mut law = JumpLaw { family, table: Arc::from(Vec::new()), tails: Arc::from(Vec::new()) };
        let tails: Vec<f64> = (1..=TAIL_CACHE + 1).map(|n| law.tail_closed_form(n as u64)).collect();
        law.tails = tails.into();
        law
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Finite support bound for table laws.
    pub fn support_max(&self) -> Option<u64> {
        match self.family {
            Family::CustomTable => Some(self.table.len() as u64),
            _ => None,
        }
    }

    /// `P{ξ = k}`; zero for `k = 0` and beyond a table's support.
    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.family {
            Family::BetaColB1 { a } => {
                let kf = k as f64;
                ((2.0 - a).ln() + ln_gamma(a + kf - 1.0) - ln_gamma(a) - ln_gamma(kf + 2.0)).exp()
            }
            Family::BolthausenSznitman => {
                let kf = k as f64;
                1.0 / (kf * (kf + 1.0))
            }
            Family::Geometric { q } => (1.0 - q) * q.powf(k as f64 - 1.0),
            Family::CustomTable => self.table.get(k as usize - 1).copied().unwrap_or(0.0),
        }
    }

    /// `P{ξ >= n}`; one for `n <= 1`.
    pub fn tail(&self, n: u64) -> f64 {
        if n <= 1 {
            return 1.0;
        }
        if let Some(t) = self.tails.get(n as usize - 1) {
            return *t;
        }
        match self.family {
            Family::CustomTable => 0.0,
            _ => self.tail_closed_form(n),
        }
    }

    fn tail_closed_form(&self, n: u64) -> f64 {
        if n <= 1 {
            return 1.0;
        }
        let nf = n as f64;
        match self.family {
            Family::BetaColB1 { a } => {
                (ln_gamma(a + nf - 1.0) - ln_gamma(a) - ln_gamma(nf + 1.0)).exp()
            }
            Family::BolthausenSznitman => 1.0 / nf,
            Family::Geometric { q } => q.powf(nf - 1.0),
            Family::CustomTable => unreachable!("table tails are precomputed"),
        }
    }

    /// `P{ξ > y}` for real `y >= 0`; piecewise constant on `[j-1, j)`.
    pub fn tail_above(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 1.0;
        }
        self.tail(y.floor() as u64 + 1)
    }

    /// `E ξ`, or `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match self.family {
            Family::BetaColB1 { a } if a < 1.0 => Some(1.0 / (1.0 - a)),
            Family::BetaColB1 { .. } | Family::BolthausenSznitman => None,
            Family::Geometric { q } => Some(1.0 / (1.0 - q)),
            Family::CustomTable => {
                Some(self.table.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum())
            }
        }
    }

    /// `Var ξ`, or `None` when infinite (or the mean is infinite).
    pub fn variance(&self) -> Option<f64> {
        match self.family {
            Family::BetaColB1 { .. } | Family::BolthausenSznitman => None,
            Family::Geometric { q } => Some(q / ((1.0 - q) * (1.0 - q))),
            Family::CustomTable => {
                let m = self.mean()?;
                Some(
                    self.table
                        .iter()
                        .enumerate()
                        .map(|(i, p)| {
                            let d = (i + 1) as f64 - m;
                            d * d * p
                        })
                        .sum(),
                )
            }
        }
    }

    /// Probability generating function `E s^ξ`, `0 <= s < 1`, summed to
    /// convergence.
    pub fn pgf(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        let mut pow = s;
        let mut k = 1u64;
        loop {
            let term = self.pmf(k) * pow;
            acc += term;
            if (term < 1e-18 && k > 10) || k > 10_000_000 || self.support_max().is_some_and(|m| k >= m)
            {
                break;
            }
            pow *= s;
            k += 1;
        }
        acc
    }

    /// Draws one step by inversion of the tail function. Draws heavier
    /// than [`SAMPLE_CAP`] saturate there.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = open_unit(rng);
        match self.family {
            Family::BolthausenSznitman => {
                // P{floor(1/u) >= n} = P{u <= 1/n}
                let v = (1.0 / u).floor();
                if v >= SAMPLE_CAP as f64 {
                    SAMPLE_CAP
                } else {
                    v as u64
                }
            }
            Family::Geometric { q } => {
                // P{1 + floor(ln u / ln q) >= n} = P{u <= q^{n-1}}
                let v = 1.0 + (u.ln() / q.ln()).floor();
                if v >= SAMPLE_CAP as f64 {
                    SAMPLE_CAP
                } else {
                    v as u64
                }
            }
            Family::BetaColB1 { .. } | Family::CustomTable => self.invert_tail(u),
        }
    }

    /// Largest `n` with `P{ξ >= n} >= u`.
    fn invert_tail(&self, u: f64) -> u64 {
        let count = self.tails.partition_point(|&t| t >= u);
        if count < self.tails.len() || self.family == Family::CustomTable {
            return count as u64;
        }
        // Beyond the cache: exponential search on the closed form.
        let mut lo = self.tails.len() as u64; // tail(lo) >= u
        let mut hi = lo.saturating_mul(2);
        while self.tail_closed_form(hi) >= u {
            if hi >= SAMPLE_CAP {
                return SAMPLE_CAP;
            }
            lo = hi;
            hi = hi.saturating_mul(2).min(SAMPLE_CAP);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_closed_form(mid) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Tabulates the slowly-varying normalizers up to `n_max`.
    pub fn normalizers(&self, n_max: usize) -> Normalizers {
        Normalizers::new(self, n_max)
    }

    /// `p_1 + ... + p_m` for `m = 0..=n_max`.
    pub fn partial_masses(&self, n_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for k in 1..=n_max {
            acc += self.pmf(k as u64);
            out.push(acc);
        }
        out
    }
}

/// The conditioned step law `P{I_n = k} = p_k / (p_1 + ... + p_{n-1})`
/// on `{1, ..., n-1}`.
pub fn kernel_of(law: &JumpLaw, n: usize) -> Result<PmfVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("kernel_of needs n >= 2, got {n}")));
    }
    let weights: Vec<f64> = (1..n).map(|k| law.pmf(k as u64)).collect();
    let mass: f64 = weights.iter().sum();
    if mass <= 0.0 {
        return Err(Error::InvalidLaw("p_1 + ... + p_{n-1} vanishes".into()));
    }
    Ok(PmfVector::new(1, weights.into_iter().map(|w| w / mass).collect()))
}

/// Partial tail sums and related slowly-varying quantities.
#[derive(Debug, Clone)]
pub struct Normalizers {
    /// `L(n) = Σ_{m=1}^{n} P{ξ >= m}` at index `n`, `n = 0..=n_max`.
    partial_tail_sums: Vec<f64>,
    /// `P{ξ >= n}` at index `n`, `n = 0..=n_max+1` (index 0 unused).
    tails: Vec<f64>,
}

impl Normalizers {
    pub fn new(law: &JumpLaw, n_max: usize) -> Self {
        let n_max = n_max.max(1);
        let tails: Vec<f64> = (0..=n_max as u64 + 1).map(|n| law.tail(n)).collect();
        let mut partial_tail_sums = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0;
        partial_tail_sums.push(0.0);
        for t in &tails[1..=n_max] {
            acc += t;
            partial_tail_sums.push(acc);
        }
        Normalizers { partial_tail_sums, tails }
    }

    pub fn n_max(&self) -> usize {
        self.partial_tail_sums.len() - 1
    }

    /// `L(n)`; panics beyond the tabulated range.
    pub fn l(&self, n: usize) -> f64 {
        self.partial_tail_sums[n]
    }

    /// `∫_0^x P{ξ > y} dy` for `0 <= x <= n_max`.
    pub fn m_trunc(&self, x: f64) -> f64 {
        assert!(x >= 0.0 && x <= self.n_max() as f64, "m_trunc({x}) outside [0, {}]", self.n_max());
        let whole = x.floor() as usize;
        let frac = x - whole as f64;
        let mut v = self.partial_tail_sums[whole];
        if frac > 0.0 {
            v += frac * self.tails[whole + 1];
        }
        v
    }

    /// `w(n) = 1 / P{ξ >= n}`.
    pub fn w(&self, n: usize) -> f64 {
        1.0 / self.tails[n.max(1)]
    }

    pub fn tail(&self, n: usize) -> f64 {
        self.tails[n.max(1)]
    }
}

impl fmt::Display for JumpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::BetaColB1 { a } => write!(f, "beta:a={a}"),
            Family::BolthausenSznitman => write!(f, "bs"),
            Family::Geometric { q } => write!(f, "geometric:q={q}"),
            Family::CustomTable => {
                write!(f, "table:")?;
                for (i, p) in self.table.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_param(body: &str, name: &str) -> Result<f64> {
    let value = body.strip_prefix(&format!("{name}=")).unwrap_or(body);
    value
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("parameter {name}: {e} in {body:?}")))
}

impl FromStr for JumpLaw {
    type Err = Error;

    /// Accepts `bs`, `beta:a=1.5`, `geometric:q=0.5` and
    /// `table:0.5,0.25,0.25` (short forms `beta:1.5`, `geom:0.5` too).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = match s.split_once(':') {
            Some((n, b)) => (n.trim(), b.trim()),
            None => (s, ""),
        };
        match name.to_ascii_lowercase().as_str() {
            "bs" | "bolthausen-sznitman" => Ok(JumpLaw::bolthausen_sznitman()),
            "beta" | "beta-col-b1" | "betacolb1" => JumpLaw::beta_col_b1(parse_param(body, "a")?),
            "geometric" | "geom" => JumpLaw::geometric(parse_param(body, "q")?),
            "table" | "custom" => {
                let weights = body
                    .split(',')
                    .map(|w| {
                        w.trim().parse::<f64>().map_err(|e| Error::Parse(format!("table entry {w:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                JumpLaw::custom(&weights)
            }
            other => Err(Error::Parse(format!("unknown law family {other:?}"))),
        }
    }
}
