//! Exact finite computations: distributions and moments of the absorption
//! time `X_n`, the first-passage index `N_n`, the walk `S_m`, the gap
//! `Y_n = n - S_{N_n - 1}` and the stationary gap `W`.
//!
//! Everything is plain `f64` dynamic programming.

use serde::Serialize;

use crate::dist::JumpLaw;
use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;
use crate::pmf::PmfVector;
use crate::special::binomial_rows;

/// Default state cap for [`pmf_x`]; the cost is cubic in `n` for dense kernels.
pub const DEFAULT_PMF_X_CAP: usize = 2000;
/// Largest state for moment tables.
pub const MOMENT_N_CAP: usize = 100_000;
/// Largest moment order for moment tables.
pub const MOMENT_K_CAP: usize = 8;

/// Law of `X_n` under `kernel`, with the default size cap.
pub fn pmf_x(kernel: &TransitionKernel, n: usize) -> Result<PmfVector> {
    pmf_x_with_cap(kernel, n, DEFAULT_PMF_X_CAP)
}

/// Law of `X_n`, the number of steps from state `n` down to state 1.
///
/// Mass is pushed forward from `n` through every intermediate state in
/// decreasing order; a state's step distribution is final once all higher
/// states have been processed, and is released right after use.
pub fn pmf_x_with_cap(kernel: &TransitionKernel, n: usize, cap: usize) -> Result<PmfVector> {
    if n == 0 {
        return Err(Error::InvalidParameter("states start at 1".into()));
    }
    if n > cap {
        return Err(Error::SizeGuard { n, cap });
    }
    if n == 1 {
        return Ok(PmfVector::point_mass(0));
    }
    let prepared = kernel.prepare(n)?;
    // steps[s][j] = P{chain started at n visits s after exactly j steps}
    let mut steps: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    steps[n] = vec![1.0];
    for s in (2..=n).rev() {
        let src = std::mem::take(&mut steps[s]);
        if src.is_empty() {
            continue;
        }
        for (k, q) in prepared.row(s)? {
            if q == 0.0 {
                continue;
            }
            let dst = &mut steps[s - k];
            if dst.len() < src.len() + 1 {
                dst.resize(src.len() + 1, 0.0);
            }
            for (d, &v) in dst[1..].iter_mut().zip(&src) {
                *d += q * v;
            }
        }
    }
    let absorbed = std::mem::take(&mut steps[1]);
    Ok(PmfVector::new(0, absorbed).trimmed())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentKind {
    /// `a_k(n) = E X_n^k`
    X,
    /// `b_k(n) = E N_n^k`
    N,
}

/// Moment grid `values[k][n]`, `0 <= k <= k_max`, `1 <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    kind: MomentKind,
    k_max: usize,
    n_max: usize,
    /// Interleaved: index `n * (k_max + 1) + k`.
    flat: Vec<f64>,
}

impl MomentTable {
    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `E Z_n^k`; panics outside the table.
    pub fn get(&self, k: usize, n: usize) -> f64 {
        assert!(k <= self.k_max && (1..=self.n_max).contains(&n), "({k}, {n}) outside table");
        self.flat[n * (self.k_max + 1) + k]
    }

    /// `(n, k, value)` rows in `n`-major order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n_max).flat_map(move |n| (0..=self.k_max).map(move |k| (n, k, self.get(k, n))))
    }
}

fn check_moment_request(n_max: usize, k_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if k_max > MOMENT_K_CAP {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} exceeds {MOMENT_K_CAP}")));
    }
    if n_max > MOMENT_N_CAP {
        return Err(Error::SizeGuard { n: n_max, cap: MOMENT_N_CAP });
    }
    let growth = k_max as f64 * (n_max as f64).ln();
    if growth > 700.0 {
        return Err(Error::OverflowGuard(growth));
    }
    Ok(())
}

/// `out[j] = Σ_{i=1}^{n-1} p[i] * flat[(n-i)*K + j]` for `j < K`.
#[inline]
fn convolve_step<const K: usize>(p: &[f64], flat: &[f64], n: usize) -> [f64; K] {
    // Two accumulator banks break the add dependency chain.
    let mut even = [0.0; K];
    let mut odd = [0.0; K];
    let mut i = 1;
    while i + 1 < n {
        let (p0, p1) = (p[i], p[i + 1]);
        let b0 = (n - i) * K;
        let b1 = b0 - K;
        for j in 0..K {
            even[j] += p0 * flat[b0 + j];
            odd[j] += p1 * flat[b1 + j];
        }
        i += 2;
    }
    if i < n {
        let b0 = (n - i) * K;
        for j in 0..K {
            even[j] += p[i] * flat[b0 + j];
        }
    }
    for j in 0..K {
        even[j] += odd[j];
    }
    even
}

/// Fills `flat` for `n = start..=n_max`, given `flat` already set below `start`.
/// `base(n)` is the constant term of the recursion and `scale(n)` multiplies
/// the convolution.
fn run_law_recursion<const K: usize>(
    p: &[f64],
    flat: &mut [f64],
    start: usize,
    n_max: usize,
    binom: &[Vec<f64>],
    base: impl Fn(usize) -> f64,
    scale: impl Fn(usize) -> f64,
) {
    for n in start..=n_max {
        let s = convolve_step::<K>(p, flat, n);
        let r = scale(n);
        let c = base(n);
        for k in 0..K {
            let mut v = 0.0;
            for j in 0..=k {
                v += binom[k][j] * s[j];
            }
            flat[n * K + k] = c + r * v;
        }
    }
}

macro_rules! dispatch_k {
    ($kk:expr, $f:ident, $($arg:expr),*) => {
        match $kk {
            1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            3 => $f::<3>($($arg),*),
            4 => $f::<4>($($arg),*),
            5 => $f::<5>($($arg),*),
            6 => $f::<6>($($arg),*),
            7 => $f::<7>($($arg),*),
            8 => $f::<8>($($arg),*),
            9 => $f::<9>($($arg),*),
            _ => unreachable!("k_max checked"),
        }
    };
}

/// `a_k(n) = E X_n^k` from `a_k(n) = Σ_i P{I_n = i} Σ_j C(k, j) a_j(n - i)`,
/// which is the binomial expansion of `E (X_{n-I_n} + 1)^k`.
pub fn moments_x(kernel: &TransitionKernel, n_max: usize, k_max: usize) -> Result<MomentTable> {
    check_moment_request(n_max, k_max)?;
    let kk = k_max + 1;
    let binom = binomial_rows(k_max);
    let mut flat = vec![0.0; (n_max + 1) * kk];
    // X_1 = 0
    flat[kk] = 1.0;
    let prepared = kernel.prepare(n_max)?;
    if let Some((p, prefix)) = prepared.step_masses() {
        fn go<const K: usize>(
            p: &[f64],
            prefix: &[f64],
            flat: &mut [f64],
            n_max: usize,
            binom: &[Vec<f64>],
        ) {
            run_law_recursion::<K>(p, flat, 2, n_max, binom, |_| 0.0, |n| 1.0 / prefix[n - 1]);
        }
        dispatch_k!(kk, go, p, prefix, &mut flat, n_max, &binom);
    } else {
        for n in 2..=n_max {
            let row = prepared.row(n)?;
            for k in 0..kk {
                let mut v = 0.0;
                for &(i, q) in &row {
                    let b = (n - i) * kk;
                    let mut inner = 0.0;
                    for j in 0..=k {
                        inner += binom[k][j] * flat[b + j];
                    }
                    v += q * inner;
                }
                flat[n * kk + k] = v;
            }
        }
    }
    for n in 1..=n_max {
        flat[n * kk] = 1.0;
    }
    Ok(MomentTable { kind: MomentKind::X, k_max, n_max, flat })
}

/// `b_k(n) = E N_n^k` from `N_n = 1 + N'_{n-ξ} 1{ξ < n}`:
/// `b_k(n) = P{ξ >= n} + Σ_{i<n} p_i Σ_j C(k, j) b_j(n - i)`, `N_1 = 1`.
pub fn moments_n(law: &JumpLaw, n_max: usize, k_max: usize) -> Result<MomentTable> {
    check_moment_request(n_max, k_max)?;
    let kk = k_max + 1;
    let binom = binomial_rows(k_max);
    let p: Vec<f64> = (0..=n_max).map(|k| law.pmf(k as u64)).collect();
    let tails: Vec<f64> = (0..=n_max).map(|n| law.tail(n as u64)).collect();
    let mut flat = vec![0.0; (n_max + 1) * kk];
    fn go<const K: usize>(
        p: &[f64],
        tails: &[f64],
        flat: &mut [f64],
        n_max: usize,
        binom: &[Vec<f64>],
    ) {
        run_law_recursion::<K>(p, flat, 1, n_max, binom, |n| tails[n], |_| 1.0);
    }
    dispatch_k!(kk, go, &p, &tails, &mut flat, n_max, &binom);
    for n in 1..=n_max {
        flat[n * kk] = 1.0;
    }
    Ok(MomentTable { kind: MomentKind::N, k_max, n_max, flat })
}

/// A pmf on `0..=n_cap` together with the mass beyond `n_cap`.
#[derive(Debug, Clone)]
pub struct TruncatedPmf {
    pub pmf: PmfVector,
    pub residual: f64,
}

/// Law of `S_m = ξ_1 + ... + ξ_m` on `0..=n_cap`.
pub fn pmf_s(law: &JumpLaw, m: usize, n_cap: usize) -> TruncatedPmf {
    let p: Vec<f64> = (0..=n_cap).map(|k| law.pmf(k as u64)).collect();
    let mut cur = vec![0.0; n_cap + 1];
    cur[0] = 1.0;
    for step in 1..=m {
        let mut next = vec![0.0; n_cap + 1];
        // S_step >= step
        for j in step.min(n_cap + 1)..=n_cap {
            let mut acc = 0.0;
            for k in 1..=(j + 1 - step) {
                acc += p[k] * cur[j - k];
            }
            next[j] = acc;
        }
        cur = next;
    }
    let kept: f64 = cur.iter().sum();
    TruncatedPmf { pmf: PmfVector::new(0, cur), residual: (1.0 - kept).max(0.0) }
}

/// Law of `N_n = inf{k >= 1 : S_k >= n}` on `1..=n`, via
/// `P{N_n = m} = Σ_{l<n} P{S_{m-1} = l} P{ξ >= n - l}`.
pub fn pmf_n(law: &JumpLaw, n: usize) -> Result<PmfVector> {
    if n == 0 {
        return Err(Error::InvalidParameter("pmf_n needs n >= 1".into()));
    }
    let p: Vec<f64> = (0..n).map(|k| law.pmf(k as u64)).collect();
    let tails: Vec<f64> = (0..=n).map(|k| law.tail(k as u64)).collect();
    // cur = law of S_{m-1} restricted to 0..n-1
    let mut cur = vec![0.0; n];
    cur[0] = 1.0;
    let mut out = Vec::with_capacity(n);
    for m in 1..=n {
        let lo = m - 1;
        let prob: f64 = (lo..n).map(|l| cur[l] * tails[n - l]).sum();
        out.push(prob);
        if m == n {
            break;
        }
        let mut next = vec![0.0; n];
        for j in m..n {
            let mut acc = 0.0;
            for k in 1..=(j + 1 - m) {
                acc += p[k] * cur[j - k];
            }
            next[j] = acc;
        }
        cur = next;
    }
    Ok(PmfVector::new(1, out))
}

/// Renewal masses `u_k = Σ_i P{S_i = k}`, `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct RenewalSeq {
    u: Vec<f64>,
}

impl RenewalSeq {
    pub fn get(&self, k: usize) -> f64 {
        self.u[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// `u_0 = 1`, `u_k = Σ_{i=1}^{k} p_i u_{k-i}`.
pub fn renewal_seq(law: &JumpLaw, n: usize) -> RenewalSeq {
    let p: Vec<f64> = (0..=n).map(|k| law.pmf(k as u64)).collect();
    let mut u = vec![0.0; n + 1];
    u[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            acc += p[i] * u[k - i];
        }
        u[k] = acc;
    }
    RenewalSeq { u }
}

/// Law of `Y_n = n - S_{N_n - 1}` on `1..=n`:
/// `P{Y_n = j} = P{ξ >= j} u_{n-j}`.
pub fn pmf_y(law: &JumpLaw, n: usize) -> Result<PmfVector> {
    if n == 0 {
        return Err(Error::InvalidParameter("pmf_y needs n >= 1".into()));
    }
    let u = renewal_seq(law, n);
    Ok(pmf_y_from_renewal(law, n, &u))
}

/// [`pmf_y`] reusing a precomputed renewal sequence of length `> n`.
pub fn pmf_y_from_renewal(law: &JumpLaw, n: usize, u: &RenewalSeq) -> PmfVector {
    let probs = (1..=n).map(|j| law.tail(j as u64) * u.get(n - j)).collect();
    PmfVector::new(1, probs)
}

/// Stationary gap law `P{W = k} = P{ξ >= k} / E ξ`, `k = 1..=k_max`.
pub fn pmf_w(law: &JumpLaw, k_max: usize) -> Result<PmfVector> {
    let m = law.mean().ok_or(Error::InfiniteMean("pmf_w"))?;
    Ok(PmfVector::new(1, (1..=k_max).map(|k| law.tail(k as u64) / m).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs() -> JumpLaw {
        JumpLaw::bolthausen_sznitman()
    }

    #[test]
    fn pmf_x_small_cases() {
        let k = TransitionKernel::from_law(bs());
        assert_eq!(pmf_x(&k, 1).unwrap(), PmfVector::point_mass(0));
        assert_eq!(pmf_x(&k, 2).unwrap(), PmfVector::point_mass(1));
        let p3 = pmf_x(&k, 3).unwrap();
        assert!((p3.get(1) - 0.25).abs() < 1e-15);
        assert!((p3.get(2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pmf_x_counterexample() {
        let k = TransitionKernel::jump_to_bottom();
        let p = pmf_x(&k, 50).unwrap();
        assert!((p.get(49) - 2.0 / 50.0).abs() < 1e-14);
        for j in 1..=48 {
            assert!((p.get(j) - 1.0 / 50.0).abs() < 1e-14, "j={j}");
        }
        assert!((p.total() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pmf_x_cap() {
        let k = TransitionKernel::from_law(bs());
        assert_eq!(pmf_x(&k, 2001), Err(Error::SizeGuard { n: 2001, cap: 2000 }));
        assert!(pmf_x_with_cap(&k, 5, 4).is_err());
    }

    #[test]
    fn moments_x_small_cases() {
        let k = TransitionKernel::from_law(bs());
        let t = moments_x(&k, 10, 4).unwrap();
        for kk in 0..=4 {
            assert_eq!(t.get(kk, 2), 1.0);
        }
        assert!((t.get(1, 3) - 7.0 / 4.0).abs() < 1e-15);
        assert_eq!(t.get(1, 1), 0.0);
        assert_eq!(t.get(0, 1), 1.0);
    }

    #[test]
    fn moment_guards() {
        let k = TransitionKernel::from_law(bs());
        assert!(moments_x(&k, 10, 9).is_err());
        assert!(moments_x(&k, MOMENT_N_CAP + 1, 1).is_err());
        assert!(matches!(moments_x(&k, 100_000, 8), Err(Error::SizeGuard { .. }) | Err(Error::OverflowGuard(_))) || moments_x(&k, 10, 8).is_ok());
        assert!(check_moment_request(100_000, 70).is_err());
    }

    #[test]
    fn moments_n_small_cases() {
        let t = moments_n(&bs(), 5, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(t.get(k, 1), 1.0);
        }
        // N_2 = 1 + 1{ξ = 1}
        assert!((t.get(1, 2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn pmf_s_examples() {
        let t = pmf_s(&bs(), 0, 5);
        assert_eq!(t.pmf.get(0), 1.0);
        let t = pmf_s(&bs(), 2, 5);
        assert!((t.pmf.get(2) - 0.25).abs() < 1e-15);
        let geo = JumpLaw::geometric(0.5).unwrap();
        let t = pmf_s(&geo, 3, 20);
        // negative binomial: C(j-1, 2) (1/2)^j
        for j in 0..=20usize {
            let want = if j < 3 { 0.0 } else { ((j - 1) * (j - 2) / 2) as f64 * 0.5f64.powi(j as i32) };
            assert!((t.pmf.get(j) - want).abs() < 1e-12, "j={j}");
        }
        assert!((t.pmf.total() + t.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_n_examples() {
        assert_eq!(pmf_n(&bs(), 1).unwrap(), PmfVector::point_mass(1));
        let p = pmf_n(&bs(), 3).unwrap();
        assert!((p.get(1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn renewal_examples() {
        let u = renewal_seq(&bs(), 5);
        assert_eq!(u.get(0), 1.0);
        assert!((u.get(1) - 0.5).abs() < 1e-15);
        assert!((u.get(2) - 5.0 / 12.0).abs() < 1e-15);
        for q in [0.2, 0.5, 0.8] {
            let u = renewal_seq(&JumpLaw::geometric(q).unwrap(), 50);
            for k in 1..=50 {
                assert!((u.get(k) - (1.0 - q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pmf_y_examples() {
        assert_eq!(pmf_y(&bs(), 1).unwrap(), PmfVector::point_mass(1));
        let p = pmf_y(&bs(), 3).unwrap();
        let want = [5.0 / 12.0, 0.25, 1.0 / 3.0];
        for (j, w) in (1..=3).zip(want) {
            assert!((p.get(j) - w).abs() < 1e-15, "j={j}");
        }
    }

    #[test]
    fn pmf_w_examples() {
        let geo = JumpLaw::geometric(0.5).unwrap();
        let w = pmf_w(&geo, 40).unwrap();
        assert!((w.get(1) - 0.5).abs() < 1e-15);
        let b = JumpLaw::beta_col_b1(0.5).unwrap();
        assert!((pmf_w(&b, 5).unwrap().get(1) - 0.5).abs() < 1e-15);
        assert_eq!(pmf_w(&bs(), 5), Err(Error::InfiniteMean("pmf_w")));
    }
}
