//! Stable laws `μ_α`, `1 <= α <= 2`, in the parametrization
//!
//! ```text
//! 1 < α < 2:  ψ(t) = exp(-|t|^α C Γ(1-α) (cos(πα/2) + i sin(πα/2) sgn t))
//! α = 1:      ψ(t) = exp(-|t| C (π/2 - i log|t| sgn t))
//! α = 2:      ψ(t) = exp(-C t² / 2)
//! ```
//!
//! The CDF comes from Gil-Pelaez inversion.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::special::gamma;

/// `|ψ|` below which the inversion integral is truncated.
const CF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableLaw {
    alpha: f64,
    c: f64,
}

/// The same law in the standard `S_1(γ, β, 0)` parametrization
/// `exp(-γ^α |t|^α (1 - iβ tan(πα/2) sgn t))` (`α ≠ 1`) or
/// `exp(-γ|t| (1 + iβ (2/π) sgn t log|t|))` (`α = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardParams {
    pub alpha: f64,
    pub scale: f64,
    pub skew: f64,
}

impl StableLaw {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("stable index {alpha} outside [1, 2]")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("stable scale C = {c} must be positive")));
        }
        Ok(StableLaw { alpha, c })
    }

    /// The law `S_α` with `E e^{itS} = exp(|t|^α (cos(πα/2) + i sin(πα/2) sgn t))`,
    /// i.e. `C = -1/Γ(1-α)`, for `1 < α < 2`.
    pub fn unit_skewed(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("unit skewed law needs 1 < α < 2, got {alpha}")));
        }
        Self::new(alpha, -1.0 / gamma(1.0 - alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `κ` with `|ψ(t)| = exp(-κ |t|^α)`.
    fn decay(&self) -> f64 {
        let a = self.alpha;
        if a == 2.0 {
            self.c / 2.0
        } else if a == 1.0 {
            self.c * FRAC_PI_2
        } else {
            self.c * gamma(1.0 - a) * (FRAC_PI_2 * a).cos()
        }
    }

    pub fn standard(&self) -> StandardParams {
        let a = self.alpha;
        let kappa = self.decay();
        if a == 2.0 {
            // S_1 with α = 2 is N(0, 2γ²)
            StandardParams { alpha: 2.0, scale: (self.c / 2.0).sqrt(), skew: 0.0 }
        } else if a == 1.0 {
            StandardParams { alpha: 1.0, scale: kappa, skew: -1.0 }
        } else {
            StandardParams { alpha: a, scale: kappa.powf(1.0 / a), skew: -1.0 }
        }
    }

    /// Characteristic function `ψ_α(t)`.
    pub fn cf(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let a = self.alpha;
        let s = t.signum();
        let at = t.abs();
        let exponent = if a == 2.0 {
            Complex64::new(-self.c * t * t / 2.0, 0.0)
        } else if a == 1.0 {
            -at * self.c * Complex64::new(FRAC_PI_2, -at.ln() * s)
        } else {
            let k = self.c * gamma(1.0 - a);
            let ang = FRAC_PI_2 * a;
            -at.powf(a) * k * Complex64::new(ang.cos(), ang.sin() * s)
        };
        exponent.exp()
    }

    /// Truncation point of the inversion integral.
    fn horizon(&self) -> f64 {
        ((1.0 / CF_FLOOR).ln() / self.decay()).powf(1.0 / self.alpha)
    }

    /// `F(x) = 1/2 - (1/π) ∫_0^∞ Im(e^{-itx} ψ(t)) / t dt`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let t_max = self.horizon();
        let integrand = |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            (Complex64::new(0.0, -t * x).exp() * self.cf(t)).im / t
        };
        // panels no wider than half a period of e^{-itx}
        let panels = ((t_max * x.abs() / PI).ceil() as usize).max(8);
        let width = t_max / panels as f64;
        let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_depth: 50, max_panels: 4000 };
        let mut acc = 0.0;
        for i in 0..panels {
            let lo = i as f64 * width;
            acc += integrate(integrand, lo, lo + width, cfg)?;
        }
        Ok((0.5 - acc / PI).clamp(0.0, 1.0))
    }

    /// CDF on a uniform grid over `[lo, hi]`, made non-decreasing.
    pub fn tabulate(&self, lo: f64, hi: f64, points: usize) -> Result<TabulatedCdf> {
        if !(hi > lo) || points < 2 {
            return Err(Error::InvalidParameter("tabulation needs lo < hi and two points".into()));
        }
        let step = (hi - lo) / (points - 1) as f64;
        let mut values = Vec::with_capacity(points);
        let mut run = 0.0f64;
        for i in 0..points {
            run = run.max(self.cdf(lo + i as f64 * step)?);
            values.push(run);
        }
        Ok(TabulatedCdf { law: *self, lo, step, values })
    }
}

/// Linear interpolation of a tabulated CDF; direct inversion outside the grid.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    law: StableLaw,
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.lo + i as f64 * self.step, v))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        let last = self.values.len() - 1;
        if pos < 0.0 || pos > last as f64 || !pos.is_finite() {
            return self.law.cdf(x).unwrap_or(if x < self.lo { 0.0 } else { 1.0 });
        }
        let i = (pos.floor() as usize).min(last - 1);
        let f = pos - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;

    #[test]
    fn cf_examples() {
        let s = StableLaw::new(2.0, 3.0).unwrap();
        assert!((s.cf(0.7).re - (-1.5f64 * 0.49).exp()).abs() < 1e-15);
        for a in [1.0, 1.3, 2.0] {
            assert_eq!(StableLaw::new(a, 1.0).unwrap().cf(0.0), Complex64::new(1.0, 0.0));
        }
        let z = StableLaw::new(1.5, 1.0).unwrap().cf(1.0);
        assert!((z.re + 0.06564945554381586).abs() < 1e-14);
        assert!((z.im - 0.04836696705699458).abs() < 1e-14);
        assert!(z.norm() < 1.0);
    }

    #[test]
    fn standard_mapping_reproduces_cf() {
        for (a, c) in [(1.5, 1.0), (1.2, 0.4), (1.0, 1.0), (1.0, 2.5)] {
            let law = StableLaw::new(a, c).unwrap();
            let p = law.standard();
            for t in [-3.0, -0.4, 0.25, 1.0, 2.0] {
                let at: f64 = f64::abs(t);
                let e = if a == 1.0 {
                    -p.scale * at * Complex64::new(1.0, p.skew * 2.0 / PI * t.signum() * at.ln())
                } else {
                    -(p.scale * at).powf(a) * Complex64::new(1.0, -p.skew * (FRAC_PI_2 * a).tan() * t.signum())
                };
                assert!((e.exp() - law.cf(t)).norm() < 1e-13, "a={a} t={t}");
            }
        }
    }

    #[test]
    fn gaussian_case_matches_normal_cdf() {
        let law = StableLaw::new(2.0, 1.0).unwrap();
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            assert!((law.cdf(x).unwrap() - normal_cdf(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn tail_limits() {
        for a in [1.0, 1.5, 2.0] {
            let law = StableLaw::new(a, 1.0).unwrap();
            assert!(law.cdf(-1e6).unwrap() < 1e-3, "a={a}");
            assert!(law.cdf(1e6).unwrap() > 1.0 - 1e-3, "a={a}");
        }
    }

    #[test]
    fn tabulated_is_monotone() {
        let law = StableLaw::unit_skewed(1.5).unwrap();
        let tab = law.tabulate(-8.0, 4.0, 241).unwrap();
        let vals: Vec<f64> = tab.grid().map(|p| p.1).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        let direct = law.cdf(0.123).unwrap();
        assert!((tab.eval(0.123) - direct).abs() < 1e-4);
    }
}
