//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One G7K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integration tolerances and limits.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 60, max_panels: 200_000 }
    }
}

/// Adaptive bisection on `[a, b]`, refining the panel with the largest
/// error estimate first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&f, a, b);
    // (lo, hi, value, error, depth)
    let mut panels = vec![(a, b, v, e, 0u32)];
    // Panels at the depth limit: kept in the sum, never refined again.
    let mut frozen_val = 0.0;
    let mut frozen_err = 0.0;
    let mut total = v;
    let mut active_err = e;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if active_err <= tol || panels.is_empty() {
            if frozen_err <= tol.max(1e-8 * total.abs()) {
                return Ok(total);
            }
            return Err(Error::Quadrature(format!(
                "depth limit on [{a}, {b}] leaves error {frozen_err:e}"
            )));
        }
        if !active_err.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        if panels.len() >= cfg.max_panels {
            return Err(Error::Quadrature(format!(
                "panel budget exhausted on [{a}, {b}] with error {active_err:e}"
            )));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, pv, pe, depth) = panels.swap_remove(idx);
        if depth >= cfg.max_depth {
            frozen_val += pv;
            frozen_err += pe;
            active_err -= pe;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - pv;
        active_err += e1 + e2 - pe;
        panels.push((lo, mid, v1, e1, depth + 1));
        panels.push((mid, hi, v2, e2, depth + 1));
        // Re-sum periodically to stop drift from the running update.
        if panels.len() % 64 == 0 {
            total = frozen_val + panels.iter().map(|p| p.2).sum::<f64>();
            active_err = panels.iter().map(|p| p.3).sum();
        }
    }
}

/// Sum of [`integrate`] over consecutive breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: QuadConfig) -> Result<f64> {
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        acc += integrate(&f, w[0], w[1], cfg)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, QuadConfig::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, QuadConfig::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        // ∫_0^1 ln x dx = -1
        let v = integrate(|x: f64| x.ln(), 0.0, 1.0, QuadConfig::default()).unwrap();
        assert!((v + 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn oscillatory() {
        let v = integrate(|x: f64| (20.0 * x).sin(), 0.0, std::f64::consts::PI, QuadConfig::default())
            .unwrap();
        assert!(v.abs() < 1e-12);
    }
}
