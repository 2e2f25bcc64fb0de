//! Goodness-of-fit statistics used to compare simulations with exact laws
//! and limit laws.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::pmf::PmfVector;

/// Two-sided Kolmogorov-Smirnov distance of a sample from `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Statistic("empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        // ties: the empirical CDF jumps once over the whole block
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance between a discrete law with atoms `(x, mass)` and a
/// continuous `cdf`.
pub fn ks_atoms<F: Fn(f64) -> f64>(atoms: &[(f64, f64)], cdf: F) -> f64 {
    let mut pts = atoms.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut d = 0.0f64;
    for (x, w) in pts {
        let f = cdf(x);
        d = d.max((f - acc).abs());
        acc += w;
        d = d.max((acc - f).abs());
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, df: usize) -> Result<f64> {
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Statistic(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Histogram of integer observations.
pub fn histogram<I: IntoIterator<Item = u64>>(values: I) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// Pearson goodness of fit of an integer histogram against `pmf`.
///
/// Adjacent support points are pooled left to right until each bin expects
/// at least `min_expected`; a short final bin is merged into its neighbour.
/// Mass and observations outside the pmf's range go to a separate bin.
pub fn chi_square_gof(hist: &BTreeMap<u64, u64>, pmf: &PmfVector, min_expected: f64) -> Result<ChiSquare> {
    let total: u64 = hist.values().sum();
    if total == 0 {
        return Err(Error::Statistic("empty histogram".into()));
    }
    let n = total as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut cur = (0.0, 0.0);
    for (j, p) in pmf.iter() {
        cur.0 += hist.get(&(j as u64)).copied().unwrap_or(0) as f64;
        cur.1 += p * n;
        if cur.1 >= min_expected {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    let outside_obs: u64 = hist
        .iter()
        .filter(|(&j, _)| (j as usize) < pmf.offset() || (j as usize) >= pmf.end())
        .map(|(_, &c)| c)
        .sum();
    let outside_exp = (1.0 - pmf.total()).max(0.0) * n;
    if outside_obs > 0 || outside_exp >= min_expected {
        if outside_exp <= 0.0 {
            // observations where the law puts no mass
            return Ok(ChiSquare { statistic: f64::INFINITY, df: bins.len(), p_value: 0.0 });
        }
        bins.push((outside_obs as f64, outside_exp));
    }
    if bins.len() < 2 {
        return Err(Error::Statistic(format!("only {} bin(s) after pooling", bins.len())));
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = bins.len() - 1;
    Ok(ChiSquare { statistic, df, p_value: chi_square_p(statistic, df)? })
}

/// Pearson two-sample homogeneity test on integer samples.
///
/// Support points are pooled left to right until the combined count in a
/// bin gives both samples an expected count of at least `min_expected`.
pub fn chi_square_two_sample(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>, min_expected: f64) -> Result<ChiSquare> {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return Err(Error::Statistic("empty sample".into()));
    }
    let (fa, fb) = (na as f64, nb as f64);
    let share = fa.min(fb) / (fa + fb);
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for k in keys {
        cur.0 += a.get(&k).copied().unwrap_or(0) as f64;
        cur.1 += b.get(&k).copied().unwrap_or(0) as f64;
        if (cur.0 + cur.1) * share >= min_expected {
            bins.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 + cur.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => bins.push(cur),
        }
    }
    if bins.len() < 2 {
        return Err(Error::Statistic(format!("only {} bin(s) after pooling", bins.len())));
    }
    let total = fa + fb;
    let mut statistic = 0.0;
    for &(ca, cb) in &bins {
        let col = ca + cb;
        let ea = col * fa / total;
        let eb = col * fb / total;
        statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    let df = bins.len() - 1;
    Ok(ChiSquare { statistic, df, p_value: chi_square_p(statistic, df)? })
}

/// Total-variation distance between two integer histograms.
pub fn tv_histograms(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> f64 {
    let na = a.values().sum::<u64>().max(1) as f64;
    let nb = b.values().sum::<u64>().max(1) as f64;
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{open_unit, replicate_stream};

    #[test]
    fn ks_constant_sample() {
        let d = ks_statistic(&[0.0; 100], crate::special::normal_cdf).unwrap();
        assert!(d >= 0.5);
    }

    #[test]
    fn ks_self_calibration() {
        let mut rng = replicate_stream(1, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| open_unit(&mut rng)).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d < 1.95 / (1e5f64).sqrt(), "{d}");
        assert!(ks_statistic(&[], |x| x).is_err());
    }

    #[test]
    fn ks_atoms_uniform_grid() {
        let atoms: Vec<(f64, f64)> = (1..=100).map(|k| (k as f64 / 100.0, 0.01)).collect();
        let d = ks_atoms(&atoms, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.01).abs() < 1e-12);
    }

    #[test]
    fn gof_exact_counts() {
        let pmf = PmfVector::new(1, vec![0.25, 0.75]);
        let h = BTreeMap::from([(1, 250), (2, 750)]);
        let r = chi_square_gof(&h, &pmf, 5.0).unwrap();
        assert!(r.p_value > 0.999);
        let swapped = PmfVector::new(1, vec![0.75, 0.25]);
        assert!(chi_square_gof(&h, &swapped, 5.0).unwrap().p_value < 1e-6);
    }

    #[test]
    fn gof_pooling_and_outside() {
        let pmf = PmfVector::new(0, vec![0.5, 0.5]);
        let h = BTreeMap::from([(0, 50), (1, 45), (7, 5)]);
        assert_eq!(chi_square_gof(&h, &pmf, 5.0).unwrap().p_value, 0.0);
        assert!(chi_square_gof(&BTreeMap::from([(0, 10)]), &PmfVector::point_mass(0), 5.0).is_err());
    }

    #[test]
    fn two_sample_identical() {
        let h = BTreeMap::from([(0, 300), (1, 500), (2, 200)]);
        let r = chi_square_two_sample(&h, &h, 5.0).unwrap();
        assert!(r.statistic.abs() < 1e-12 && r.df == 2);
        assert_eq!(tv_histograms(&h, &h), 0.0);
    }
}
