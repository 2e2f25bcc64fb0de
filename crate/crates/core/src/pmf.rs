use serde::Serialize;

/// A finitely supported probability mass function on `offset, offset+1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmfVector {
    offset: usize,
    probs: Vec<f64>,
}

/// Entries this far below zero are treated as round-off and clamped.
const NEGATIVE_SLACK: f64 = -1e-15;

impl PmfVector {
    /// Builds a pmf from raw masses. Round-off negatives are clamped to
    /// zero; anything more negative is kept so that callers' invariant
    /// checks can see it.
    pub fn new(offset: usize, mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if *p < 0.0 && *p >= NEGATIVE_SLACK {
                *p = 0.0;
            }
        }
        PmfVector { offset, probs }
    }

    pub fn point_mass(at: usize) -> Self {
        PmfVector { offset: at, probs: vec![1.0] }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// One past the largest support point.
    pub fn end(&self) -> usize {
        self.offset + self.probs.len()
    }

    /// `P{X = j}`, zero outside the stored range.
    pub fn get(&self, j: usize) -> f64 {
        if j < self.offset {
            return 0.0;
        }
        self.probs.get(j - self.offset).copied().unwrap_or(0.0)
    }

    /// `(j, P{X = j})` over the stored range.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `P{X <= j}`.
    pub fn cdf(&self, j: usize) -> f64 {
        if j < self.offset {
            return 0.0;
        }
        let upto = (j - self.offset + 1).min(self.probs.len());
        self.probs[..upto].iter().sum()
    }

    /// `E X^k`.
    pub fn moment(&self, k: u32) -> f64 {
        self.iter().map(|(j, p)| p * (j as f64).powi(k as i32)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Total-variation distance, treating missing mass on either side as
    /// lying outside the other's support.
    pub fn tv_distance(&self, other: &PmfVector) -> f64 {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let overlap: f64 = (lo..hi).map(|j| (self.get(j) - other.get(j)).abs()).sum();
        let missing = (1.0 - self.total()).max(0.0) + (1.0 - other.total()).max(0.0);
        0.5 * (overlap + missing)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol && self.probs.iter().all(|&p| p >= 0.0)
    }

    /// Drops zero entries at both ends.
    pub fn trimmed(mut self) -> Self {
        while self.probs.last() == Some(&0.0) && self.probs.len() > 1 {
            self.probs.pop();
        }
        let lead = self.probs.iter().take_while(|&&p| p == 0.0).count();
        if lead > 0 && lead < self.probs.len() {
            self.probs.drain(..lead);
            self.offset += lead;
        }
        self
    }

    /// Inverse-CDF draw from a uniform on `(0, 1]`.
    pub fn quantile(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (j, p) in self.iter() {
            acc += p;
            if u <= acc {
                return j;
            }
        }
        self.end().saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_accessors() {
        let p = PmfVector::new(1, vec![0.25, 0.75]);
        assert_eq!(p.get(0), 0.0);
        assert_eq!(p.get(2), 0.75);
        assert_eq!(p.end(), 3);
        assert!((p.mean() - 1.75).abs() < 1e-15);
        assert!((p.cdf(1) - 0.25).abs() < 1e-15);
        assert_eq!(p.quantile(0.2), 1);
        assert_eq!(p.quantile(0.3), 2);
    }

    #[test]
    fn round_off_is_clamped() {
        let p = PmfVector::new(0, vec![-1e-17, 1.0]);
        assert_eq!(p.probs()[0], 0.0);
        let q = PmfVector::new(0, vec![-1e-3, 1.0]);
        assert!(q.probs()[0] < 0.0);
    }

    #[test]
    fn tv_distance_disjoint_and_equal() {
        let a = PmfVector::point_mass(1);
        let b = PmfVector::point_mass(2);
        assert!((a.tv_distance(&b) - 1.0).abs() < 1e-15);
        assert_eq!(a.tv_distance(&a), 0.0);
    }

    #[test]
    fn trimming() {
        let p = PmfVector::new(0, vec![0.0, 0.0, 0.5, 0.5, 0.0]).trimmed();
        assert_eq!(p.offset(), 2);
        assert_eq!(p.probs(), &[0.5, 0.5]);
    }
}
