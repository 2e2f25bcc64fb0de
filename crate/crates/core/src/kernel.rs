//! Transition kernels `P{I_n = k}` for the absorption-time recursion.

use std::fmt;
use std::sync::Arc;

use crate::dist::JumpLaw;
use crate::error::{Error, Result};

/// Sparse row of a kernel: `(k, P{I_n = k})` pairs with `1 <= k < n`.
pub type Row = Vec<(usize, f64)>;

type RowFn = dyn Fn(usize) -> Row + Send + Sync;

#[derive(Clone)]
pub enum KernelMode {
    /// `P{I_n = k} = p_k / (p_1 + ... + p_{n-1})`.
    FromJumpLaw(JumpLaw),
    /// Arbitrary rows supplied by a closure.
    Explicit { label: String, rows: Arc<RowFn> },
}

/// Law of the decrement `I_n` at every state `n >= 2`.
#[derive(Clone)]
pub struct TransitionKernel {
    mode: KernelMode,
    n_max: Option<usize>,
    note: Option<String>,
}

impl fmt::Debug for TransitionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mode {
            KernelMode::FromJumpLaw(law) => write!(f, "TransitionKernel(from {law})"),
            KernelMode::Explicit { label, .. } => write!(f, "TransitionKernel({label})"),
        }
    }
}

impl TransitionKernel {
    pub fn from_law(law: JumpLaw) -> Self {
        TransitionKernel { mode: KernelMode::FromJumpLaw(law), n_max: None, note: None }
    }

    /// Kernel given row by row. `rows(n)` must return a probability vector
    /// over `1..n` for every `2 <= n <= n_max`.
    pub fn explicit<F>(label: impl Into<String>, n_max: Option<usize>, rows: F) -> Self
    where
        F: Fn(usize) -> Row + Send + Sync + 'static,
    {
        TransitionKernel {
            mode: KernelMode::Explicit { label: label.into(), rows: Arc::new(rows) },
            n_max,
            note: None,
        }
    }

    /// `I_2 ≡ 1`, and for `n >= 3` the chain drops by one with probability
    /// `1 - 1/n` and jumps straight to state 1 with probability `1/n`.
    pub fn jump_to_bottom() -> Self {
        Self::explicit("jump-to-bottom counterexample", None, |n| {
            if n <= 2 {
                vec![(1, 1.0)]
            } else {
                let p = 1.0 / n as f64;
                vec![(1, 1.0 - p), (n - 1, p)]
            }
        })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Diagnostic attached at construction, e.g. a regime warning.
    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn mode(&self) -> &KernelMode {
        &self.mode
    }

    pub fn law(&self) -> Option<&JumpLaw> {
        match &self.mode {
            KernelMode::FromJumpLaw(l) => Some(l),
            KernelMode::Explicit { .. } => None,
        }
    }

    pub fn n_max(&self) -> Option<usize> {
        self.n_max
    }

    fn check_state(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("kernel rows start at n = 2, got {n}")));
        }
        if let Some(cap) = self.n_max {
            if n > cap {
                return Err(Error::SizeGuard { n, cap });
            }
        }
        Ok(())
    }

    /// Row at state `n`, normalized.
    pub fn row(&self, n: usize) -> Result<Row> {
        self.check_state(n)?;
        match &self.mode {
            KernelMode::FromJumpLaw(law) => {
                let weights: Vec<f64> = (1..n).map(|k| law.pmf(k as u64)).collect();
                let mass: f64 = weights.iter().sum();
                Ok(weights.into_iter().enumerate().map(|(i, w)| (i + 1, w / mass)).collect())
            }
            KernelMode::Explicit { rows, .. } => Ok(rows(n)),
        }
    }

    /// Precomputes whatever makes repeated row access cheap up to `n_max`.
    pub fn prepare(&self, n_max: usize) -> Result<PreparedKernel<'_>> {
        if let Some(cap) = self.n_max {
            if n_max > cap {
                return Err(Error::SizeGuard { n: n_max, cap });
            }
        }
        let dense = match &self.mode {
            KernelMode::FromJumpLaw(law) => {
                let p: Vec<f64> = (0..n_max).map(|k| law.pmf(k as u64)).collect();
                let mut prefix = vec![0.0; n_max.max(1)];
                for k in 1..n_max {
                    prefix[k] = prefix[k - 1] + p[k];
                }
                Some((p, prefix))
            }
            KernelMode::Explicit { .. } => None,
        };
        Ok(PreparedKernel { kernel: self, n_max, dense })
    }
}

/// A kernel with cached step masses for states up to `n_max`.
pub struct PreparedKernel<'a> {
    kernel: &'a TransitionKernel,
    n_max: usize,
    /// `p_k` at index `k` and `p_1 + ... + p_k` at index `k`.
    dense: Option<(Vec<f64>, Vec<f64>)>,
}

impl PreparedKernel<'_> {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `(p, prefix)` for jump-law kernels.
    pub fn step_masses(&self) -> Option<(&[f64], &[f64])> {
        self.dense.as_ref().map(|(p, c)| (p.as_slice(), c.as_slice()))
    }

    pub fn row(&self, n: usize) -> Result<Row> {
        match &self.dense {
            Some((p, prefix)) if n <= self.n_max => {
                if n < 2 {
                    return Err(Error::InvalidParameter(format!("kernel rows start at n = 2, got {n}")));
                }
                let r = 1.0 / prefix[n - 1];
                Ok((1..n).map(|k| (k, p[k] * r)).collect())
            }
            _ => self.kernel.row(n),
        }
    }
}
