//! Absorption times of death Markov chains on the integers.
//!
//! A chain started at `n` moves to `n - I_n`, with `P{I_n = k} = p_k / (p_1 + ... + p_{n-1})`
//! for a step law `(p_k)`, until it reaches state 1. The number of steps `X_n`
//! satisfies `X_n = X_{n - I_n} + 1` in law. This crate computes its exact law
//! and moments, simulates it through the coupling with the random walk of
//! i.i.d. steps, evaluates the limit laws, and links everything to the
//! block-counting chain of beta coalescents.

pub mod coalescent;
pub mod dist;
pub mod error;
pub mod exact;
pub mod harness;
pub mod kernel;
pub mod limits;
pub mod pmf;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;

pub use coalescent::{collision_kernel, rate_gnk, total_rate, CoalescentParams, CollisionSampler};
pub use dist::{kernel_of, Family, JumpLaw, Normalizers};
pub use error::{Error, Result};
pub use exact::{
    moments_n, moments_x, pmf_n, pmf_s, pmf_w, pmf_x, pmf_x_with_cap, pmf_y, renewal_seq, MomentKind, MomentTable,
    RenewalSeq, TruncatedPmf,
};
pub use harness::{run_acceptance, AcceptanceConfig, Criterion, TestReport};
pub use kernel::TransitionKernel;
pub use limits::{LimitSpec, Regime, StableLaw};
pub use pmf::PmfVector;
pub use sim::{run_experiment, simulate_replicate, ExperimentSummary, ReplicateResult, TrackedStatistic};
