//! Exact finite-support computation of domain-adaptation and transfer-learning
//! generalization bounds, plus Monte Carlo machinery to check them.
//!
//! Hypotheses are output vectors over a finite [`GroundSet`](hypothesis::GroundSet),
//! so every supremum and minimum in the bounds (divergences, ideal joint
//! risks, empirical minimizers) is computed by exhaustive enumeration.
//!
//! - [`hypothesis`]: ground sets, hypotheses, threshold and explicit classes
//! - [`domains`]: finite-support domains, samples, risks, mixtures
//! - [`divergence`]: H∆H-divergence, discrepancy distance, Rademacher complexity
//! - [`erm`]: exact weighted ERM and ideal-risk (λ) computations
//! - [`bounds`]: per-term right-hand sides with realized left-hand sides
//! - [`htl`]: hypothesis transfer by regularized least squares, LOO risk
//! - [`harness`]: experiment configs, coverage runs, multi-source comparison

pub mod bounds;
pub mod divergence;
pub mod domains;
pub mod erm;
pub mod error;
pub mod harness;
pub mod htl;
pub mod hypothesis;
mod linalg;
pub mod rng;

pub use error::{Error, Result};
