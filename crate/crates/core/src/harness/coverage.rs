//! Empirical coverage: how often a probabilistic bound fails over repeated draws.

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::TheoremId;
use crate::error::{invalid, Result};
use crate::rng::ALGORITHM_ID;

use super::config::ExperimentConfig;
use super::experiment::{trial_seed, Experiment};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub terms: IndexMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub theorem_id: TheoremId,
    pub trials: usize,
    pub violations: usize,
    pub violation_rate: f64,
    pub delta: f64,
    /// `δ + 3·sqrt(δ(1-δ)/trials)`.
    pub max_allowed_rate: f64,
    pub within_allowance: bool,
    pub rng_algorithm: &'static str,
    pub master_seed: u64,
    pub per_trial: Vec<TrialRecord>,
    pub config: ExperimentConfig,
}

pub fn allowed_violation_rate(delta: f64, trials: usize) -> f64 {
    delta + 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt()
}

/// Runs `config.trials` independent draws and checks `theorem` on each.
pub fn verify_bound(config: &ExperimentConfig, theorem: Option<TheoremId>) -> Result<CoverageReport> {
    let exp = Experiment::new(config.clone())?;
    verify_experiment(&exp, theorem)
}

pub fn verify_experiment(exp: &Experiment, theorem: Option<TheoremId>) -> Result<CoverageReport> {
    let theorem = theorem.unwrap_or_else(|| exp.default_theorem());
    if !theorem.is_probabilistic() {
        return Err(invalid("theorem", format!("{theorem} is deterministic; use `bound`")));
    }
    let trials = exp.config.trials;
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let master = exp.config.seed;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(master, t);
            let r = exp.bound_for_trial(theorem, seed)?;
            let lhs = r.lhs_realized.ok_or_else(|| invalid("target", "realized left-hand side unavailable"))?;
            Ok(TrialRecord {
                trial: t,
                seed,
                lhs,
                rhs: r.rhs_total,
                holds: r.holds.unwrap_or(false),
                terms: r.terms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = per_trial.iter().filter(|r| !r.holds).count();
    let delta = exp.delta();
    let violation_rate = violations as f64 / trials as f64;
    let max_allowed_rate = allowed_violation_rate(delta, trials);
    Ok(CoverageReport {
        theorem_id: theorem,
        trials,
        violations,
        violation_rate,
        delta,
        max_allowed_rate,
        within_allowance: violation_rate <= max_allowed_rate,
        rng_algorithm: ALGORITHM_ID,
        master_seed: master,
        per_trial,
        config: exp.config.clone(),
    })
}
