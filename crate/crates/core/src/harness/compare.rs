//! Side-by-side evaluation of the two multi-source bounds on identical draws.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::rng::ALGORITHM_ID;

use super::config::ExperimentConfig;
use super::experiment::{trial_seed, Experiment};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub trial: usize,
    pub seed: u64,
    pub thm3_rhs: f64,
    pub thm7_rhs: f64,
    pub thm3_lhs: f64,
    pub thm7_lhs: f64,
    pub thm7_tighter: bool,
}

/// Mean right-hand sides at one value of μ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuSweepRow {
    pub mu: f64,
    pub lambda_alpha_mu: f64,
    pub mean_thm7_rhs: f64,
    pub mean_thm3_rhs: f64,
    pub fraction_thm7_tighter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub trials: usize,
    pub mu: f64,
    pub alpha: Vec<f64>,
    pub lambda_alpha: f64,
    pub lambda_alpha_mu: f64,
    pub thm7_tighter_count: usize,
    pub thm3_tighter_count: usize,
    pub ties: usize,
    pub fraction_thm7_tighter: f64,
    pub rows: Vec<ComparisonRow>,
    pub mu_sweep: Vec<MuSweepRow>,
    pub rng_algorithm: &'static str,
    pub master_seed: u64,
    pub config: ExperimentConfig,
}

struct TrialOutcome {
    seed: u64,
    thm3_rhs: f64,
    thm3_lhs: f64,
    /// (rhs, lhs) for the main μ followed by each μ of the sweep.
    thm7: Vec<(f64, f64)>,
}

pub fn compare_multisource(config: &ExperimentConfig) -> Result<ComparisonReport> {
    let exp = Experiment::new(config.clone())?;
    let mu = config.require_mu()?;
    let sweep = config.params.mu_grid.clone().unwrap_or_default();
    let mus: Vec<f64> = std::iter::once(mu).chain(sweep.iter().copied()).collect();
    let lambdas = mus
        .iter()
        .map(|&m| exp.lambda_alpha_mu(m).map(|r| r.objective))
        .collect::<Result<Vec<_>>>()?;
    let trials = config.trials;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(config.seed, t);
            let draw = exp.draw_multi_source(seed)?;
            let per_source = exp.per_source_erm(&draw)?;
            let t3 = exp.thm3_on(&draw)?;
            let thm7 = mus
                .iter()
                .zip(&lambdas)
                .map(|(&m, &lam)| {
                    let r = exp.thm7_on(&draw, &per_source, m, lam)?;
                    Ok((r.rhs_total, r.lhs_realized.unwrap_or(f64::NAN)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialOutcome {
                seed,
                thm3_rhs: t3.rhs_total,
                thm3_lhs: t3.lhs_realized.unwrap_or(f64::NAN),
                thm7,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<ComparisonRow> = outcomes
        .iter()
        .enumerate()
        .map(|(t, o)| ComparisonRow {
            trial: t,
            seed: o.seed,
            thm3_rhs: o.thm3_rhs,
            thm7_rhs: o.thm7[0].0,
            thm3_lhs: o.thm3_lhs,
            thm7_lhs: o.thm7[0].1,
            thm7_tighter: o.thm7[0].0 < o.thm3_rhs,
        })
        .collect();
    let thm7_tighter_count = rows.iter().filter(|r| r.thm7_rhs < r.thm3_rhs).count();
    let thm3_tighter_count = rows.iter().filter(|r| r.thm3_rhs < r.thm7_rhs).count();
    let n = trials.max(1) as f64;
    let mean_thm3 = outcomes.iter().map(|o| o.thm3_rhs).sum::<f64>() / n;
    let mu_sweep = (1..mus.len())
        .map(|j| MuSweepRow {
            mu: mus[j],
            lambda_alpha_mu: lambdas[j],
            mean_thm7_rhs: outcomes.iter().map(|o| o.thm7[j].0).sum::<f64>() / n,
            mean_thm3_rhs: mean_thm3,
            fraction_thm7_tighter: outcomes.iter().filter(|o| o.thm7[j].0 < o.thm3_rhs).count() as f64 / n,
        })
        .collect();
    Ok(ComparisonReport {
        trials,
        mu,
        alpha: config.alpha_vector(exp.resolved.sources.len())?,
        lambda_alpha: exp.lambda_alpha.as_ref().map(|l| l.objective).unwrap_or_default(),
        lambda_alpha_mu: lambdas[0],
        thm7_tighter_count,
        thm3_tighter_count,
        ties: trials - thm7_tighter_count - thm3_tighter_count,
        fraction_thm7_tighter: thm7_tighter_count as f64 / n,
        rows,
        mu_sweep,
        rng_algorithm: ALGORITHM_ID,
        master_seed: config.seed,
        config: config.clone(),
    })
}
