//! Grid of leave-one-out stability estimates for hypothesis transfer.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::htl::{estimate_stability_gap, StabilityConfig, StabilityEstimate};
use crate::rng::ALGORITHM_ID;

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub rows: Vec<StabilityEstimate>,
    pub rng_algorithm: &'static str,
    pub master_seed: u64,
    pub config: ExperimentConfig,
}

/// One estimate per `(m, multiplier)` with `λ = multiplier / m`. Every cell
/// uses the master seed, so cells share their random draws where sizes allow.
pub fn stability_grid(config: &ExperimentConfig) -> Result<StabilityReport> {
    let spec = config
        .domains
        .regression
        .as_ref()
        .ok_or_else(|| invalid("domains.regression", "required"))?;
    let m_grid = match (&config.params.m_grid, config.params.m) {
        (Some(g), _) => g.clone(),
        (None, Some(m)) => vec![m],
        (None, None) => return Err(invalid("params.m_grid", "required")),
    };
    let mults = config.params.lambda_multipliers.clone().unwrap_or_else(|| vec![1.0]);
    let source = spec.source.build();
    let mut rows = Vec::with_capacity(m_grid.len() * mults.len());
    for &m in &m_grid {
        for &mult in &mults {
            let cell = StabilityConfig {
                target: spec.target.clone(),
                source: source.clone(),
                m,
                lambda_reg: mult / m as f64,
                c: config.truncation(),
            };
            rows.push(estimate_stability_gap(&cell, config.trials, config.seed)?);
        }
    }
    Ok(StabilityReport {
        rows,
        rng_algorithm: ALGORITHM_ID,
        master_seed: config.seed,
        config: config.clone(),
    })
}
