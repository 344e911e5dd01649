//! One resolved experiment: draws the samples for a trial and evaluates the
//! requested bound on them.

use crate::bounds::{
    alpha_weighted_spec, lemma1_rhs, mixed_sample_counts, multi_source_spec, thm1_rhs, thm2_rhs, thm3_rhs, thm4_rhs,
    thm5_rhs, thm7_rhs, BoundReport, Theorem1Inputs, Theorem2Inputs, Theorem3Inputs, Theorem5Inputs, Theorem7Inputs,
    TheoremId,
};
use crate::divergence::{LossSpec, RademacherMode};
use crate::domains::{mixture_domain, sample_labeled, sample_unlabeled, DiscreteDomain, LabeledSample, UnlabeledSample};
use crate::erm::{alpha_mu_weights, erm, ideal_risk, ErmResult, WeightedRiskSpec};
use crate::error::{invalid, Result};
use crate::rng::derive_seed;

use super::config::{ExperimentConfig, Resolved, Scenario};

// Sub-stream identifiers within a trial.
const SOURCE_LABELED: u64 = 0;
const TARGET_LABELED: u64 = 1;
const SOURCE_UNLABELED: u64 = 2;
const TARGET_UNLABELED: u64 = 3;
const RADEMACHER: u64 = 4;
const MULTI_LABELED: u64 = 100;
const MULTI_UNLABELED: u64 = 200;

/// Seed for trial `t` under a master seed.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, trial as u64)
}

/// One multi-source draw: a labeled and an unlabeled sample per source, plus a shared unlabeled target sample.
#[derive(Debug, Clone)]
pub struct MultiSourceDraw {
    pub labeled: Vec<LabeledSample>,
    pub unlabeled: Vec<UnlabeledSample>,
    pub target_unlabeled: UnlabeledSample,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    /// min_h ε_S(h) + ε_T(h), when a source and target are configured.
    pub lambda: Option<ErmResult>,
    /// α-mixture of the source marginals, for multi-source configs.
    pub mixture: Option<DiscreteDomain>,
    /// min_h ε_T(h) + Σ α_j ε_j(h), for multi-source configs.
    pub lambda_alpha: Option<ErmResult>,
}

impl Experiment {
    /// Resolves domains and checks that the scenario's parameters are present.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let resolved = config.resolve()?;
        let p = &config.params;
        if !(p.delta > 0.0 && p.delta < 1.0) {
            return Err(invalid("params.delta", format!("{} not in (0,1)", p.delta)));
        }
        let mut lambda = None;
        let mut mixture = None;
        let mut lambda_alpha = None;
        match config.scenario {
            Scenario::SingleSource | Scenario::AlphaMixed | Scenario::Discrepancy => {
                let (s, t) = (resolved.source()?, resolved.target()?);
                config.require_m()?;
                lambda = Some(ideal_risk(&[(1.0, s), (1.0, t)], &resolved.class)?);
                if config.scenario == Scenario::AlphaMixed {
                    config.require_m_prime()?;
                    let alpha = config.alpha_scalar()?;
                    if !(0.0..=1.0).contains(&alpha) {
                        return Err(invalid("params.alpha", "must lie in [0,1]"));
                    }
                    let beta = config.params.beta.ok_or_else(|| invalid("params.beta", "required"))?;
                    mixed_sample_counts(beta, config.require_m()?)?;
                }
                if config.scenario == Scenario::SingleSource {
                    config.require_m_prime()?;
                }
            }
            Scenario::MultiSource => {
                let k = resolved.sources.len();
                if k == 0 {
                    return Err(invalid("domains.sources", "required"));
                }
                let t = resolved.target()?;
                let alpha = config.alpha_vector(k)?;
                let sizes = config
                    .params
                    .source_sizes
                    .as_ref()
                    .ok_or_else(|| invalid("params.source_sizes", "required"))?;
                if sizes.len() != k || sizes.contains(&0) {
                    return Err(invalid("params.source_sizes", format!("need {k} positive sizes")));
                }
                let refs: Vec<&DiscreteDomain> = resolved.sources.iter().collect();
                let mix = mixture_domain(&refs, &alpha)?;
                let mut terms = vec![(1.0, t)];
                terms.extend(alpha.iter().copied().zip(refs.iter().copied()));
                lambda_alpha = Some(ideal_risk(&terms, &resolved.class)?);
                mixture = Some(mix);
                if let Some(mu) = config.params.mu {
                    if !(mu > 0.0 && mu < 1.0) {
                        return Err(invalid("params.mu", "must lie in (0,1)"));
                    }
                }
                if let Some(grid) = &config.params.mu_grid {
                    if grid.iter().any(|&mu| !(mu > 0.0 && mu < 1.0)) {
                        return Err(invalid("params.mu_grid", "values must lie in (0,1)"));
                    }
                }
            }
            Scenario::HtlStability => {
                if config.domains.regression.is_none() {
                    return Err(invalid("domains.regression", "required"));
                }
            }
        }
        Ok(Experiment {
            config,
            resolved,
            lambda,
            mixture,
            lambda_alpha,
        })
    }

    pub fn delta(&self) -> f64 {
        self.config.params.delta
    }

    /// The bound a scenario is checked against when none is named.
    pub fn default_theorem(&self) -> TheoremId {
        match self.config.scenario {
            Scenario::SingleSource => TheoremId::Thm1,
            Scenario::AlphaMixed => TheoremId::Thm2,
            Scenario::MultiSource => TheoremId::Thm7,
            Scenario::Discrepancy => TheoremId::Thm5,
            Scenario::HtlStability => TheoremId::Thm1,
        }
    }

    /// Whether `theorem` can be evaluated on draws from this config.
    pub fn supports(&self, theorem: TheoremId) -> bool {
        let two_domain = self.resolved.source.is_some() && self.resolved.target.is_some();
        match theorem {
            TheoremId::Lemma1 | TheoremId::Thm4 => two_domain,
            TheoremId::Thm1 => two_domain && self.config.params.m_prime.is_some(),
            TheoremId::Thm2 => self.config.scenario == Scenario::AlphaMixed,
            TheoremId::Thm5 => two_domain,
            TheoremId::Thm3 => self.config.scenario == Scenario::MultiSource,
            TheoremId::Thm7 => {
                self.config.scenario == Scenario::MultiSource
                    && self.resolved.sources.len() >= 2
                    && self.config.params.m_prime.is_some()
                    && self.config.params.mu.is_some()
            }
        }
    }

    fn ensure_supported(&self, theorem: TheoremId) -> Result<()> {
        if self.supports(theorem) {
            Ok(())
        } else {
            Err(invalid(
                "theorem",
                format!("{theorem} cannot be evaluated on a {} config", self.config.scenario.as_str()),
            ))
        }
    }

    pub fn draw_multi_source(&self, seed: u64) -> Result<MultiSourceDraw> {
        let sizes = self
            .config
            .params
            .source_sizes
            .as_ref()
            .ok_or_else(|| invalid("params.source_sizes", "required"))?;
        let labeled = self
            .resolved
            .sources
            .iter()
            .zip(sizes)
            .enumerate()
            .map(|(j, (d, &n))| sample_labeled(d, n, derive_seed(seed, MULTI_LABELED + j as u64)))
            .collect::<Result<Vec<_>>>()?;
        let (unlabeled, target_unlabeled) = match self.config.params.m_prime {
            Some(mp) => (
                self.resolved
                    .sources
                    .iter()
                    .enumerate()
                    .map(|(j, d)| sample_unlabeled(d, mp, derive_seed(seed, MULTI_UNLABELED + j as u64)))
                    .collect::<Result<Vec<_>>>()?,
                sample_unlabeled(self.resolved.target()?, mp, derive_seed(seed, TARGET_UNLABELED))?,
            ),
            None => (Vec::new(), UnlabeledSample::from_counts(self.resolved.ground.clone(), vec![0; self.resolved.ground.len()])?),
        };
        Ok(MultiSourceDraw {
            labeled,
            unlabeled,
            target_unlabeled,
        })
    }

    /// Per-source minimizers `ĥ_i`.
    pub fn per_source_erm(&self, draw: &MultiSourceDraw) -> Result<Vec<ErmResult>> {
        draw.labeled
            .iter()
            .map(|s| erm(&WeightedRiskSpec::new().empirical(1.0, s)?, &self.resolved.class))
            .collect()
    }

    /// `λ_{α,μ}` for the configured sources and target.
    pub fn lambda_alpha_mu(&self, mu: f64) -> Result<ErmResult> {
        let alpha = self.config.alpha_vector(self.resolved.sources.len())?;
        let weights = alpha_mu_weights(&alpha, mu)?;
        let mut terms = vec![(1.0, self.resolved.target()?)];
        terms.extend(weights.into_iter().zip(self.resolved.sources.iter()));
        ideal_risk(&terms, &self.resolved.class)
    }

    pub fn thm3_on(&self, draw: &MultiSourceDraw) -> Result<BoundReport> {
        let alpha = self.config.alpha_vector(self.resolved.sources.len())?;
        thm3_rhs(&Theorem3Inputs {
            class: &self.resolved.class,
            sources: &draw.labeled,
            alpha: &alpha,
            delta: self.delta(),
            mixture: self.mixture.as_ref().ok_or_else(|| invalid("domains.sources", "required"))?,
            target: self.resolved.target()?,
            lambda_alpha: self.lambda_alpha.as_ref().map(|l| l.objective).unwrap_or_default(),
        })
    }

    pub fn thm7_on(&self, draw: &MultiSourceDraw, per_source: &[ErmResult], mu: f64, lambda_alpha_mu: f64) -> Result<BoundReport> {
        let alpha = self.config.alpha_vector(self.resolved.sources.len())?;
        thm7_rhs(&Theorem7Inputs {
            class: &self.resolved.class,
            labeled: &draw.labeled,
            unlabeled: &draw.unlabeled,
            target_unlabeled: &draw.target_unlabeled,
            alpha: &alpha,
            mu,
            delta: self.delta(),
            per_source,
            lambda_alpha_mu,
            target: Some(self.resolved.target()?),
        })
    }

    /// Draws the samples for one trial and evaluates `theorem` on them.
    pub fn bound_for_trial(&self, theorem: TheoremId, seed: u64) -> Result<BoundReport> {
        self.ensure_supported(theorem)?;
        let class = &self.resolved.class;
        let delta = self.delta();
        let lambda = self.lambda.as_ref().map(|l| l.objective).unwrap_or_default();
        match theorem {
            TheoremId::Thm1 => {
                let (s, t) = (self.resolved.source()?, self.resolved.target()?);
                let m_prime = self.config.require_m_prime()?;
                let labeled = sample_labeled(s, self.config.require_m()?, derive_seed(seed, SOURCE_LABELED))?;
                let u_s = sample_unlabeled(s, m_prime, derive_seed(seed, SOURCE_UNLABELED))?;
                let u_t = sample_unlabeled(t, m_prime, derive_seed(seed, TARGET_UNLABELED))?;
                let h_hat = erm(&WeightedRiskSpec::new().empirical(1.0, &labeled)?, class)?;
                thm1_rhs(&Theorem1Inputs {
                    class,
                    h: &h_hat.hypothesis,
                    source_sample: &labeled,
                    source_unlabeled: &u_s,
                    target_unlabeled: &u_t,
                    delta,
                    lambda,
                    target: Some(t),
                })
            }
            TheoremId::Thm2 => {
                let alpha = self.config.alpha_scalar()?;
                self.thm2_at(alpha, seed)
            }
            TheoremId::Thm3 => self.thm3_on(&self.draw_multi_source(seed)?),
            TheoremId::Thm7 => {
                let draw = self.draw_multi_source(seed)?;
                let per_source = self.per_source_erm(&draw)?;
                let mu = self.config.require_mu()?;
                let lam = self.lambda_alpha_mu(mu)?;
                self.thm7_on(&draw, &per_source, mu, lam.objective)
            }
            TheoremId::Thm5 => {
                let (s, t) = (self.resolved.source()?, self.resolved.target()?);
                let m = self.config.require_m()?;
                let n = self.config.params.n.unwrap_or(m);
                let labeled = sample_labeled(s, m, derive_seed(seed, SOURCE_LABELED))?;
                let t_sample = sample_unlabeled(t, n, derive_seed(seed, TARGET_UNLABELED))?;
                let h_hat = erm(&WeightedRiskSpec::new().empirical(1.0, &labeled)?, class)?;
                let mode = match self.config.params.rademacher_draws {
                    Some(draws) => RademacherMode::MonteCarlo {
                        draws,
                        seed: derive_seed(seed, RADEMACHER),
                    },
                    None => RademacherMode::Exact,
                };
                thm5_rhs(&Theorem5Inputs {
                    class,
                    h: &h_hat.hypothesis,
                    source_sample: &labeled.marginal(),
                    target_sample: &t_sample,
                    source: s,
                    target: t,
                    delta,
                    rademacher_mode: mode,
                })
            }
            TheoremId::Lemma1 | TheoremId::Thm4 => {
                let (s, t) = (self.resolved.source()?, self.resolved.target()?);
                let labeled = sample_labeled(s, self.config.require_m()?, derive_seed(seed, SOURCE_LABELED))?;
                let h_hat = erm(&WeightedRiskSpec::new().empirical(1.0, &labeled)?, class)?;
                if theorem == TheoremId::Lemma1 {
                    lemma1_rhs(class, &h_hat.hypothesis, s, t)
                } else {
                    thm4_rhs(class, LossSpec::ZERO_ONE, &h_hat.hypothesis, s, t)
                }
            }
        }
    }

    /// The mixed-sample bound at an arbitrary α on the trial's draw.
    pub fn thm2_at(&self, alpha: f64, seed: u64) -> Result<BoundReport> {
        let (s, t) = (self.resolved.source()?, self.resolved.target()?);
        let m = self.config.require_m()?;
        let m_prime = self.config.require_m_prime()?;
        let beta = self.config.params.beta.ok_or_else(|| invalid("params.beta", "required"))?;
        let (n_t, n_s) = mixed_sample_counts(beta, m)?;
        let target_sample = sample_labeled(t, n_t, derive_seed(seed, TARGET_LABELED))?;
        let source_sample = sample_labeled(s, n_s, derive_seed(seed, SOURCE_LABELED))?;
        let u_s = sample_unlabeled(s, m_prime, derive_seed(seed, SOURCE_UNLABELED))?;
        let u_t = sample_unlabeled(t, m_prime, derive_seed(seed, TARGET_UNLABELED))?;
        let mut report = thm2_rhs(&Theorem2Inputs {
            class: &self.resolved.class,
            target_sample: &target_sample,
            source_sample: &source_sample,
            source_unlabeled: &u_s,
            target_unlabeled: &u_t,
            alpha,
            delta: self.delta(),
            lambda: self.lambda.as_ref().map(|l| l.objective).unwrap_or_default(),
            target: t,
        })?;
        report.inputs.insert("beta_requested".into(), serde_json::json!(beta));
        Ok(report)
    }

    /// The α-weighted (or multi-source weighted) minimizer on the trial's draw, for reporting.
    pub fn weighted_erm(&self, seed: u64) -> Result<ErmResult> {
        match self.config.scenario {
            Scenario::AlphaMixed => {
                let (s, t) = (self.resolved.source()?, self.resolved.target()?);
                let beta = self.config.params.beta.ok_or_else(|| invalid("params.beta", "required"))?;
                let (n_t, n_s) = mixed_sample_counts(beta, self.config.require_m()?)?;
                let ts = sample_labeled(t, n_t, derive_seed(seed, TARGET_LABELED))?;
                let ss = sample_labeled(s, n_s, derive_seed(seed, SOURCE_LABELED))?;
                erm(&alpha_weighted_spec(self.config.alpha_scalar()?, &ts, &ss)?, &self.resolved.class)
            }
            Scenario::MultiSource => {
                let draw = self.draw_multi_source(seed)?;
                let alpha = self.config.alpha_vector(self.resolved.sources.len())?;
                erm(&multi_source_spec(&draw.labeled, &alpha)?, &self.resolved.class)
            }
            _ => {
                let labeled = sample_labeled(self.resolved.source()?, self.config.require_m()?, derive_seed(seed, SOURCE_LABELED))?;
                erm(&WeightedRiskSpec::new().empirical(1.0, &labeled)?, &self.resolved.class)
            }
        }
    }
}
