//! Experiment configuration: the JSON schema, synthetic domain generators, and
//! resolution of a config into concrete domains and a hypothesis class.

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::domains::{DiscreteDomain, DomainJson};
use crate::error::{invalid, Error, Result};
use crate::htl::{RegressionDomain, SourcePredictor};
use crate::hypothesis::{make_finite_class, make_threshold_class, GroundSet, HypothesisClass};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SingleSource,
    AlphaMixed,
    MultiSource,
    Discrepancy,
    HtlStability,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::SingleSource => "single_source",
            Scenario::AlphaMixed => "alpha_mixed",
            Scenario::MultiSource => "multi_source",
            Scenario::Discrepancy => "discrepancy",
            Scenario::HtlStability => "htl_stability",
        }
    }
}

/// Top-level config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub domains: DomainsSpec,
    #[serde(default)]
    pub class: ClassSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Vec<DomainSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<RegressionSpec>,
}

/// A domain given inline or produced by the covariate-shift generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Generated { generator: GeneratorSpec },
    Inline(DomainJson),
}

/// Synthetic 1-D domain: `n` evenly spaced points on `[0, 1]`, Gaussian-shaped
/// weights around `center`, threshold labels `1[x ≥ label_threshold]` with a
/// `label_disagreement` fraction of points flipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n: usize,
    pub center: f64,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_threshold")]
    pub label_threshold: f64,
    #[serde(default)]
    pub label_disagreement: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_spread() -> f64 {
    0.2
}

fn default_threshold() -> f64 {
    0.5
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    #[default]
    Threshold,
    Explicit {
        members: Vec<Vec<f64>>,
        vc_dim: usize,
    },
}

/// A scalar or per-source vector of weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Numeric parameters; which ones are required depends on the scenario and theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Labeled sample size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Unlabeled sample size per domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_prime: Option<usize>,
    /// Target sample size for the Rademacher bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Weights>,
    /// Target fraction of the mixed labeled sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Labeled sample size of each source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_grid: Option<Vec<f64>>,
    /// Monte Carlo sign vectors for Rademacher terms; exact enumeration when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rademacher_draws: Option<usize>,
    /// Sample sizes for the stability grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
    /// Regularization strengths as multiples of `1/m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_multipliers: Option<Vec<f64>>,
    /// Truncation level; absent or `null` means untruncated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            m: None,
            m_prime: None,
            n: None,
            delta: default_delta(),
            alpha: None,
            beta: None,
            source_sizes: None,
            mu: None,
            mu_grid: None,
            rademacher_draws: None,
            m_grid: None,
            lambda_multipliers: None,
            truncation: None,
        }
    }
}

fn default_delta() -> f64 {
    0.1
}

/// Target regression domain and source predictor for the stability experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionSpec {
    pub target: RegressionDomain,
    pub source: LinearSourceSpec,
}

/// `f′(x) = clip(wᵀx + b, ±sup_norm)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSourceSpec {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub bias: f64,
    pub sup_norm: f64,
}

impl LinearSourceSpec {
    pub fn build(&self) -> SourcePredictor {
        SourcePredictor::linear(self.weights.clone(), self.bias, self.sup_norm)
    }
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<DiscreteDomain> {
        if self.n == 0 {
            return Err(invalid("generator.n", "must be at least 1"));
        }
        if !(self.spread > 0.0) {
            return Err(invalid("generator.spread", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.label_disagreement) {
            return Err(invalid("generator.label_disagreement", "must lie in [0,1]"));
        }
        let xs: Vec<f64> = if self.n == 1 {
            vec![0.5]
        } else {
            (0..self.n).map(|k| k as f64 / (self.n - 1) as f64).collect()
        };
        let raw: Vec<f64> = xs
            .iter()
            .map(|x| (-(x - self.center).powi(2) / (2.0 * self.spread * self.spread)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("generator", "weights underflow to zero"));
        }
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut labels: Vec<f64> = xs
            .iter()
            .map(|&x| if x >= self.label_threshold { 1.0 } else { 0.0 })
            .collect();
        let flips = (self.label_disagreement * self.n as f64).round() as usize;
        if flips > 0 {
            let mut order: Vec<usize> = (0..self.n).collect();
            order.shuffle(&mut rng_from_seed(self.seed));
            for &i in order.iter().take(flips) {
                labels[i] = 1.0 - labels[i];
            }
        }
        let ground = GroundSet::from_scalars(&xs)?;
        DiscreteDomain::with_labels(ground, renormalized(probs), labels)
    }
}

/// Divides by the float sum once more so the total is within rounding of 1.
fn renormalized(probs: Vec<f64>) -> Vec<f64> {
    let total: f64 = probs.iter().sum();
    probs.into_iter().map(|p| p / total).collect()
}

impl DomainSpec {
    pub fn build(&self) -> Result<DiscreteDomain> {
        match self {
            DomainSpec::Generated { generator } => generator.build(),
            DomainSpec::Inline(json) => DiscreteDomain::from_json(json),
        }
    }
}

/// Domains and class resolved onto one shared ground set.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub ground: Arc<GroundSet>,
    pub class: HypothesisClass,
    pub source: Option<DiscreteDomain>,
    pub target: Option<DiscreteDomain>,
    pub sources: Vec<DiscreteDomain>,
}

impl Resolved {
    pub fn source(&self) -> Result<&DiscreteDomain> {
        self.source.as_ref().ok_or_else(|| invalid("domains.source", "required"))
    }

    pub fn target(&self) -> Result<&DiscreteDomain> {
        self.target.as_ref().ok_or_else(|| invalid("domains.target", "required"))
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is plain data")
    }

    /// Builds all discrete domains onto one shared ground set, plus the class.
    pub fn resolve(&self) -> Result<Resolved> {
        let mut built: Vec<DiscreteDomain> = Vec::new();
        let source_idx = self.domains.source.as_ref().map(|d| push(&mut built, d)).transpose()?;
        let target_idx = self.domains.target.as_ref().map(|d| push(&mut built, d)).transpose()?;
        let source_idxs = self
            .domains
            .sources
            .iter()
            .flatten()
            .map(|d| push(&mut built, d))
            .collect::<Result<Vec<_>>>()?;
        let first = built.first().ok_or_else(|| invalid("domains", "no discrete domains given"))?;
        let ground = first.ground().clone();
        let built = built
            .into_iter()
            .map(|d| d.rebased(&ground))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::GroundMismatch => invalid("domains", "all domains must share the same support points"),
                other => other,
            })?;
        let class = match &self.class {
            ClassSpec::Threshold => make_threshold_class(ground.clone())?,
            ClassSpec::Explicit { members, vc_dim } => make_finite_class(ground.clone(), members.clone(), *vc_dim)?,
        };
        Ok(Resolved {
            ground,
            class,
            source: source_idx.map(|i| built[i].clone()),
            target: target_idx.map(|i| built[i].clone()),
            sources: source_idxs.iter().map(|&i| built[i].clone()).collect(),
        })
    }

    pub fn alpha_scalar(&self) -> Result<f64> {
        match &self.params.alpha {
            Some(Weights::Scalar(a)) => Ok(*a),
            Some(Weights::Vector(_)) => Err(invalid("params.alpha", "expected a scalar")),
            None => Err(invalid("params.alpha", "required")),
        }
    }

    pub fn alpha_vector(&self, k: usize) -> Result<Vec<f64>> {
        match &self.params.alpha {
            Some(Weights::Vector(a)) if a.len() == k => Ok(a.clone()),
            Some(Weights::Vector(a)) => Err(invalid("params.alpha", format!("expected {k} weights, got {}", a.len()))),
            Some(Weights::Scalar(_)) => Err(invalid("params.alpha", "expected one weight per source")),
            None => Ok(vec![1.0 / k as f64; k]),
        }
    }

    pub fn require_m(&self) -> Result<usize> {
        self.params.m.filter(|&m| m > 0).ok_or_else(|| invalid("params.m", "required positive integer"))
    }

    pub fn require_m_prime(&self) -> Result<usize> {
        self.params
            .m_prime
            .filter(|&m| m > 0)
            .ok_or_else(|| invalid("params.m_prime", "required positive integer"))
    }

    pub fn require_mu(&self) -> Result<f64> {
        self.params.mu.ok_or_else(|| invalid("params.mu", "required"))
    }

    pub fn truncation(&self) -> f64 {
        self.params.truncation.unwrap_or(f64::INFINITY)
    }
}

fn push(built: &mut Vec<DiscreteDomain>, spec: &DomainSpec) -> Result<usize> {
    built.push(spec.build()?);
    Ok(built.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_properties() {
        let d = GeneratorSpec {
            n: 11,
            center: 0.3,
            spread: 0.2,
            label_threshold: 0.5,
            label_disagreement: 0.0,
            seed: 0,
        }
        .build()
        .unwrap();
        assert_eq!(d.ground().len(), 11);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.label_fn().outputs()[4], 0.0);
        assert_eq!(d.label_fn().outputs()[5], 1.0);
        let noisy = GeneratorSpec {
            label_disagreement: 0.2,
            seed: 5,
            ..GeneratorSpec {
                n: 10,
                center: 0.5,
                spread: 0.2,
                label_threshold: 0.5,
                label_disagreement: 0.0,
                seed: 0,
            }
        }
        .build()
        .unwrap();
        let clean: Vec<f64> = (0..10).map(|k| if k >= 5 { 1.0 } else { 0.0 }).collect();
        let flipped = noisy
            .label_fn()
            .outputs()
            .iter()
            .zip(&clean)
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(flipped, 2);
    }

    #[test]
    fn parse_minimal_and_defaults() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"scenario":"single_source","domains":{"source":{"generator":{"n":5,"center":0.4}},
                "target":{"points":[[0],[0.25],[0.5],[0.75],[1]],"probs":[0.2,0.2,0.2,0.2,0.2],"labels":[0,0,1,1,1]}},
                "params":{"m":20,"m_prime":20}}"#,
        )
        .unwrap();
        assert_eq!(cfg.class, ClassSpec::Threshold);
        assert_eq!(cfg.params.delta, 0.1);
        assert_eq!(cfg.trials, 100);
        let r = cfg.resolve().unwrap();
        assert!(Arc::ptr_eq(r.source().unwrap().ground(), r.target().unwrap().ground()));
        assert_eq!(r.class.len(), 10);
        let back = ExperimentConfig::from_json_str(&cfg.to_json_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ExperimentConfig::from_json_str(r#"{"scenario":"single_source","bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"scenario":"nope"}"#).is_err());
    }

    #[test]
    fn mismatched_supports_rejected() {
        let cfg = ExperimentConfig::from_json_str(
            r#"{"scenario":"single_source","domains":{"source":{"generator":{"n":5,"center":0.4}},
                "target":{"generator":{"n":6,"center":0.4}}}}"#,
        )
        .unwrap();
        assert!(cfg.resolve().is_err());
    }
}
