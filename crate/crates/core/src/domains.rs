//! Finite-support domains, samples drawn from them, and exact/empirical risks.

use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::Binomial;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypothesis::{ensure_same_ground, same_ground, GroundSet, Hypothesis};
use crate::rng::rng_from_seed;

/// Tolerance on the total mass of a probability vector.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Checks a probability vector and renormalizes it if its mass is within tolerance of 1.
pub(crate) fn normalize_probs(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if total != 1.0 {
        for p in &mut probs {
            *p /= total;
        }
    }
    Ok(probs)
}

/// A source or target domain: a distribution over the ground set plus a labeling function.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    ground: Arc<GroundSet>,
    probs: Vec<f64>,
    label_fn: Hypothesis,
    mixed_labels: bool,
}

/// Wire format for a domain. Points may be given in any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    pub labels: Vec<f64>,
}

impl DiscreteDomain {
    pub fn new(ground: Arc<GroundSet>, probs: Vec<f64>, label_fn: Hypothesis) -> Result<Self> {
        if probs.len() != ground.len() {
            return Err(Error::DimensionMismatch {
                expected: ground.len(),
                got: probs.len(),
            });
        }
        ensure_same_ground(&ground, label_fn.ground())?;
        let probs = normalize_probs(probs)?;
        Ok(DiscreteDomain {
            ground,
            probs,
            label_fn,
            mixed_labels: false,
        })
    }

    /// Builds a domain from raw label values aligned with the ground points.
    pub fn with_labels(ground: Arc<GroundSet>, probs: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        let label_fn = Hypothesis::new(ground.clone(), labels)?;
        Self::new(ground, probs, label_fn)
    }

    pub fn from_json(spec: &DomainJson) -> Result<Self> {
        let n = spec.points.len();
        if spec.probs.len() != n || spec.labels.len() != n {
            return Err(invalid(
                "domain",
                format!(
                    "points, probs and labels must have equal lengths ({}, {}, {})",
                    n,
                    spec.probs.len(),
                    spec.labels.len()
                ),
            ));
        }
        let (ground, perm) = GroundSet::canonicalize(spec.points.clone())?;
        let probs = perm.iter().map(|&i| spec.probs[i]).collect();
        let labels = perm.iter().map(|&i| spec.labels[i]).collect();
        Self::with_labels(ground, probs, labels)
    }

    pub fn to_json(&self) -> DomainJson {
        DomainJson {
            points: self.ground.points().to_vec(),
            probs: self.probs.clone(),
            labels: self.label_fn.outputs().to_vec(),
        }
    }

    /// Swaps in a structurally identical ground set so that several domains share one `Arc`.
    pub fn rebased(self, ground: &Arc<GroundSet>) -> Result<Self> {
        ensure_same_ground(&self.ground, ground)?;
        let label_fn = Hypothesis::new(ground.clone(), self.label_fn.outputs().to_vec())?;
        Ok(DiscreteDomain {
            ground: ground.clone(),
            label_fn,
            ..self
        })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn label_fn(&self) -> &Hypothesis {
        &self.label_fn
    }

    /// True when this domain is a mixture of components whose labeling functions differ;
    /// only its marginal is meaningful then.
    pub fn has_mixed_labels(&self) -> bool {
        self.mixed_labels
    }
}

/// Labeled sample: a multiset of `(point index, label)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    ground: Arc<GroundSet>,
    entries: Vec<(usize, f64)>,
}

impl LabeledSample {
    pub fn new(ground: Arc<GroundSet>, entries: Vec<(usize, f64)>) -> Result<Self> {
        for &(i, y) in &entries {
            if i >= ground.len() {
                return Err(invalid("entries", format!("index {i} out of range")));
            }
            if !(0.0..=1.0).contains(&y) {
                return Err(invalid("entries", format!("label {y} outside [0,1]")));
            }
        }
        Ok(LabeledSample { ground, entries })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Forgets the labels.
    pub fn marginal(&self) -> UnlabeledSample {
        UnlabeledSample::from_indices(
            self.ground.clone(),
            self.entries.iter().map(|&(i, _)| i),
        )
        .expect("indices validated at construction")
    }
}

/// Unlabeled sample, stored as per-point multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSample {
    ground: Arc<GroundSet>,
    counts: Vec<u64>,
    size: u64,
}

impl UnlabeledSample {
    pub fn from_counts(ground: Arc<GroundSet>, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != ground.len() {
            return Err(Error::DimensionMismatch {
                expected: ground.len(),
                got: counts.len(),
            });
        }
        let size = counts.iter().sum();
        Ok(UnlabeledSample {
            ground,
            counts,
            size,
        })
    }

    pub fn from_indices(ground: Arc<GroundSet>, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut counts = vec![0u64; ground.len()];
        for i in indices {
            if i >= counts.len() {
                return Err(invalid("indices", format!("index {i} out of range")));
            }
            counts[i] += 1;
        }
        Self::from_counts(ground, counts)
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.size as usize
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Point indices in ascending order, each repeated by its multiplicity.
    pub fn indices(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    }

    /// Empirical distribution over the ground set.
    pub fn empirical_probs(&self) -> Result<Vec<f64>> {
        if self.size == 0 {
            return Err(Error::Empty("unlabeled sample"));
        }
        let m = self.size as f64;
        Ok(self.counts.iter().map(|&c| c as f64 / m).collect())
    }
}

/// `E_{x~D} |h(x) - g(x)|`; `g` defaults to the domain's labeling function.
pub fn expected_risk(domain: &DiscreteDomain, h: &Hypothesis, g: Option<&Hypothesis>) -> Result<f64> {
    let g = g.unwrap_or(&domain.label_fn);
    ensure_same_ground(&domain.ground, h.ground())?;
    ensure_same_ground(&domain.ground, g.ground())?;
    Ok(domain
        .probs
        .iter()
        .zip(h.outputs().iter().zip(g.outputs()))
        .map(|(p, (a, b))| p * (a - b).abs())
        .sum())
}

/// Mean absolute loss of `h` over the sample entries.
pub fn empirical_risk(sample: &LabeledSample, h: &Hypothesis) -> Result<f64> {
    if sample.entries.is_empty() {
        return Err(Error::Empty("labeled sample"));
    }
    ensure_same_ground(&sample.ground, h.ground())?;
    let out = h.outputs();
    let total: f64 = sample.entries.iter().map(|&(i, y)| (out[i] - y).abs()).sum();
    Ok(total / sample.entries.len() as f64)
}

/// Convex combination of domain marginals. The labeling function is taken from
/// the first component; the result is flagged when the components disagree on labels.
pub fn mixture_domain(domains: &[&DiscreteDomain], weights: &[f64]) -> Result<DiscreteDomain> {
    let first = domains.first().ok_or(Error::Empty("mixture component list"))?;
    if domains.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} domains but {} weights",
            domains.len(),
            weights.len()
        )));
    }
    check_simplex(weights)?;
    for d in domains {
        ensure_same_ground(&first.ground, &d.ground)?;
    }
    let n = first.ground.len();
    let mut probs = vec![0.0; n];
    for (d, &w) in domains.iter().zip(weights) {
        for (acc, p) in probs.iter_mut().zip(&d.probs) {
            *acc += w * p;
        }
    }
    let mixed = domains
        .iter()
        .any(|d| d.label_fn.outputs() != first.label_fn.outputs() || d.mixed_labels);
    let mut out = DiscreteDomain::new(first.ground.clone(), probs, first.label_fn.clone())?;
    out.mixed_labels = mixed;
    Ok(out)
}

/// Non-negative weights summing to one within [`PROB_TOLERANCE`].
pub(crate) fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no weights".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// `m` i.i.d. draws labeled by the domain's labeling function.
pub fn sample_labeled(domain: &DiscreteDomain, m: usize, seed: u64) -> Result<LabeledSample> {
    if m == 0 {
        return Err(invalid("m", "sample size must be at least 1"));
    }
    let dist = WeightedIndex::new(&domain.probs)
        .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let labels = domain.label_fn.outputs();
    let entries = (0..m)
        .map(|_| {
            let i = dist.sample(&mut rng);
            (i, labels[i])
        })
        .collect();
    LabeledSample::new(domain.ground.clone(), entries)
}

/// `m` i.i.d. draws of the marginal, generated as multinomial counts.
pub fn sample_unlabeled(domain: &DiscreteDomain, m: usize, seed: u64) -> Result<UnlabeledSample> {
    if m == 0 {
        return Err(invalid("m", "sample size must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let n = domain.probs.len();
    let last = domain
        .probs
        .iter()
        .rposition(|&p| p > 0.0)
        .ok_or_else(|| Error::InvalidDistribution("no mass".into()))?;
    let mut counts = vec![0u64; n];
    let mut remaining = m as u64;
    let mut mass_left = 1.0f64;
    for i in 0..=last {
        if remaining == 0 {
            break;
        }
        let p = domain.probs[i];
        if i == last || mass_left <= p {
            counts[i] = remaining;
            break;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let c = Binomial::new(remaining, q)
            .map_err(|e| Error::Numerical(e.to_string()))?
            .sample(&mut rng);
        counts[i] = c;
        remaining -= c;
        mass_left -= p;
    }
    UnlabeledSample::from_counts(domain.ground.clone(), counts)
}

/// True when both objects live on the same ground set.
pub fn aligned(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> bool {
    same_ground(a, b)
}
