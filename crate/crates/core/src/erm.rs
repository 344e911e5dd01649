//! Exact (enumerative) risk minimization over a finite class, and the ideal
//! joint-hypothesis risks built on the same machinery.

use serde::Serialize;

use crate::domains::{check_simplex, empirical_risk, expected_risk, DiscreteDomain, LabeledSample};
use crate::error::{Error, Result};
use crate::hypothesis::{ensure_same_ground, Hypothesis, HypothesisClass};

/// Where a weighted risk term gets its risk from.
#[derive(Debug, Clone, Copy)]
pub enum RiskSource<'a> {
    Empirical(&'a LabeledSample),
    Expected(&'a DiscreteDomain),
}

impl RiskSource<'_> {
    pub fn risk(&self, h: &Hypothesis) -> Result<f64> {
        match self {
            RiskSource::Empirical(s) => empirical_risk(s, h),
            RiskSource::Expected(d) => expected_risk(d, h, None),
        }
    }
}

/// A non-negative combination of empirical and/or expected risks.
#[derive(Debug, Clone, Default)]
pub struct WeightedRiskSpec<'a> {
    terms: Vec<(f64, RiskSource<'a>)>,
}

impl<'a> WeightedRiskSpec<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, weight: f64, source: RiskSource<'a>) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeights(format!("term weight {weight}")));
        }
        self.terms.push((weight, source));
        Ok(self)
    }

    pub fn empirical(self, weight: f64, sample: &'a LabeledSample) -> Result<Self> {
        self.term(weight, RiskSource::Empirical(sample))
    }

    pub fn expected(self, weight: f64, domain: &'a DiscreteDomain) -> Result<Self> {
        self.term(weight, RiskSource::Expected(domain))
    }

    pub fn terms(&self) -> &[(f64, RiskSource<'a>)] {
        &self.terms
    }

    /// Same terms with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.terms
            .iter()
            .try_fold(Self::new(), |acc, &(w, s)| acc.term(c * w, s))
    }
}

/// `Σ_j w_j · risk_j(h)`.
pub fn weighted_objective(spec: &WeightedRiskSpec<'_>, h: &Hypothesis) -> Result<f64> {
    if spec.terms.is_empty() {
        return Err(Error::Empty("weighted risk spec"));
    }
    spec.terms
        .iter()
        .map(|(w, s)| s.risk(h).map(|r| w * r))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct ErmResult {
    pub index: usize,
    #[serde(serialize_with = "serialize_outputs")]
    pub hypothesis: Hypothesis,
    pub objective: f64,
    /// Number of members attaining the minimum.
    pub tie_count: usize,
}

fn serialize_outputs<S: serde::Serializer>(h: &Hypothesis, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(h.outputs())
}

/// Exact minimizer of the weighted objective; ties go to the lowest member index.
pub fn erm(spec: &WeightedRiskSpec<'_>, class: &HypothesisClass) -> Result<ErmResult> {
    let mut best: Option<(usize, f64)> = None;
    let mut ties = 0;
    for (i, h) in class.members().iter().enumerate() {
        let v = weighted_objective(spec, h)?;
        match best {
            Some((_, b)) if v > b => {}
            Some((_, b)) if v == b => ties += 1,
            _ => {
                best = Some((i, v));
                ties = 1;
            }
        }
    }
    let (index, objective) = best.ok_or(Error::Empty("hypothesis class"))?;
    Ok(ErmResult {
        index,
        hypothesis: class.member(index).clone(),
        objective,
        tie_count: ties,
    })
}

/// `min_h Σ_j w_j ε_{D_j}(h)` with its minimizer, from exact expected risks.
pub fn ideal_risk(terms: &[(f64, &DiscreteDomain)], class: &HypothesisClass) -> Result<ErmResult> {
    let spec = terms
        .iter()
        .try_fold(WeightedRiskSpec::new(), |acc, &(w, d)| acc.expected(w, d))?;
    erm(&spec, class)
}

/// Weights on `(target, source_1, ..., source_K)` defining `λ_{α,μ}`:
/// the target gets 1, source `i` gets `α_i μ + (1 - α_i)(1 - μ)/(K - 1)`.
pub fn alpha_mu_weights(alpha: &[f64], mu: f64) -> Result<Vec<f64>> {
    let k = alpha.len();
    if k < 2 {
        return Err(Error::InvalidWeights("need at least two sources".into()));
    }
    let peer = (1.0 - mu) / (k - 1) as f64;
    Ok(alpha.iter().map(|a| a * mu + (1.0 - a) * peer).collect())
}

/// Pointwise convex combination `Σ_i α_i ĥ_i`.
pub fn multisource_ensemble(per_source: &[ErmResult], alpha: &[f64]) -> Result<Hypothesis> {
    if per_source.is_empty() {
        return Err(Error::Empty("per-source hypothesis list"));
    }
    if per_source.len() != alpha.len() {
        return Err(Error::InvalidWeights(format!(
            "{} hypotheses but {} weights",
            per_source.len(),
            alpha.len()
        )));
    }
    check_simplex(alpha)?;
    let ground = per_source[0].hypothesis.ground().clone();
    let mut out = vec![0.0; ground.len()];
    for (r, &a) in per_source.iter().zip(alpha) {
        ensure_same_ground(&ground, r.hypothesis.ground())?;
        for (o, v) in out.iter_mut().zip(r.hypothesis.outputs()) {
            *o += a * v;
        }
    }
    if per_source.len() == 1 {
        return Ok(per_source[0].hypothesis.clone());
    }
    for o in &mut out {
        *o = o.clamp(0.0, 1.0);
    }
    Hypothesis::new(ground, out)
}
