//! Right-hand-side calculators for the domain-adaptation and multi-source
//! transfer bounds, each returning a per-term breakdown.
//!
//! Every [`BoundReport`] stores its terms already multiplied by their
//! coefficients, so `rhs_total` is the plain sum of `terms` in order.
//!
//! | id       | bound                                                                    |
//! |----------|--------------------------------------------------------------------------|
//! | `lemma1` | ε_T(h) ≤ ε_S(h) + ½ d(D_S, D_T) + λ                                      |
//! | `thm1`   | ε_T(h) ≤ ε̂_S(h) + A(m) + ½ d̂(U_S, U_T) + C(m′) + λ                      |
//! | `thm2`   | ε_T(ĥ) ≤ ε_T(h*_T) + 2√(α²/β + (1-α)²/(1-β))·B(m) + 2(1-α)(½ d̂ + C + λ) |
//! | `thm3`   | ε_T(ĥ) ≤ ε_T(h*_T) + 2√(Σ α_j²/β_j)·B(m) + 2(½ d(D_α, D_T) + λ_α)       |
//! | `thm4`   | L_T(h,f_T) ≤ L_T(h*_T,f_T) + L_S(h,h*_S) + disc(S,T) + L_S(h*_S,h*_T)   |
//! | `thm5`   | Rademacher version of `thm4` from samples                                |
//! | `thm7`   | peer-evaluated multi-source bound on ε_T(Σ α_i ĥ_i)                      |
//!
//! with the complexity terms
//!
//! ```text
//! A(m)  = √(4 (d ln(2em/d) + ln(4/δ)) / m)
//! B(m)  = √((d ln(2m) - ln δ) / (2m))
//! C(m′) = 4 √((2d ln(2m′) + ln(4/δ)) / m′)
//! ```
//!
//! Natural logarithms throughout. A single δ is used inside each bound.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::divergence::{
    discrepancy, hdh_divergence, pair_mass, rademacher, LossSpec, Measure, RademacherMode,
};
use crate::domains::{check_simplex, empirical_risk, expected_risk, DiscreteDomain, LabeledSample, UnlabeledSample};
use crate::erm::{erm, ideal_risk, ErmResult, WeightedRiskSpec};
use crate::error::{invalid, Error, Result};
use crate::hypothesis::{ensure_same_ground, Hypothesis, HypothesisClass};
use crate::rng::derive_seed;

/// Slack allowed when deciding whether a realized left-hand side satisfies a bound.
pub const HOLDS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Lemma1,
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Thm7,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Lemma1 => "lemma1",
            TheoremId::Thm1 => "thm1",
            TheoremId::Thm2 => "thm2",
            TheoremId::Thm3 => "thm3",
            TheoremId::Thm4 => "thm4",
            TheoremId::Thm5 => "thm5",
            TheoremId::Thm7 => "thm7",
        }
    }

    /// Whether the bound is a statement about random samples (holds with probability 1-δ).
    pub fn is_probabilistic(&self) -> bool {
        matches!(self, TheoremId::Thm1 | TheoremId::Thm2 | TheoremId::Thm3 | TheoremId::Thm5 | TheoremId::Thm7)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "lemma1" => TheoremId::Lemma1,
            "1" | "thm1" => TheoremId::Thm1,
            "2" | "thm2" => TheoremId::Thm2,
            "3" | "thm3" => TheoremId::Thm3,
            "4" | "thm4" => TheoremId::Thm4,
            "5" | "thm5" => TheoremId::Thm5,
            "7" | "thm7" => TheoremId::Thm7,
            other => return Err(format!("unknown theorem `{other}`")),
        })
    }
}

/// One evaluated bound: named right-hand-side terms, their total, and the realized left-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub terms: IndexMap<String, f64>,
    pub rhs_total: f64,
    pub lhs_realized: Option<f64>,
    pub holds: Option<bool>,
    pub inputs: IndexMap<String, Value>,
}

impl BoundReport {
    fn build(
        theorem_id: TheoremId,
        terms: Vec<(&str, f64)>,
        lhs: Option<f64>,
        inputs: Vec<(&str, Value)>,
    ) -> Result<Self> {
        let terms: IndexMap<String, f64> = terms.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        if let Some((k, v)) = terms.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numerical(format!("{theorem_id}: term `{k}` is {v}")));
        }
        let rhs_total = terms.values().sum();
        Ok(BoundReport {
            theorem_id,
            terms,
            rhs_total,
            lhs_realized: lhs,
            holds: lhs.map(|l| l <= rhs_total + HOLDS_TOLERANCE),
            inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        })
    }

    /// Sum of the stored terms; equals `rhs_total` for every report built by this module.
    pub fn recomposed(&self) -> f64 {
        self.terms.values().sum()
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.get(name).copied()
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["theorem_id".to_string()];
        h.extend(self.terms.keys().cloned());
        h.extend(["rhs_total", "lhs_realized", "holds", "inputs"].map(String::from));
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut r = vec![self.theorem_id.to_string()];
        r.extend(self.terms.values().map(|v| v.to_string()));
        r.push(self.rhs_total.to_string());
        r.push(self.lhs_realized.map(|v| v.to_string()).unwrap_or_default());
        r.push(self.holds.map(|v| v.to_string()).unwrap_or_default());
        r.push(serde_json::to_string(&self.inputs).expect("inputs are plain JSON values"));
        r
    }
}

/// Which VC-style complexity term to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexityKind {
    /// `√(4 (d ln(2em/d) + ln(4/δ)) / m)`
    A,
    /// `√((d ln(2m) - ln δ) / (2m))`
    B,
    /// `4 √((2d ln(2m′) + ln(4/δ)) / m′)`
    C,
}

pub fn complexity_term(kind: ComplexityKind, m: usize, d: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if m == 0 {
        return Err(invalid("m", "must be positive"));
    }
    if d == 0 {
        return Err(invalid("d", "must be positive"));
    }
    let (m, d) = (m as f64, d as f64);
    let value = match kind {
        ComplexityKind::A => {
            let ratio = 2.0 * std::f64::consts::E * m / d;
            if ratio < 1.0 {
                return Err(invalid("m", format!("2em/d = {ratio} < 1")));
            }
            (4.0 * (d * ratio.ln() + (4.0 / delta).ln()) / m).sqrt()
        }
        ComplexityKind::B => ((d * (2.0 * m).ln() - delta.ln()) / (2.0 * m)).sqrt(),
        ComplexityKind::C => 4.0 * ((2.0 * d * (2.0 * m).ln() + (4.0 / delta).ln()) / m).sqrt(),
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numerical(format!("complexity term {kind:?} evaluated to {value}")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(invalid("delta", format!("{delta} not in (0,1)")))
    }
}

fn ensure_member(class: &HypothesisClass, h: &Hypothesis) -> Result<usize> {
    class
        .index_of(h)
        .ok_or_else(|| invalid("h", "hypothesis is not a member of the class"))
}

/// `ε_T(h) ≤ ε_S(h) + ½ d(D_S, D_T) + λ`, with every quantity exact.
pub fn lemma1_rhs(
    class: &HypothesisClass,
    h: &Hypothesis,
    source: &DiscreteDomain,
    target: &DiscreteDomain,
) -> Result<BoundReport> {
    class.ensure_binary()?;
    let index = ensure_member(class, h)?;
    let lambda = ideal_risk(&[(1.0, source), (1.0, target)], class)?;
    let half = 0.5 * hdh_divergence(class, &source.into(), &target.into())?;
    BoundReport::build(
        TheoremId::Lemma1,
        vec![
            ("source_risk", expected_risk(source, h, None)?),
            ("half_divergence", half),
            ("lambda", lambda.objective),
        ],
        Some(expected_risk(target, h, None)?),
        vec![
            ("h_index", json!(index)),
            ("lambda_argmin", json!(lambda.index)),
            ("vc_dim", json!(class.vc_dim())),
        ],
    )
}

pub struct Theorem1Inputs<'a> {
    pub class: &'a HypothesisClass,
    pub h: &'a Hypothesis,
    /// Labeled sample drawn from the source domain.
    pub source_sample: &'a LabeledSample,
    pub source_unlabeled: &'a UnlabeledSample,
    pub target_unlabeled: &'a UnlabeledSample,
    pub delta: f64,
    pub lambda: f64,
    /// When present, `lhs_realized` is the exact target risk of `h`.
    pub target: Option<&'a DiscreteDomain>,
}

pub fn thm1_rhs(inp: &Theorem1Inputs<'_>) -> Result<BoundReport> {
    let class = inp.class;
    let index = ensure_member(class, inp.h)?;
    let m_prime = inp.source_unlabeled.len();
    if inp.target_unlabeled.len() != m_prime {
        return Err(invalid(
            "unlabeled samples",
            format!("sizes differ ({} vs {})", m_prime, inp.target_unlabeled.len()),
        ));
    }
    let m = inp.source_sample.len();
    let d = class.vc_dim();
    let d_hat = hdh_divergence(
        class,
        &Measure::from_sample(inp.source_unlabeled)?,
        &Measure::from_sample(inp.target_unlabeled)?,
    )?;
    let lhs = inp.target.map(|t| expected_risk(t, inp.h, None)).transpose()?;
    BoundReport::build(
        TheoremId::Thm1,
        vec![
            ("emp_source_risk", empirical_risk(inp.source_sample, inp.h)?),
            ("vc_term_a", complexity_term(ComplexityKind::A, m, d, inp.delta)?),
            ("half_emp_divergence", 0.5 * d_hat),
            ("unlabeled_term_c", complexity_term(ComplexityKind::C, m_prime, d, inp.delta)?),
            ("lambda", inp.lambda),
        ],
        lhs,
        vec![
            ("m", json!(m)),
            ("m_prime", json!(m_prime)),
            ("d", json!(d)),
            ("delta", json!(inp.delta)),
            ("h_index", json!(index)),
            ("labeled_sample_from", json!("source")),
        ],
    )
}

/// Target and source counts for a mixed sample of size `m` with target fraction `beta`,
/// rounding `beta * m` half-to-even.
pub fn mixed_sample_counts(beta: f64, m: usize) -> Result<(usize, usize)> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("beta", format!("{beta} not in (0,1)")));
    }
    let target = (beta * m as f64).round_ties_even() as usize;
    if target == 0 || target >= m {
        return Err(invalid(
            "beta",
            format!("round(beta * m) = {target} leaves one side of the m = {m} sample empty"),
        ));
    }
    Ok((target, m - target))
}

pub struct Theorem2Inputs<'a> {
    pub class: &'a HypothesisClass,
    /// The `round(βm)` points drawn from the target.
    pub target_sample: &'a LabeledSample,
    /// The remaining points drawn from the source.
    pub source_sample: &'a LabeledSample,
    pub source_unlabeled: &'a UnlabeledSample,
    pub target_unlabeled: &'a UnlabeledSample,
    pub alpha: f64,
    pub delta: f64,
    pub lambda: f64,
    pub target: &'a DiscreteDomain,
}

/// The α-weighted empirical objective `α ε̂_T + (1-α) ε̂_S`.
pub fn alpha_weighted_spec<'a>(
    alpha: f64,
    target_sample: &'a LabeledSample,
    source_sample: &'a LabeledSample,
) -> Result<WeightedRiskSpec<'a>> {
    WeightedRiskSpec::new()
        .empirical(alpha, target_sample)?
        .empirical(1.0 - alpha, source_sample)
}

/// Right-hand side and realized risk of the α-weighted minimizer. `β` is the
/// realized target fraction of the labeled sample.
pub fn thm2_rhs(inp: &Theorem2Inputs<'_>) -> Result<BoundReport> {
    check_delta(inp.delta)?;
    let alpha = inp.alpha;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} not in [0,1]")));
    }
    let (n_t, n_s) = (inp.target_sample.len(), inp.source_sample.len());
    if n_t == 0 || n_s == 0 {
        return Err(invalid("beta", "mixed sample needs both target and source points"));
    }
    let m_prime = inp.source_unlabeled.len();
    if inp.target_unlabeled.len() != m_prime {
        return Err(invalid("unlabeled samples", "sizes differ"));
    }
    let m = n_t + n_s;
    let beta = n_t as f64 / m as f64;
    let d = inp.class.vc_dim();
    let h_hat = erm(&alpha_weighted_spec(alpha, inp.target_sample, inp.source_sample)?, inp.class)?;
    let target_opt = ideal_risk(&[(1.0, inp.target)], inp.class)?;
    let d_hat = hdh_divergence(
        inp.class,
        &Measure::from_sample(inp.source_unlabeled)?,
        &Measure::from_sample(inp.target_unlabeled)?,
    )?;
    let shape = (alpha * alpha / beta + (1.0 - alpha) * (1.0 - alpha) / (1.0 - beta)).sqrt();
    let adaptation = 0.5 * d_hat + complexity_term(ComplexityKind::C, m_prime, d, inp.delta)? + inp.lambda;
    BoundReport::build(
        TheoremId::Thm2,
        vec![
            ("target_opt_risk", target_opt.objective),
            ("alpha_beta_term", 2.0 * shape * complexity_term(ComplexityKind::B, m, d, inp.delta)?),
            ("adaptation_term", 2.0 * (1.0 - alpha) * adaptation),
        ],
        Some(expected_risk(inp.target, &h_hat.hypothesis, None)?),
        vec![
            ("m", json!(m)),
            ("m_prime", json!(m_prime)),
            ("d", json!(d)),
            ("delta", json!(inp.delta)),
            ("alpha", json!(alpha)),
            ("beta", json!(beta)),
            ("target_count", json!(n_t)),
            ("source_count", json!(n_s)),
            ("h_hat_index", json!(h_hat.index)),
        ],
    )
}

pub struct Theorem3Inputs<'a> {
    pub class: &'a HypothesisClass,
    /// Labeled sample from each source; `β_j = m_j / m`.
    pub sources: &'a [LabeledSample],
    pub alpha: &'a [f64],
    pub delta: f64,
    /// The α-mixture of the source marginals.
    pub mixture: &'a DiscreteDomain,
    pub target: &'a DiscreteDomain,
    pub lambda_alpha: f64,
}

/// `ĥ = argmin Σ_j α_j ε̂_j(h)`.
pub fn multi_source_spec<'a>(sources: &'a [LabeledSample], alpha: &[f64]) -> Result<WeightedRiskSpec<'a>> {
    sources
        .iter()
        .zip(alpha)
        .try_fold(WeightedRiskSpec::new(), |acc, (s, &a)| acc.empirical(a, s))
}

fn source_fractions(sizes: &[usize]) -> Result<(usize, Vec<f64>)> {
    let m: usize = sizes.iter().sum();
    if sizes.iter().any(|&s| s == 0) {
        return Err(invalid("beta", "every source needs at least one labeled point"));
    }
    Ok((m, sizes.iter().map(|&s| s as f64 / m as f64).collect()))
}

pub fn thm3_rhs(inp: &Theorem3Inputs<'_>) -> Result<BoundReport> {
    check_delta(inp.delta)?;
    if inp.sources.len() != inp.alpha.len() {
        return Err(Error::InvalidWeights("one weight per source required".into()));
    }
    check_simplex(inp.alpha)?;
    let sizes: Vec<usize> = inp.sources.iter().map(LabeledSample::len).collect();
    let (m, beta) = source_fractions(&sizes)?;
    let d = inp.class.vc_dim();
    let h_hat = erm(&multi_source_spec(inp.sources, inp.alpha)?, inp.class)?;
    let target_opt = ideal_risk(&[(1.0, inp.target)], inp.class)?;
    let div = hdh_divergence(inp.class, &inp.mixture.into(), &inp.target.into())?;
    let shape: f64 = inp.alpha.iter().zip(&beta).map(|(a, b)| a * a / b).sum::<f64>().sqrt();
    BoundReport::build(
        TheoremId::Thm3,
        vec![
            ("target_opt_risk", target_opt.objective),
            ("concentration", 2.0 * shape * complexity_term(ComplexityKind::B, m, d, inp.delta)?),
            ("divergence_plus_lambda", 2.0 * (0.5 * div + inp.lambda_alpha)),
        ],
        Some(expected_risk(inp.target, &h_hat.hypothesis, None)?),
        vec![
            ("m", json!(m)),
            ("d", json!(d)),
            ("delta", json!(inp.delta)),
            ("k", json!(inp.sources.len())),
            ("alpha", json!(inp.alpha)),
            ("beta", json!(beta)),
            ("h_hat_index", json!(h_hat.index)),
        ],
    )
}

/// Exact minimizer of `L_D(h, f_D)` under `loss`.
fn loss_minimizer(class: &HypothesisClass, loss: LossSpec, domain: &DiscreteDomain) -> (usize, f64) {
    let f = domain.label_fn().outputs();
    let mut best = (0, f64::INFINITY);
    for (i, h) in class.members().iter().enumerate() {
        let v = pair_mass(domain.probs(), h.outputs(), f, loss);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Deterministic discrepancy bound. Requires a loss that is a metric.
pub fn thm4_rhs(
    class: &HypothesisClass,
    loss: LossSpec,
    h: &Hypothesis,
    source: &DiscreteDomain,
    target: &DiscreteDomain,
) -> Result<BoundReport> {
    if !loss.is_metric() {
        return Err(invalid(
            "loss",
            "bound needs a symmetric loss obeying the triangle inequality; squared loss does not",
        ));
    }
    ensure_same_ground(source.ground(), target.ground())?;
    let index = ensure_member(class, h)?;
    let (s_opt, _) = loss_minimizer(class, loss, source);
    let (t_opt, target_opt) = loss_minimizer(class, loss, target);
    let hs = class.member(s_opt).outputs();
    let ht = class.member(t_opt).outputs();
    BoundReport::build(
        TheoremId::Thm4,
        vec![
            ("target_opt", target_opt),
            ("source_dist_to_sopt", pair_mass(source.probs(), h.outputs(), hs, loss)),
            ("discrepancy", discrepancy(class, loss, &source.into(), &target.into())?),
            ("opt_gap", pair_mass(source.probs(), hs, ht, loss)),
        ],
        Some(pair_mass(target.probs(), h.outputs(), target.label_fn().outputs(), loss)),
        vec![
            ("loss", json!(loss.kind)),
            ("h_index", json!(index)),
            ("source_opt_index", json!(s_opt)),
            ("target_opt_index", json!(t_opt)),
        ],
    )
}

pub struct Theorem5Inputs<'a> {
    pub class: &'a HypothesisClass,
    pub h: &'a Hypothesis,
    /// Sample 𝒮 of size m from the source marginal.
    pub source_sample: &'a UnlabeledSample,
    /// Sample 𝒯 of size n from the target marginal.
    pub target_sample: &'a UnlabeledSample,
    /// Exact domains, used for the minimizers h*_S, h*_T and the realized gap.
    pub source: &'a DiscreteDomain,
    pub target: &'a DiscreteDomain,
    pub delta: f64,
    pub rademacher_mode: RademacherMode,
}

/// Rademacher-complexity bound on the excess target risk under 0-1 loss.
/// `lhs_realized` is `L_T(h, f_T) - L_T(h*_T, f_T)`.
pub fn thm5_rhs(inp: &Theorem5Inputs<'_>) -> Result<BoundReport> {
    check_delta(inp.delta)?;
    let class = inp.class;
    class.ensure_binary()?;
    let index = ensure_member(class, inp.h)?;
    let loss = LossSpec::ZERO_ONE;
    let (m, n) = (inp.source_sample.len(), inp.target_sample.len());
    if m == 0 || n == 0 {
        return Err(Error::Empty("sample"));
    }
    let s_hat = Measure::from_sample(inp.source_sample)?;
    let t_hat = Measure::from_sample(inp.target_sample)?;
    let (s_opt, _) = loss_minimizer(class, loss, inp.source);
    let (t_opt, target_opt) = loss_minimizer(class, loss, inp.target);
    let hs = class.member(s_opt).outputs();
    let ht = class.member(t_opt).outputs();
    let target_mode = match inp.rademacher_mode {
        RademacherMode::Exact => RademacherMode::Exact,
        RademacherMode::MonteCarlo { draws, seed } => RademacherMode::MonteCarlo {
            draws,
            seed: derive_seed(seed, 1),
        },
    };
    let rad_s = rademacher(class, inp.source_sample, inp.rademacher_mode)?;
    let rad_t = rademacher(class, inp.target_sample, target_mode)?;
    let log_term = (8.0 / inp.delta).ln();
    let lhs = pair_mass(inp.target.probs(), inp.h.outputs(), inp.target.label_fn().outputs(), loss) - target_opt;
    BoundReport::build(
        TheoremId::Thm5,
        vec![
            ("emp_source_dist_to_sopt", pair_mass(s_hat.probs(), inp.h.outputs(), hs, loss)),
            ("emp_discrepancy", discrepancy(class, loss, &s_hat, &t_hat)?),
            ("source_rademacher", 4.5 * rad_s.value),
            ("target_rademacher", 4.0 * rad_t.value),
            ("source_confidence", 4.0 * (log_term / (2.0 * m as f64)).sqrt()),
            ("target_confidence", 3.0 * (log_term / (2.0 * n as f64)).sqrt()),
            ("opt_gap", pair_mass(inp.source.probs(), hs, ht, loss)),
        ],
        Some(lhs),
        vec![
            ("m", json!(m)),
            ("n", json!(n)),
            ("delta", json!(inp.delta)),
            ("h_index", json!(index)),
            ("rademacher_mode", json!(inp.rademacher_mode)),
            ("source_rademacher_stderr", json!(rad_s.std_error)),
            ("target_rademacher_stderr", json!(rad_t.std_error)),
        ],
    )
}

pub struct Theorem7Inputs<'a> {
    pub class: &'a HypothesisClass,
    /// Labeled sample from each source (sizes `n_i`, `m = Σ n_i`).
    pub labeled: &'a [LabeledSample],
    /// Unlabeled sample from each source, all of size m′.
    pub unlabeled: &'a [UnlabeledSample],
    /// Shared unlabeled target sample of size m′.
    pub target_unlabeled: &'a UnlabeledSample,
    pub alpha: &'a [f64],
    pub mu: f64,
    pub delta: f64,
    /// `ĥ_i`, typically the ERM on source `i`.
    pub per_source: &'a [ErmResult],
    pub lambda_alpha_mu: f64,
    /// When present, `lhs_realized = ε_T(Σ α_i ĥ_i)` exactly.
    pub target: Option<&'a DiscreteDomain>,
}

/// Multi-source bound in which each `ĥ_i` is scored both on its own source
/// (weight μ) and on its peers (weight `(1-μ)/(K-1)` each).
pub fn thm7_rhs(inp: &Theorem7Inputs<'_>) -> Result<BoundReport> {
    check_delta(inp.delta)?;
    let k = inp.labeled.len();
    if k < 2 {
        return Err(invalid("k", "needs at least two sources"));
    }
    if inp.unlabeled.len() != k || inp.per_source.len() != k || inp.alpha.len() != k {
        return Err(invalid("sources", "labeled, unlabeled, hypotheses and alpha must all have length K"));
    }
    if !(inp.mu > 0.0 && inp.mu < 1.0) {
        return Err(invalid("mu", format!("{} not in (0,1)", inp.mu)));
    }
    check_simplex(inp.alpha)?;
    let m_prime = inp.target_unlabeled.len();
    if inp.unlabeled.iter().any(|u| u.len() != m_prime) {
        return Err(invalid("unlabeled samples", "all unlabeled samples must have size m′"));
    }
    let sizes: Vec<usize> = inp.labeled.iter().map(LabeledSample::len).collect();
    let (m, beta) = source_fractions(&sizes)?;
    let d = inp.class.vc_dim();
    let mu = inp.mu;
    let peer = (1.0 - mu) / (k - 1) as f64;

    let target_measure = Measure::from_sample(inp.target_unlabeled)?;
    let half_div = inp
        .unlabeled
        .iter()
        .map(|u| Ok(0.5 * hdh_divergence(inp.class, &Measure::from_sample(u)?, &target_measure)?))
        .collect::<Result<Vec<f64>>>()?;
    // emp[j][i] = ε̂_{S_j}(ĥ_i)
    let emp = inp
        .labeled
        .iter()
        .map(|s| inp.per_source.iter().map(|r| empirical_risk(s, &r.hypothesis)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let mut self_block = 0.0;
    let mut peer_block = 0.0;
    let mut shape = 0.0;
    for i in 0..k {
        let a = inp.alpha[i];
        self_block += a * mu * (emp[i][i] + half_div[i]);
        let peers: f64 = (0..k).filter(|&j| j != i).map(|j| emp[j][i] + half_div[j]).sum();
        peer_block += a * peer * peers;
        let inv_beta: f64 = (0..k).filter(|&j| j != i).map(|j| 1.0 / beta[j]).sum();
        shape += a * (mu * mu / beta[i] + peer * peer * inv_beta).sqrt();
    }
    let lhs = match inp.target {
        Some(t) => {
            let ensemble = crate::erm::multisource_ensemble(inp.per_source, inp.alpha)?;
            Some(expected_risk(t, &ensemble, None)?)
        }
        None => None,
    };
    BoundReport::build(
        TheoremId::Thm7,
        vec![
            ("self_risk_block", self_block),
            ("peer_risk_block", peer_block),
            ("concentration_block", shape * complexity_term(ComplexityKind::B, m, d, inp.delta)?),
            ("unlabeled_term", complexity_term(ComplexityKind::C, m_prime, d, inp.delta)?),
            ("lambda_alpha_mu", inp.lambda_alpha_mu),
        ],
        lhs,
        vec![
            ("m", json!(m)),
            ("m_prime", json!(m_prime)),
            ("d", json!(d)),
            ("delta", json!(inp.delta)),
            ("k", json!(k)),
            ("mu", json!(mu)),
            ("alpha", json!(inp.alpha)),
            ("beta", json!(beta)),
            ("per_source_indices", json!(inp.per_source.iter().map(|r| r.index).collect::<Vec<_>>())),
            ("target_unlabeled", json!("shared")),
        ],
    )
}
