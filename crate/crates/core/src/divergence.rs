//! Distribution distances induced by a hypothesis class, and empirical
//! Rademacher complexity.
//!
//! All suprema are taken by exhaustive enumeration of member pairs in
//! canonical order (`i < j` over member indices), so results do not depend on
//! how work is partitioned.

use std::sync::Arc;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::domains::{expected_risk, DiscreteDomain, LabeledSample, UnlabeledSample};
use crate::error::{invalid, Error, Result};
use crate::hypothesis::{ensure_same_ground, GroundSet, HypothesisClass};
use crate::rng::rng_from_seed;

/// A distribution over a ground set: either a domain's exact marginal or a
/// sample's empirical marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    ground: Arc<GroundSet>,
    probs: Vec<f64>,
}

impl Measure {
    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn from_sample(sample: &UnlabeledSample) -> Result<Self> {
        Ok(Measure {
            ground: sample.ground().clone(),
            probs: sample.empirical_probs()?,
        })
    }
}

impl From<&DiscreteDomain> for Measure {
    fn from(d: &DiscreteDomain) -> Self {
        Measure {
            ground: d.ground().clone(),
            probs: d.probs().to_vec(),
        }
    }
}

impl TryFrom<&UnlabeledSample> for Measure {
    type Error = Error;
    fn try_from(s: &UnlabeledSample) -> Result<Self> {
        Measure::from_sample(s)
    }
}

impl TryFrom<&LabeledSample> for Measure {
    type Error = Error;
    fn try_from(s: &LabeledSample) -> Result<Self> {
        Measure::from_sample(&s.marginal())
    }
}

/// Pointwise loss used by the discrepancy distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `|a - b|`; the 0-1 loss on binary outputs.
    ZeroOneAbs,
    /// `(a - b)^2`.
    Squared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Upper bound on the loss over `[0,1]` outputs.
    pub bound: f64,
}

impl LossSpec {
    pub const ZERO_ONE: LossSpec = LossSpec {
        kind: LossKind::ZeroOneAbs,
        bound: 1.0,
    };
    pub const SQUARED: LossSpec = LossSpec {
        kind: LossKind::Squared,
        bound: 1.0,
    };

    #[inline]
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            LossKind::ZeroOneAbs => (a - b).abs(),
            LossKind::Squared => (a - b) * (a - b),
        }
    }

    /// Whether the loss is a metric on `[0,1]` (symmetric, triangle inequality).
    pub fn is_metric(&self) -> bool {
        matches!(self.kind, LossKind::ZeroOneAbs)
    }
}

/// `Σ_x P(x) · loss(h(x), g(x))`, summed in ground order.
#[inline]
pub(crate) fn pair_mass(probs: &[f64], h: &[f64], g: &[f64], loss: LossSpec) -> f64 {
    probs
        .iter()
        .zip(h.iter().zip(g))
        .map(|(p, (a, b))| p * loss.eval(*a, *b))
        .sum()
}

fn check_measures(class: &HypothesisClass, p: &Measure, q: &Measure) -> Result<()> {
    ensure_same_ground(class.ground(), &p.ground)?;
    ensure_same_ground(class.ground(), &q.ground)
}

/// Largest `|L_P(h,h') - L_Q(h,h')|` over member pairs, with the maximizing pair.
fn max_pair_gap(class: &HypothesisClass, p: &Measure, q: &Measure, loss: LossSpec) -> (f64, (usize, usize)) {
    let members = class.members();
    let mut best = 0.0f64;
    let mut arg = (0, 0);
    for i in 0..members.len() {
        let hi = members[i].outputs();
        for (j, hj) in members.iter().enumerate().skip(i + 1) {
            let hj = hj.outputs();
            let gap = (pair_mass(&p.probs, hi, hj, loss) - pair_mass(&q.probs, hi, hj, loss)).abs();
            if gap > best {
                best = gap;
                arg = (i, j);
            }
        }
    }
    (best, arg)
}

/// H∆H-divergence with the member pair whose disagreement region attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceDetail {
    pub value: f64,
    pub argmax_pair: (usize, usize),
}

/// `2 · sup_A |P(A) - Q(A)|` over disagreement regions `A = {h ≠ h'}` of member pairs.
pub fn hdh_divergence(class: &HypothesisClass, p: &Measure, q: &Measure) -> Result<f64> {
    hdh_divergence_detail(class, p, q).map(|d| d.value)
}

pub fn hdh_divergence_detail(class: &HypothesisClass, p: &Measure, q: &Measure) -> Result<DivergenceDetail> {
    class.ensure_binary()?;
    check_measures(class, p, q)?;
    let (gap, arg) = max_pair_gap(class, p, q, LossSpec::ZERO_ONE);
    Ok(DivergenceDetail {
        value: 2.0 * gap,
        argmax_pair: arg,
    })
}

/// Discrepancy distance: `max_{h,h'} |L_P(h,h') - L_Q(h,h')|`.
pub fn discrepancy(class: &HypothesisClass, loss: LossSpec, p: &Measure, q: &Measure) -> Result<f64> {
    check_measures(class, p, q)?;
    Ok(max_pair_gap(class, p, q, loss).0)
}

/// Outcome of checking `|ε_S(h,h') - ε_T(h,h')| ≤ ½ d(D_S, D_T)` over all member pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyInequalityReport {
    /// `max_{h,h'} |ε_S(h,h') - ε_T(h,h')| - ½ d`; non-positive when the inequality holds.
    pub max_violation: f64,
    pub max_lhs: f64,
    pub half_divergence: f64,
    pub argmax_pair: (usize, usize),
}

pub fn key_inequality_check(
    class: &HypothesisClass,
    source: &DiscreteDomain,
    target: &DiscreteDomain,
) -> Result<KeyInequalityReport> {
    let half = 0.5 * hdh_divergence(class, &source.into(), &target.into())?;
    let members = class.members();
    let mut max_lhs = 0.0f64;
    let mut arg = (0, 0);
    for i in 0..members.len() {
        for j in i..members.len() {
            let es = expected_risk(source, &members[i], Some(&members[j]))?;
            let et = expected_risk(target, &members[i], Some(&members[j]))?;
            let lhs = (es - et).abs();
            if lhs > max_lhs {
                max_lhs = lhs;
                arg = (i, j);
            }
        }
    }
    Ok(KeyInequalityReport {
        max_violation: max_lhs - half,
        max_lhs,
        half_divergence: half,
        argmax_pair: arg,
    })
}

/// Largest sample size accepted by exact Rademacher enumeration.
pub const EXACT_RADEMACHER_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RademacherMode {
    Exact,
    MonteCarlo { draws: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RademacherEstimate {
    pub value: f64,
    /// Standard error of the Monte Carlo mean; zero in exact mode.
    pub std_error: f64,
    /// Number of sign vectors evaluated.
    pub sign_vectors: u64,
}

/// Empirical Rademacher complexity `(2/m) E_σ sup_h |Σ_i σ_i h(x_i)|`.
pub fn rademacher(
    class: &HypothesisClass,
    sample: &UnlabeledSample,
    mode: RademacherMode,
) -> Result<RademacherEstimate> {
    ensure_same_ground(class.ground(), sample.ground())?;
    let xs = sample.indices();
    let m = xs.len();
    if m == 0 {
        return Err(Error::Empty("unlabeled sample"));
    }
    // Members restricted to the sample; identical restrictions contribute identically.
    let mut restricted: Vec<Vec<f64>> = Vec::with_capacity(class.len());
    for h in class.members() {
        let v: Vec<f64> = xs.iter().map(|&i| h.value(i)).collect();
        if !restricted.contains(&v) {
            restricted.push(v);
        }
    }
    let scale = 2.0 / m as f64;
    match mode {
        RademacherMode::Exact => {
            if m > EXACT_RADEMACHER_LIMIT {
                return Err(Error::TooLarge {
                    m,
                    limit: EXACT_RADEMACHER_LIMIT,
                });
            }
            let (total, count) = exact_sign_sum(&restricted, m);
            Ok(RademacherEstimate {
                value: scale * total / count as f64,
                std_error: 0.0,
                sign_vectors: count,
            })
        }
        RademacherMode::MonteCarlo { draws, seed } => {
            if draws == 0 {
                return Err(invalid("draws", "need at least one sign vector"));
            }
            let mut rng = rng_from_seed(seed);
            let mut sigma = vec![0.0f64; m];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..draws {
                for s in sigma.iter_mut() {
                    *s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
                let v = scale * sup_abs_correlation(&restricted, &sigma);
                sum += v;
                sum_sq += v * v;
            }
            let n = draws as f64;
            let mean = sum / n;
            let std_error = if draws > 1 {
                let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            Ok(RademacherEstimate {
                value: mean,
                std_error,
                sign_vectors: draws as u64,
            })
        }
    }
}

fn sup_abs_correlation(restricted: &[Vec<f64>], sigma: &[f64]) -> f64 {
    restricted
        .iter()
        .map(|v| v.iter().zip(sigma).map(|(a, s)| a * s).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

/// Sum over all `2^m` sign vectors of the sup term, walking them in Gray-code
/// order so each step updates every correlation with one flip.
fn exact_sign_sum(restricted: &[Vec<f64>], m: usize) -> (f64, u64) {
    let count = 1u64 << m;
    let mut sigma = vec![1.0f64; m];
    let mut corr: Vec<f64> = restricted.iter().map(|v| v.iter().sum()).collect();
    let mut total = corr.iter().map(|c| c.abs()).fold(0.0, f64::max);
    for step in 1..count {
        let k = step.trailing_zeros() as usize;
        let delta = -2.0 * sigma[k];
        sigma[k] = -sigma[k];
        let mut best = 0.0f64;
        for (c, v) in corr.iter_mut().zip(restricted) {
            *c += delta * v[k];
            best = best.max(c.abs());
        }
        total += best;
    }
    (total, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::{make_finite_class, make_threshold_class};

    fn point_mass(g: &Arc<GroundSet>, i: usize) -> Measure {
        let mut probs = vec![0.0; g.len()];
        probs[i] = 1.0;
        Measure {
            ground: g.clone(),
            probs,
        }
    }

    #[test]
    fn separated_point_masses_reach_two() {
        let g = GroundSet::from_scalars(&[0.1, 0.9]).unwrap();
        let class = make_threshold_class(g.clone()).unwrap();
        let (p, q) = (point_mass(&g, 0), point_mass(&g, 1));
        assert_eq!(hdh_divergence(&class, &p, &q).unwrap(), 2.0);
        assert_eq!(hdh_divergence(&class, &q, &p).unwrap(), 2.0);
        assert_eq!(hdh_divergence(&class, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn non_binary_class_rejected() {
        let g = GroundSet::from_scalars(&[0.0]).unwrap();
        let class = make_finite_class(g.clone(), vec![vec![0.5]], 1).unwrap();
        let p = point_mass(&g, 0);
        assert!(matches!(hdh_divergence(&class, &p, &p), Err(Error::NonBinary(_))));
        assert_eq!(discrepancy(&class, LossSpec::ZERO_ONE, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn rademacher_small_cases() {
        let g = GroundSet::from_scalars(&[0.0, 1.0]).unwrap();
        let zero = make_finite_class(g.clone(), vec![vec![0.0, 0.0]], 1).unwrap();
        let one = make_finite_class(g.clone(), vec![vec![1.0, 1.0]], 1).unwrap();
        let both = make_finite_class(g.clone(), vec![vec![0.0, 0.0], vec![1.0, 1.0]], 1).unwrap();
        let s1 = UnlabeledSample::from_indices(g.clone(), [0]).unwrap();
        let s2 = UnlabeledSample::from_indices(g.clone(), [0, 1]).unwrap();
        assert_eq!(rademacher(&zero, &s2, RademacherMode::Exact).unwrap().value, 0.0);
        assert_eq!(rademacher(&one, &s1, RademacherMode::Exact).unwrap().value, 2.0);
        assert_eq!(rademacher(&both, &s2, RademacherMode::Exact).unwrap().value, 1.0);
        let mc = rademacher(&one, &s1, RademacherMode::MonteCarlo { draws: 10, seed: 1 }).unwrap();
        assert_eq!(mc.value, 2.0);
        assert_eq!(mc.std_error, 0.0);
    }

    #[test]
    fn rademacher_guards() {
        let g = GroundSet::from_scalars(&[0.0]).unwrap();
        let class = make_finite_class(g.clone(), vec![vec![1.0]], 1).unwrap();
        let big = UnlabeledSample::from_counts(g.clone(), vec![21]).unwrap();
        assert_eq!(
            rademacher(&class, &big, RademacherMode::Exact),
            Err(Error::TooLarge { m: 21, limit: 20 })
        );
        assert!(rademacher(&class, &big, RademacherMode::MonteCarlo { draws: 0, seed: 0 }).is_err());
        let empty = UnlabeledSample::from_counts(g, vec![0]).unwrap();
        assert!(rademacher(&class, &empty, RademacherMode::Exact).is_err());
    }
}
