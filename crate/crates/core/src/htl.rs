//! Hypothesis transfer by regularized least squares on source residuals.
//!
//! Given a source predictor `f′`, the target predictor is
//! `f(x) = T_C(xᵀŵ) + f′(x)` where `ŵ` minimizes
//! `(1/m) Σ (uᵀx_i - y_i + f′(x_i))² + λ‖u‖²` and `T_C` clamps to `[-C, C]`.

use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::normalize_probs;
use crate::error::{invalid, Error, Result};
use crate::linalg::{normal_equations, Ldlt};
use crate::rng::{derive_seed, rng_from_seed};

/// Relative slack when checking declared bounds (`|y| ≤ B`, `|f′| ≤ ‖f′‖∞`).
const BOUND_SLACK: f64 = 1e-12;

/// Regression sample with labels bounded by `label_bound` in absolute value.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    label_bound: f64,
}

impl RegressionSample {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>, label_bound: f64) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Empty("regression sample"));
        }
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        let dim = xs[0].len();
        if dim == 0 {
            return Err(invalid("xs", "feature dimension must be at least 1"));
        }
        if let Some(x) = xs.iter().find(|x| x.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if !(label_bound >= 0.0) {
            return Err(invalid("label_bound", "must be non-negative"));
        }
        if let Some(y) = ys.iter().find(|y| !y.is_finite() || y.abs() > label_bound * (1.0 + BOUND_SLACK)) {
            return Err(invalid("ys", format!("label {y} exceeds bound {label_bound}")));
        }
        Ok(RegressionSample { xs, ys, label_bound })
    }

    pub fn xs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn label_bound(&self) -> f64 {
        self.label_bound
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.xs[0].len()
    }

    /// The sample with entry `i` removed.
    pub fn without(&self, i: usize) -> RegressionSample {
        let mut xs = self.xs.clone();
        let mut ys = self.ys.clone();
        xs.remove(i);
        ys.remove(i);
        RegressionSample {
            xs,
            ys,
            label_bound: self.label_bound,
        }
    }

    /// The sample reordered by `order` (a permutation of `0..len`).
    pub fn permuted(&self, order: &[usize]) -> RegressionSample {
        RegressionSample {
            xs: order.iter().map(|&i| self.xs[i].clone()).collect(),
            ys: order.iter().map(|&i| self.ys[i]).collect(),
            label_bound: self.label_bound,
        }
    }
}

/// Anything that maps a feature vector to a real prediction.
pub trait Predictor {
    fn predict(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Predictor for F {
    fn predict(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// A trained source hypothesis `f′` with its declared sup-norm.
#[derive(Clone)]
pub struct SourcePredictor {
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    sup_norm: f64,
}

impl fmt::Debug for SourcePredictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourcePredictor")
            .field("sup_norm", &self.sup_norm)
            .finish_non_exhaustive()
    }
}

impl SourcePredictor {
    pub fn new(eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, sup_norm: f64) -> Self {
        SourcePredictor {
            eval: Arc::new(eval),
            sup_norm,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, 0.0)
    }

    /// `x ↦ wᵀx + b`, clipped to `[-sup_norm, sup_norm]`.
    pub fn linear(weights: Vec<f64>, bias: f64, sup_norm: f64) -> Self {
        Self::new(
            move |x| {
                let v: f64 = weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + bias;
                v.clamp(-sup_norm, sup_norm)
            },
            sup_norm,
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Evaluates and checks `|f′(x)| ≤ ‖f′‖∞`.
    fn checked(&self, x: &[f64]) -> Result<f64> {
        let v = self.eval(x);
        if !v.is_finite() || v.abs() > self.sup_norm * (1.0 + BOUND_SLACK) + BOUND_SLACK {
            return Err(invalid(
                "source",
                format!("f′(x) = {v} exceeds declared sup-norm {}", self.sup_norm),
            ));
        }
        Ok(v)
    }
}

impl Predictor for SourcePredictor {
    fn predict(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

/// `T_C(y) = min(max(y, -C), C)`; `C = ∞` is the identity.
pub fn truncate(y: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(invalid("C", format!("truncation level {c} must be positive")));
    }
    Ok(y.clamp(-c, c))
}

/// Output of [`train_htl`].
#[derive(Debug, Clone)]
pub struct HtlModel {
    pub w: Vec<f64>,
    /// Truncation level, possibly `f64::INFINITY`.
    pub c: f64,
    pub source: SourcePredictor,
    pub lambda_reg: f64,
}

impl Predictor for HtlModel {
    fn predict(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.w.iter().zip(x).map(|(w, x)| w * x).sum();
        lin.clamp(-self.c, self.c) + self.source.eval(x)
    }
}

/// `T_C(xᵀw) + f′(x)`.
pub fn htl_predict(model: &HtlModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.w.len() {
        return Err(Error::DimensionMismatch {
            expected: model.w.len(),
            got: x.len(),
        });
    }
    Ok(model.predict(x))
}

fn residuals(sample: &RegressionSample, source: &SourcePredictor) -> Result<Vec<f64>> {
    sample
        .xs
        .iter()
        .zip(&sample.ys)
        .map(|(x, y)| source.checked(x).map(|f| y - f))
        .collect()
}

fn check_lambda(lambda_reg: f64) -> Result<()> {
    if lambda_reg > 0.0 && lambda_reg.is_finite() {
        Ok(())
    } else {
        Err(invalid("lambda_reg", format!("{lambda_reg} must be positive and finite")))
    }
}

/// Solves `(XᵀX + penalty·I) w = Xᵀr`, returning the factorization too.
fn ridge_solve(xs: &[Vec<f64>], r: &[f64], penalty: f64) -> Result<(Vec<f64>, Ldlt)> {
    let (gram, rhs) = normal_equations(xs, r, penalty);
    let factor = Ldlt::factor(&gram, rhs.len())?;
    Ok((factor.solve(&rhs), factor))
}

/// Fits the residual correction `ŵ` exactly.
pub fn train_htl(
    sample: &RegressionSample,
    source: &SourcePredictor,
    lambda_reg: f64,
    c: f64,
) -> Result<HtlModel> {
    check_lambda(lambda_reg)?;
    truncate(0.0, c)?;
    let r = residuals(sample, source)?;
    // (XᵀX/m + λI) w = Xᵀr/m  ⇔  (XᵀX + mλI) w = Xᵀr
    let (w, _) = ridge_solve(&sample.xs, &r, sample.len() as f64 * lambda_reg)?;
    Ok(HtlModel {
        w,
        c,
        source: source.clone(),
        lambda_reg,
    })
}

/// `(1/m) Σ (uᵀx_i - y_i + f′(x_i))² + λ‖u‖²`.
pub fn htl_objective(sample: &RegressionSample, source: &SourcePredictor, lambda_reg: f64, u: &[f64]) -> Result<f64> {
    let r = residuals(sample, source)?;
    let m = sample.len() as f64;
    let fit: f64 = sample
        .xs
        .iter()
        .zip(&r)
        .map(|(x, ri)| {
            let e = dot(u, x) - ri;
            e * e
        })
        .sum();
    Ok(fit / m + lambda_reg * dot(u, u))
}

/// Analytic gradient `(2/m) Xᵀ(Xu - r) + 2λu` of [`htl_objective`].
pub fn htl_gradient(sample: &RegressionSample, source: &SourcePredictor, lambda_reg: f64, u: &[f64]) -> Result<Vec<f64>> {
    let r = residuals(sample, source)?;
    let m = sample.len() as f64;
    let mut g: Vec<f64> = u.iter().map(|v| 2.0 * lambda_reg * v).collect();
    for (x, ri) in sample.xs.iter().zip(&r) {
        let e = dot(u, x) - ri;
        for (gj, xj) in g.iter_mut().zip(x) {
            *gj += 2.0 * e * xj / m;
        }
    }
    Ok(g)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Leave-one-out squared loss `(1/m) Σ (f_{S∖i}(x_i) - y_i)²`, retraining `m` times.
pub fn loo_risk<F, P>(sample: &RegressionSample, trainer: F) -> Result<f64>
where
    F: Fn(&RegressionSample) -> Result<P>,
    P: Predictor,
{
    let m = sample.len();
    if m < 2 {
        return Err(invalid("m", "leave-one-out needs at least two points"));
    }
    let mut total = 0.0;
    for i in 0..m {
        let model = trainer(&sample.without(i))?;
        let e = model.predict(&sample.xs[i]) - sample.ys[i];
        total += e * e;
    }
    Ok(total / m as f64)
}

/// Leave-one-out risk of [`train_htl`] from a single factorization.
///
/// Each held-out fit uses `m - 1` points and hence the penalty `(m-1)λ`;
/// with `A = XᵀX + (m-1)λI`, `w̃ = A⁻¹Xᵀr` and `h_i = x_iᵀA⁻¹x_i` the held-out
/// linear prediction is `(x_iᵀw̃ - h_i r_i) / (1 - h_i)`.
pub fn htl_loo_closed_form(
    sample: &RegressionSample,
    source: &SourcePredictor,
    lambda_reg: f64,
    c: f64,
) -> Result<f64> {
    check_lambda(lambda_reg)?;
    truncate(0.0, c)?;
    let m = sample.len();
    if m < 2 {
        return Err(invalid("m", "leave-one-out needs at least two points"));
    }
    let r = residuals(sample, source)?;
    let (w, factor) = ridge_solve(&sample.xs, &r, (m - 1) as f64 * lambda_reg)?;
    let mut total = 0.0;
    for i in 0..m {
        let xi = &sample.xs[i];
        let leverage = dot(xi, &factor.solve(xi));
        let lin = (dot(xi, &w) - leverage * r[i]) / (1.0 - leverage);
        let source_value = sample.ys[i] - r[i];
        let e = lin.clamp(-c, c) + source_value - sample.ys[i];
        total += e * e;
    }
    Ok(total / m as f64)
}

/// Finite-support regression domain with deterministic targets `y(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDomain {
    pub xs: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Declared label bound `B`.
    pub label_bound: f64,
}

impl RegressionDomain {
    pub fn new(xs: Vec<Vec<f64>>, probs: Vec<f64>, ys: Vec<f64>, label_bound: f64) -> Result<Self> {
        if probs.len() != xs.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: probs.len(),
            });
        }
        // validates shapes and label bound
        RegressionSample::new(xs.clone(), ys.clone(), label_bound)?;
        let probs = normalize_probs(probs)?;
        Ok(RegressionDomain {
            xs,
            probs,
            ys,
            label_bound,
        })
    }

    /// Exact squared risk `Σ_x p(x) (f(x) - y(x))²`.
    pub fn risk(&self, f: &impl Predictor) -> f64 {
        self.xs
            .iter()
            .zip(self.probs.iter().zip(&self.ys))
            .map(|(x, (p, y))| {
                let e = f.predict(x) - y;
                p * e * e
            })
            .sum()
    }

    pub fn sample(&self, m: usize, seed: u64) -> Result<RegressionSample> {
        if m == 0 {
            return Err(invalid("m", "sample size must be at least 1"));
        }
        let dist = WeightedIndex::new(&self.probs).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        let mut rng = rng_from_seed(seed);
        let idx: Vec<usize> = (0..m).map(|_| dist.sample(&mut rng)).collect();
        RegressionSample::new(
            idx.iter().map(|&i| self.xs[i].clone()).collect(),
            idx.iter().map(|&i| self.ys[i]).collect(),
            self.label_bound,
        )
    }
}

#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub target: RegressionDomain,
    pub source: SourcePredictor,
    pub m: usize,
    pub lambda_reg: f64,
    /// Truncation level; `f64::INFINITY` selects the untruncated regime.
    pub c: f64,
}

/// One row of a stability experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityEstimate {
    pub m: usize,
    pub lambda_reg: f64,
    /// `null` in JSON when infinite.
    #[serde(with = "infinite_as_null")]
    pub c: f64,
    pub trials: usize,
    pub mean_sq_gap: f64,
    pub stderr: f64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

pub const MIN_STABILITY_TRIALS: usize = 30;

/// Monte Carlo estimate of `E[(L_T(f) - L̂_loo(f))²]` for the HTL learner.
///
/// Trials are independent given their derived seeds; the reduction runs in
/// trial order so the result does not depend on the worker count.
pub fn estimate_stability_gap(config: &StabilityConfig, trials: usize, seed: u64) -> Result<StabilityEstimate> {
    if trials < MIN_STABILITY_TRIALS {
        return Err(invalid("trials", format!("need at least {MIN_STABILITY_TRIALS}")));
    }
    if config.m < 2 {
        return Err(invalid("m", "leave-one-out needs at least two points"));
    }
    check_lambda(config.lambda_reg)?;
    truncate(0.0, config.c)?;
    let mut warnings = Vec::new();
    let b = config.target.label_bound;
    if config.c.is_finite() && config.c < b + config.source.sup_norm() {
        warnings.push(format!(
            "C = {} is below B + ‖f′‖∞ = {}; the truncated-regime guarantee does not apply",
            config.c,
            b + config.source.sup_norm()
        ));
    }
    if config.lambda_reg < 1.0 / config.m as f64 {
        warnings.push(format!("lambda_reg = {} is below 1/m", config.lambda_reg));
    }

    let gaps = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sample = config.target.sample(config.m, derive_seed(seed, t as u64))?;
            let model = train_htl(&sample, &config.source, config.lambda_reg, config.c)?;
            let loo = htl_loo_closed_form(&sample, &config.source, config.lambda_reg, config.c)?;
            let gap = config.target.risk(&model) - loo;
            Ok(gap * gap)
        })
        .collect::<Result<Vec<f64>>>()?;

    let n = trials as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (n - 1.0);
    Ok(StabilityEstimate {
        m: config.m,
        lambda_reg: config.lambda_reg,
        c: config.c,
        trials,
        mean_sq_gap: mean,
        stderr: (var / n).sqrt(),
        seed,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation() {
        assert_eq!(truncate(5.0, 2.0).unwrap(), 2.0);
        assert_eq!(truncate(-5.0, 2.0).unwrap(), -2.0);
        assert_eq!(truncate(123.456, f64::INFINITY).unwrap(), 123.456);
        assert!(truncate(1.0, 0.0).is_err());
        assert!(truncate(1.0, -1.0).is_err());
    }

    #[test]
    fn scalar_normal_equation() {
        let s = RegressionSample::new(vec![vec![1.0]], vec![1.0], 1.0).unwrap();
        let model = train_htl(&s, &SourcePredictor::zero(), 1.0, f64::INFINITY).unwrap();
        assert_eq!(model.w, vec![0.5]);
    }

    #[test]
    fn perfect_source_gives_zero_weights() {
        let xs = vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![0.3, 0.3]];
        let src = SourcePredictor::linear(vec![0.2, -0.1], 0.05, 10.0);
        let ys: Vec<f64> = xs.iter().map(|x| src.eval(x)).collect();
        let s = RegressionSample::new(xs, ys, 10.0).unwrap();
        let model = train_htl(&s, &src, 0.1, 1.0).unwrap();
        assert!(model.w.iter().all(|w| w.abs() < 1e-15));
    }

    #[test]
    fn heavy_regularization_recovers_source() {
        let xs = vec![vec![1.0], vec![2.0], vec![3.0]];
        let s = RegressionSample::new(xs, vec![1.0, 2.0, 3.0], 3.0).unwrap();
        let src = SourcePredictor::new(|x| 0.5 * x[0], 1.5);
        let model = train_htl(&s, &src, 1e12, f64::INFINITY).unwrap();
        let p = htl_predict(&model, &[2.0]).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn input_validation() {
        assert!(RegressionSample::new(vec![], vec![], 1.0).is_err());
        assert!(RegressionSample::new(vec![vec![1.0]], vec![2.0], 1.0).is_err());
        let s = RegressionSample::new(vec![vec![1.0]], vec![1.0], 1.0).unwrap();
        assert!(train_htl(&s, &SourcePredictor::zero(), 0.0, 1.0).is_err());
        assert!(train_htl(&s, &SourcePredictor::zero(), 1.0, 0.0).is_err());
        let liar = SourcePredictor::new(|_| 5.0, 1.0);
        assert!(train_htl(&s, &liar, 1.0, 1.0).is_err());
        let model = train_htl(&s, &SourcePredictor::zero(), 1.0, 1.0).unwrap();
        assert!(htl_predict(&model, &[1.0, 2.0]).is_err());
        assert!(loo_risk(&s, |_: &RegressionSample| Ok(|_: &[f64]| 0.0)).is_err());
    }

    #[test]
    fn loo_of_constant_zero_trainer() {
        let s = RegressionSample::new(vec![vec![1.0], vec![2.0]], vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(loo_risk(&s, |_: &RegressionSample| Ok(|_: &[f64]| 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn loo_two_symmetric_points_by_hand() {
        // Leaving out either point leaves a single point (x = ±1, y = ±1) with
        // m = 1: w = x y / (x² + λ) = 1/2 for λ = 1. Held-out prediction is
        // ±0.5 against ±1, squared error 0.25 each.
        let s = RegressionSample::new(vec![vec![1.0], vec![-1.0]], vec![1.0, -1.0], 1.0).unwrap();
        let src = SourcePredictor::zero();
        let naive = loo_risk(&s, |sub: &RegressionSample| train_htl(sub, &src, 1.0, f64::INFINITY)).unwrap();
        assert_eq!(naive, 0.25);
        let fast = htl_loo_closed_form(&s, &src, 1.0, f64::INFINITY).unwrap();
        assert!((fast - 0.25).abs() < 1e-15);
    }

    #[test]
    fn stability_needs_enough_trials() {
        let d = RegressionDomain::new(vec![vec![1.0]], vec![1.0], vec![0.5], 1.0).unwrap();
        let cfg = StabilityConfig {
            target: d,
            source: SourcePredictor::zero(),
            m: 5,
            lambda_reg: 0.2,
            c: f64::INFINITY,
        };
        assert!(estimate_stability_gap(&cfg, 10, 0).is_err());
        let est = estimate_stability_gap(&cfg, 30, 0).unwrap();
        assert!(est.mean_sq_gap.is_finite());
    }
}
