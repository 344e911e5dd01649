//! Hypotheses materialized as output vectors over a fixed, finite ground set.
//!
//! Every hypothesis (and every labeling function) is stored as the vector of
//! its values on the ground points, so suprema and minima over a class reduce
//! to finite enumeration.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Finite input space: distinct points in canonical lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSet {
    points: Vec<Vec<f64>>,
    dim: usize,
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

impl GroundSet {
    /// Builds a ground set, sorting the points lexicographically.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Arc<Self>> {
        Self::canonicalize(points).map(|(g, _)| g)
    }

    /// Like [`GroundSet::new`], also returning the permutation applied:
    /// `perm[k]` is the caller's index of the point now stored at position `k`.
    pub fn canonicalize(points: Vec<Vec<f64>>) -> Result<(Arc<Self>, Vec<usize>)> {
        if points.is_empty() {
            return Err(Error::Empty("ground set"));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(invalid("points", "dimension must be at least 1"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(invalid("points", "coordinates must be finite"));
            }
        }
        let mut perm: Vec<usize> = (0..points.len()).collect();
        perm.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]));
        for w in perm.windows(2) {
            if lex_cmp(&points[w[0]], &points[w[1]]) == Ordering::Equal {
                return Err(invalid("points", format!("duplicate point {:?}", points[w[0]])));
            }
        }
        let sorted = perm.iter().map(|&i| points[i].clone()).collect();
        Ok((Arc::new(GroundSet { points: sorted, dim }), perm))
    }

    /// Convenience constructor for one-dimensional ground sets.
    pub fn from_scalars(xs: &[f64]) -> Result<Arc<Self>> {
        Self::new(xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }
}

/// Pointer equality first, structural equality as fallback.
pub(crate) fn same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> Result<()> {
    if same_ground(a, b) {
        Ok(())
    } else {
        Err(Error::GroundMismatch)
    }
}

/// A `[0,1]`-valued function on a ground set. Also used for labeling functions.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    ground: Arc<GroundSet>,
    outputs: Vec<f64>,
    binary: bool,
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.outputs == other.outputs && same_ground(&self.ground, &other.ground)
    }
}

impl Hypothesis {
    pub fn new(ground: Arc<GroundSet>, outputs: Vec<f64>) -> Result<Self> {
        if outputs.len() != ground.len() {
            return Err(Error::DimensionMismatch {
                expected: ground.len(),
                got: outputs.len(),
            });
        }
        if let Some(v) = outputs.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid("outputs", format!("value {v} outside [0,1]")));
        }
        let binary = outputs.iter().all(|&v| v == 0.0 || v == 1.0);
        Ok(Hypothesis {
            ground,
            outputs,
            binary,
        })
    }

    /// Constant hypothesis.
    pub fn constant(ground: Arc<GroundSet>, value: f64) -> Result<Self> {
        let n = ground.len();
        Self::new(ground, vec![value; n])
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn value(&self, i: usize) -> f64 {
        self.outputs[i]
    }

    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

/// Per-point absolute loss `|h(x) - f(x)|`.
pub fn zero_one_risk_terms(h: &Hypothesis, f: &Hypothesis) -> Result<Vec<f64>> {
    ensure_same_ground(&h.ground, &f.ground)?;
    Ok(h.outputs
        .iter()
        .zip(&f.outputs)
        .map(|(a, b)| (a - b).abs())
        .collect())
}

/// Pointwise XOR of two binary hypotheses: the disagreement indicator.
pub fn sym_diff(h: &Hypothesis, h2: &Hypothesis) -> Result<Hypothesis> {
    ensure_same_ground(&h.ground, &h2.ground)?;
    if !h.binary || !h2.binary {
        return Err(Error::NonBinary("XOR is only defined for {0,1}-valued hypotheses"));
    }
    let outputs = h
        .outputs
        .iter()
        .zip(&h2.outputs)
        .map(|(a, b)| if a != b { 1.0 } else { 0.0 })
        .collect();
    Ok(Hypothesis {
        ground: h.ground.clone(),
        outputs,
        binary: true,
    })
}

/// Finite hypothesis class with a declared VC dimension.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    ground: Arc<GroundSet>,
    members: Vec<Hypothesis>,
    vc_dim: usize,
}

impl HypothesisClass {
    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn vc_dim(&self) -> usize {
        self.vc_dim
    }

    pub fn is_binary(&self) -> bool {
        self.members.iter().all(Hypothesis::is_binary)
    }

    pub(crate) fn ensure_binary(&self) -> Result<()> {
        if self.is_binary() {
            Ok(())
        } else {
            Err(Error::NonBinary("class contains a non-binary member"))
        }
    }

    /// Index of the member whose outputs equal `h`'s, if any.
    pub fn index_of(&self, h: &Hypothesis) -> Option<usize> {
        if !same_ground(&self.ground, &h.ground) {
            return None;
        }
        self.members.iter().position(|m| m.outputs == h.outputs)
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.index_of(h).is_some()
    }

    fn from_vectors(ground: Arc<GroundSet>, vectors: Vec<Vec<f64>>, vc_dim: usize) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Empty("hypothesis class"));
        }
        if vc_dim == 0 {
            return Err(invalid("vc_dim", "must be at least 1"));
        }
        let mut members: Vec<Hypothesis> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let h = Hypothesis::new(ground.clone(), v)?;
            if !members.iter().any(|m| m.outputs == h.outputs) {
                members.push(h);
            }
        }
        Ok(HypothesisClass {
            ground,
            members,
            vc_dim,
        })
    }
}

/// Explicit class from output vectors; duplicates are dropped, first occurrence wins.
pub fn make_finite_class(
    ground: Arc<GroundSet>,
    output_vectors: Vec<Vec<f64>>,
    vc_dim: usize,
) -> Result<HypothesisClass> {
    HypothesisClass::from_vectors(ground, output_vectors, vc_dim)
}

/// One-dimensional threshold classifiers `1[s(x - t) >= 0]`, `s = ±1`, with `t`
/// ranging over midpoints of consecutive points plus one cut below the minimum
/// and one above the maximum. Declared VC dimension 2.
pub fn make_threshold_class(ground: Arc<GroundSet>) -> Result<HypothesisClass> {
    if ground.dim() != 1 {
        return Err(Error::UnsupportedClass(format!(
            "threshold class needs 1-dimensional points, got dimension {}",
            ground.dim()
        )));
    }
    let xs: Vec<f64> = ground.points().iter().map(|p| p[0]).collect();
    let mut cuts = Vec::with_capacity(xs.len() + 1);
    cuts.push(xs[0] - 0.5);
    cuts.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cuts.push(xs[xs.len() - 1] + 0.5);

    let mut vectors = Vec::with_capacity(2 * cuts.len());
    for &t in &cuts {
        for s in [1.0, -1.0] {
            vectors.push(
                xs.iter()
                    .map(|&x| if s * (x - t) >= 0.0 { 1.0 } else { 0.0 })
                    .collect(),
            );
        }
    }
    HypothesisClass::from_vectors(ground, vectors, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(xs: &[f64]) -> Arc<GroundSet> {
        GroundSet::from_scalars(xs).unwrap()
    }

    #[test]
    fn ground_set_is_sorted_and_rejects_duplicates() {
        let (gs, perm) = GroundSet::canonicalize(vec![vec![2.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(gs.points(), &[vec![0.0], vec![1.0], vec![2.0]]);
        assert_eq!(perm, vec![1, 2, 0]);
        assert!(GroundSet::from_scalars(&[1.0, 1.0]).is_err());
        assert!(GroundSet::new(vec![]).is_err());
        assert!(GroundSet::new(vec![vec![0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn risk_terms() {
        let gs = g(&[0.0, 1.0]);
        let h = Hypothesis::new(gs.clone(), vec![1.0, 0.0]).unwrap();
        let f = Hypothesis::new(gs.clone(), vec![0.0, 0.0]).unwrap();
        assert_eq!(zero_one_risk_terms(&h, &f).unwrap(), vec![1.0, 0.0]);
        assert_eq!(zero_one_risk_terms(&h, &h).unwrap(), vec![0.0, 0.0]);
        let h = Hypothesis::new(gs.clone(), vec![0.5, 1.0]).unwrap();
        let f = Hypothesis::new(gs, vec![0.0, 1.0]).unwrap();
        assert_eq!(zero_one_risk_terms(&h, &f).unwrap(), vec![0.5, 0.0]);
        assert_eq!(zero_one_risk_terms(&f, &h).unwrap(), vec![0.5, 0.0]);
    }

    #[test]
    fn mismatched_grounds_rejected() {
        let h = Hypothesis::constant(g(&[0.0, 1.0]), 0.0).unwrap();
        let f = Hypothesis::constant(g(&[0.0, 2.0]), 0.0).unwrap();
        assert_eq!(zero_one_risk_terms(&h, &f), Err(Error::GroundMismatch));
        assert_eq!(sym_diff(&h, &f), Err(Error::GroundMismatch));
    }

    #[test]
    fn xor() {
        let gs = g(&[0.0, 1.0, 2.0]);
        let a = Hypothesis::new(gs.clone(), vec![1.0, 0.0, 1.0]).unwrap();
        let b = Hypothesis::new(gs.clone(), vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sym_diff(&a, &b).unwrap().outputs(), &[1.0, 0.0, 0.0]);
        assert_eq!(sym_diff(&a, &a).unwrap().outputs(), &[0.0, 0.0, 0.0]);
        let soft = Hypothesis::new(gs, vec![0.5, 0.0, 1.0]).unwrap();
        assert!(matches!(sym_diff(&a, &soft), Err(Error::NonBinary(_))));
    }

    #[test]
    fn threshold_two_points_gives_all_dichotomies() {
        let class = make_threshold_class(g(&[0.0, 1.0])).unwrap();
        assert_eq!(class.len(), 4);
        assert_eq!(class.vc_dim(), 2);
        for d in [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] {
            assert!(class.members().iter().any(|m| m.outputs() == d));
        }
    }

    #[test]
    fn threshold_single_point() {
        let class = make_threshold_class(g(&[5.0])).unwrap();
        assert_eq!(class.len(), 2);
    }

    #[test]
    fn threshold_rejects_2d() {
        let gs = GroundSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(make_threshold_class(gs), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn finite_class_dedup_and_ranges() {
        let c = make_finite_class(g(&[0.0, 1.0]), vec![vec![0.0, 0.0], vec![1.0, 1.0]], 1).unwrap();
        assert_eq!(c.len(), 2);
        let c = make_finite_class(g(&[0.0]), vec![vec![0.0], vec![0.0], vec![1.0]], 1).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.member(0).outputs(), &[0.0]);
        let c = make_finite_class(g(&[0.0]), vec![vec![0.5]], 1).unwrap();
        assert!(!c.member(0).is_binary());
        assert!(make_finite_class(g(&[0.0]), vec![], 1).is_err());
        assert!(make_finite_class(g(&[0.0]), vec![vec![1.5]], 1).is_err());
        assert!(make_finite_class(g(&[0.0]), vec![vec![1.0]], 0).is_err());
    }
}
