//! Test support: an independent brute-force oracle over raw vectors and
//! random problem generators. Nothing here calls into the library's
//! divergence, risk or ERM code.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlbounds::domains::DiscreteDomain;
use tlbounds::hypothesis::{make_finite_class, make_threshold_class, GroundSet, HypothesisClass};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ_x p(x) |a(x) - b(x)|`, accumulated in index order.
pub fn oracle_abs_mass(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += p[i] * (a[i] - b[i]).abs();
    }
    s
}

pub fn oracle_sq_mass(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += p[i] * (a[i] - b[i]) * (a[i] - b[i]);
    }
    s
}

/// Twice the largest gap in mass on any XOR region, over all ordered pairs.
pub fn oracle_hdh(members: &[Vec<f64>], p: &[f64], q: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for a in members {
        for b in members {
            let mut pa = 0.0;
            let mut qa = 0.0;
            for x in 0..p.len() {
                if a[x] != b[x] {
                    pa += p[x];
                    qa += q[x];
                }
            }
            best = best.max((pa - qa).abs());
        }
    }
    2.0 * best
}

pub fn oracle_discrepancy(members: &[Vec<f64>], p: &[f64], q: &[f64], squared: bool) -> f64 {
    let mass = if squared { oracle_sq_mass } else { oracle_abs_mass };
    let mut best: f64 = 0.0;
    for a in members {
        for b in members {
            best = best.max((mass(p, a, b) - mass(q, a, b)).abs());
        }
    }
    best
}

/// `(argmin, min)` of `objective` over members; earliest index wins ties.
pub fn oracle_argmin(members: &[Vec<f64>], objective: impl Fn(&[f64]) -> f64) -> (usize, f64) {
    let values: Vec<f64> = members.iter().map(|h| objective(h)).collect();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let idx = values.iter().position(|&v| v == min).unwrap();
    (idx, min)
}

/// Mean absolute loss of `h` on `(index, label)` entries.
pub fn oracle_empirical(entries: &[(usize, f64)], h: &[f64]) -> f64 {
    let mut s = 0.0;
    for &(i, y) in entries {
        s += (h[i] - y).abs();
    }
    s / entries.len() as f64
}

/// Every dichotomy of `n` sorted points that a one-dimensional threshold can produce.
pub fn oracle_threshold_dichotomies(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let bits: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        let prefix_ones = (0..=n).any(|k| bits.iter().enumerate().all(|(i, &b)| b == if i < k { 1.0 } else { 0.0 }));
        let suffix_ones = (0..=n).any(|k| bits.iter().enumerate().all(|(i, &b)| b == if i >= k { 1.0 } else { 0.0 }));
        if prefix_ones || suffix_ones {
            out.push(bits);
        }
    }
    out
}

pub fn random_probs(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if r.random_bool(0.15) { 0.0 } else { r.random::<f64>() })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[r.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

pub fn random_binary(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if r.random_bool(0.5) { 1.0 } else { 0.0 }).collect()
}

/// A random binary problem: class plus source and target domains on one ground set.
pub struct Problem {
    pub ground: Arc<GroundSet>,
    pub class: HypothesisClass,
    pub members: Vec<Vec<f64>>,
    pub source: DiscreteDomain,
    pub target: DiscreteDomain,
}

impl Problem {
    pub fn source_probs(&self) -> &[f64] {
        self.source.probs()
    }
    pub fn target_probs(&self) -> &[f64] {
        self.target.probs()
    }
}

/// Support of 1..=`max_n` points; threshold class or an explicit binary class
/// of up to `max_members` members.
pub fn random_problem(seed: u64, max_n: usize, max_members: usize) -> Problem {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_n);
    let mut xs: Vec<f64> = Vec::new();
    while xs.len() < n {
        let x = (r.random::<f64>() * 1000.0).round() / 100.0;
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let ground = GroundSet::from_scalars(&xs).unwrap();
    let class = if r.random_bool(0.4) {
        make_threshold_class(ground.clone()).unwrap()
    } else {
        let k = r.random_range(1..=max_members);
        let vectors: Vec<Vec<f64>> = (0..k).map(|_| random_binary(&mut r, n)).collect();
        make_finite_class(ground.clone(), vectors, r.random_range(1..=4)).unwrap()
    };
    let members = class.members().iter().map(|h| h.outputs().to_vec()).collect();
    let source = DiscreteDomain::with_labels(ground.clone(), random_probs(&mut r, n), random_binary(&mut r, n)).unwrap();
    let target = DiscreteDomain::with_labels(ground.clone(), random_probs(&mut r, n), random_binary(&mut r, n)).unwrap();
    Problem {
        ground,
        class,
        members,
        source,
        target,
    }
}
