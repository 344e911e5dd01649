//! Dense symmetric positive-definite solves via the square-root-free `LDLᵀ`
//! factorization. Sizes here are small (feature dimension), so row-major
//! `Vec<f64>` storage is enough.

use crate::error::{Error, Result};

/// `A = L D Lᵀ` with unit lower-triangular `L` and diagonal `D > 0`.
#[derive(Debug, Clone)]
pub(crate) struct Ldlt {
    n: usize,
    /// Strict lower triangle of `L`, row-major `n × n`.
    l: Vec<f64>,
    d: Vec<f64>,
}

impl Ldlt {
    /// Factors a symmetric matrix given row-major; fails unless it is positive definite.
    pub(crate) fn factor(a: &[f64], n: usize) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        let mut d = vec![0.0; n];
        for j in 0..n {
            let mut dj = a[j * n + j];
            for k in 0..j {
                dj -= l[j * n + k] * l[j * n + k] * d[k];
            }
            if !(dj > 0.0) || !dj.is_finite() {
                return Err(Error::Numerical(format!(
                    "matrix is not positive definite (pivot {j} = {dj})"
                )));
            }
            d[j] = dj;
            for i in j + 1..n {
                let mut v = a[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k] * d[k];
                }
                l[i * n + j] = v / dj;
            }
        }
        Ok(Ldlt { n, l, d })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[i * n + k] * y[k];
            }
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.l[k * n + i] * y[k];
            }
        }
        y
    }
}

/// `XᵀX + penalty·I` (row-major) and `Xᵀr` for rows `xs`.
pub(crate) fn normal_equations(xs: &[Vec<f64>], r: &[f64], penalty: f64) -> (Vec<f64>, Vec<f64>) {
    let p = xs.first().map_or(0, Vec::len);
    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for (x, ri) in xs.iter().zip(r) {
        for a in 0..p {
            rhs[a] += x[a] * ri;
            for b in 0..p {
                gram[a * p + b] += x[a] * x[b];
            }
        }
    }
    for a in 0..p {
        gram[a * p + a] += penalty;
    }
    (gram, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // A = [[4, 2], [2, 3]], b = [2, 1] → x = [0.5, 0]
        let f = Ldlt::factor(&[4.0, 2.0, 2.0, 3.0], 2).unwrap();
        let x = f.solve(&[2.0, 1.0]);
        assert!((x[0] - 0.5).abs() < 1e-15 && x[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(Ldlt::factor(&[1.0, 2.0, 2.0, 1.0], 2).is_err());
        assert!(Ldlt::factor(&[0.0], 1).is_err());
    }

    #[test]
    fn scalar_is_exact_division() {
        assert_eq!(Ldlt::factor(&[2.0], 1).unwrap().solve(&[1.0]), vec![0.5]);
    }
}
