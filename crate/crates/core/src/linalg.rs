//! Dense symmetric positive-definite factorization for covariance sampling.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Diagonal jitter tried in turn: `1e-12 · 10^k`, `k = 0..=4`.
pub const JITTER_LADDER: [f64; 5] = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8];

/// Square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Domain(alloc::format!("expected {} entries, got {}", dim * dim, data.len())));
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Lower Cholesky factor `L` with `L Lᵀ = A + jitter·I`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
    jitter: f64,
}

impl Cholesky {
    /// Factorizes with the smallest jitter from [`JITTER_LADDER`] that works.
    pub fn factor(a: &Matrix) -> Result<Self> {
        for &jitter in &JITTER_LADDER {
            if let Some(lower) = try_factor(a, jitter) {
                return Ok(Cholesky { lower, jitter });
            }
        }
        Err(Error::IllConditioned { jitter: JITTER_LADDER[JITTER_LADDER.len() - 1] })
    }

    pub fn dim(&self) -> usize {
        self.lower.dim
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn lower(&self) -> &Matrix {
        &self.lower
    }

    /// `L z`.
    pub fn mul_vec(&self, z: &[f64]) -> Vec<f64> {
        let n = self.lower.dim;
        assert_eq!(z.len(), n);
        (0..n).map(|i| dot(&self.lower.row(i)[..=i], &z[..=i])).collect()
    }
}

fn try_factor(a: &Matrix, jitter: f64) -> Option<Matrix> {
    let n = a.dim;
    let mut l = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let s = dot(&l.row(i)[..j], &l.row(j)[..j]);
            if i == j {
                let d = a.get(i, i) + jitter - s;
                if !(d > 0.0) {
                    return None;
                }
                l.set(i, i, d.sqrt());
            } else {
                let v = (a.get(i, j) - s) / l.get(j, j);
                l.set(i, j, v);
            }
        }
    }
    Some(l)
}

/// Dot product with four independent accumulators.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (xc, xr) = x[..n].split_at(n - n % 4);
    let (yc, yr) = y[..n].split_at(n - n % 4);
    let mut acc = [0.0f64; 4];
    for (a, b) in xc.chunks_exact(4).zip(yc.chunks_exact(4)) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    let tail: f64 = xr.iter().zip(yr).map(|(a, b)| a * b).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let d = (i as f64 - j as f64).abs();
                m.set(i, j, (-0.3 * d).exp());
            }
        }
        m
    }

    #[test]
    fn reconstructs_matrix() {
        let a = spd(37);
        let c = Cholesky::factor(&a).unwrap();
        assert_eq!(c.jitter(), 1e-12);
        let l = c.lower();
        for i in 0..37 {
            for j in 0..37 {
                let v = dot(&l.row(i)[..=i.min(j)], &l.row(j)[..=i.min(j)]);
                let want = a.get(i, j) + if i == j { 1e-12 } else { 0.0 };
                assert!((v - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn duplicate_points_need_jitter() {
        // two identical rows: singular, factorizable only with jitter
        let a = Matrix::from_rows(3, vec![1.0, 1.0, 0.5, 1.0, 1.0, 0.5, 0.5, 0.5, 1.0]).unwrap();
        let c = Cholesky::factor(&a).unwrap();
        assert!(c.jitter() >= 1e-12);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = Matrix::from_rows(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(Cholesky::factor(&a), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn dot_matches_naive_sum() {
        let x: Vec<f64> = (0..11).map(|k| k as f64 * 0.5).collect();
        let y: Vec<f64> = (0..11).map(|k| 1.0 - k as f64).collect();
        let naive: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((dot(&x, &y) - naive).abs() < 1e-12);
    }
}
