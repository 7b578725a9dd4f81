//! Dense row-major complex matrices, sized for representation blocks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// Matrix product, skipping exact-zero left entries. Skipping zeros is
    /// bit-identical to the dense sum (adding `0·x` never changes a finite
    /// float) and makes products of one-hot-row matrices O(dim²).
    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let a = self.data[i * d + j];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..d {
                    out.data[i * d + k] += a * other.data[j * d + k];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// |det| via Gaussian elimination with partial pivoting.
    pub fn abs_determinant(&self) -> f64 {
        let d = self.dim;
        let mut m = self.data.clone();
        let mut det: f64 = 1.0;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&a, &b| {
                    m[a * d + col]
                        .norm()
                        .partial_cmp(&m[b * d + col].norm())
                        .unwrap()
                })
                .unwrap();
            let pivot_val = m[pivot * d + col];
            if pivot_val.norm() < 1e-12 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..d {
                    m.swap(pivot * d + j, col * d + j);
                }
            }
            det *= pivot_val.norm();
            for row in (col + 1)..d {
                let factor = m[row * d + col] / pivot_val;
                for j in col..d {
                    let sub = factor * m[col * d + j];
                    m[row * d + j] -= sub;
                }
            }
        }
        det
    }

    /// Exact integer copy when every entry is (numerically) a real integer.
    pub fn to_integer(&self) -> Option<Vec<i64>> {
        let mut out = Vec::with_capacity(self.data.len());
        for z in &self.data {
            if z.im.abs() > 1e-12 {
                return None;
            }
            let r = z.re.round();
            if (z.re - r).abs() > 1e-12 {
                return None;
            }
            out.push(r as i64);
        }
        Some(out)
    }
}

/// Exact product of integer matrices (row-major).
pub fn int_mul(dim: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let v = a[i * dim + j];
            if v == 0 {
                continue;
            }
            for k in 0..dim {
                out[i * dim + k] += v * b[j * dim + k];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_matches_identity() {
        let m = SquareMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(m.mul(&SquareMatrix::identity(2)), m);
        assert_eq!(SquareMatrix::identity(2).mul(&m), m);
    }

    #[test]
    fn determinant_of_singular_is_zero() {
        let m = SquareMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(m.abs_determinant() < 1e-9);
        let p = SquareMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((p.abs_determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integer_detection() {
        let m = SquareMatrix::from_real_rows(&[vec![1.0, -2.0], vec![0.0, 3.0]]);
        assert_eq!(m.to_integer(), Some(vec![1, -2, 0, 3]));
        let f = SquareMatrix::from_real_rows(&[vec![0.5, 0.0], vec![0.0, 1.0]]);
        assert_eq!(f.to_integer(), None);
    }
}
