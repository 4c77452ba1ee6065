//! Dense Hermitian matrices and the small amount of dense linear algebra the
//! rest of the crate needs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a sampled matrix came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub ensemble: String,
    pub seed: u64,
}

/// A dense `n x n` Hermitian matrix stored row-major.
///
/// The constructors guarantee `a[i][j] == conj(a[j][i])` bit for bit and a
/// real diagonal. Real symmetric matrices are stored with zero imaginary
/// parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
    provenance: Option<Provenance>,
}

impl HermitianMatrix {
    /// Builds a matrix from its upper triangle (`i <= j`). The diagonal takes
    /// only the real part of `f(i, i)`.
    pub fn from_upper<F>(n: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(f(i, i).re, 0.0);
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        HermitianMatrix {
            n,
            data,
            provenance: None,
        }
    }

    /// Builds a matrix from a full row-major array, rejecting inputs whose
    /// asymmetry exceeds `1e-12 * max(1, max|a_ij|)`. The stored matrix is the
    /// exact Hermitian part of the input.
    pub fn from_dense(n: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Contract(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        let scale = data.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        for i in 0..n {
            for j in i..n {
                let d = (data[i * n + j] - data[j * n + i].conj()).norm();
                if d > 1e-12 * scale {
                    return Err(Error::Contract(format!(
                        "matrix is not Hermitian: |a[{i}][{j}] - conj(a[{j}][{i}])| = {d:e}"
                    )));
                }
            }
        }
        Ok(Self::from_upper(n, |i, j| {
            (data[i * n + j] + data[j * n + i].conj()) * 0.5
        }))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Contract("rows must form a square matrix".into()));
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_dense(n, &data)
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_upper(n, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::from_upper(d.len(), |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Exact (bitwise) Hermitian check.
    pub fn is_exactly_hermitian(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            self.data[i * n + i].im == 0.0
                && ((i + 1)..n).all(|j| self.data[i * n + j] == self.data[j * n + i].conj())
        })
    }

    /// Largest entry magnitude, `‖H‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every entry by a real factor. `W_n = M_n / √n` is
    /// `m.scaled(1.0 / (n as f64).sqrt())` and `A_n = √n M_n` is
    /// `m.scaled((n as f64).sqrt())`.
    pub fn scaled(&self, factor: f64) -> Self {
        HermitianMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * factor).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// The normalized view `W_n = M_n / √n`.
    pub fn wigner_view(&self) -> Self {
        self.scaled(1.0 / (self.n as f64).sqrt())
    }

    /// The view `A_n = √n M_n` used by the gap and four-moment statistics.
    pub fn amplified_view(&self) -> Self {
        self.scaled((self.n as f64).sqrt())
    }

    /// `H + tI`.
    pub fn shifted(&self, t: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += t;
        }
        out
    }

    /// The matrix with row and column `k` removed.
    pub fn minor_without(&self, k: usize) -> Self {
        assert!(k < self.n, "minor index out of range");
        let m = self.n - 1;
        let idx = |i: usize| if i < k { i } else { i + 1 };
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                data.push(self.data[idx(i) * self.n + idx(j)]);
            }
        }
        HermitianMatrix {
            n: m,
            data,
            provenance: self.provenance.clone(),
        }
    }

    /// Column `k` with its `k`-th entry removed.
    pub fn column_without(&self, k: usize) -> Vec<Complex64> {
        (0..self.n)
            .filter(|&i| i != k)
            .map(|i| self.data[i * self.n + k])
            .collect()
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Hermitian inner product `x^* y`.
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// LU factorization with partial pivoting of a general complex square matrix.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot is exactly zero.
    pub(crate) fn factor(n: usize, mut a: Vec<Complex64>) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[x * n + k].norm().total_cmp(&a[y * n + k].norm()))
                .unwrap();
            if a[p * n + k].norm() == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f.norm_sqr() != 0.0 {
                    for j in (k + 1)..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= f * u;
                    }
                }
            }
        }
        Some(Lu { n, lu: a, perm })
    }

    pub(crate) fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}
