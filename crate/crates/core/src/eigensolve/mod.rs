//! Hermitian eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, plus Sturm-sequence counting on the tridiagonal form.

mod ql;
mod sturm;
mod tridiagonal;

pub use ql::{implicit_ql, MAX_SWEEPS_PER_EIGENVALUE};
pub use sturm::{bisection_eigenvalues, count_below, count_in_interval};
pub use tridiagonal::{tridiagonalize, Tridiagonal};

use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::HermitianMatrix;

/// Eigenvalues closer than this (relative to `max(1, ‖H‖_max)`) are treated
/// as one cluster and their eigenvectors re-orthonormalized together.
pub const CLUSTER_TOLERANCE: f64 = 1e-10;

/// Ordered eigenvalues `λ_1 <= ... <= λ_n` with orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvector `j` occupies `vectors[j * n..(j + 1) * n]`.
    vectors: Vec<Complex64>,
    residual: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector for `eigenvalues()[j]`. Its largest-magnitude
    /// coordinate is real and positive.
    pub fn vector(&self, j: usize) -> &[Complex64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    /// `max_i ‖H u_i − λ_i u_i‖ / max(1, ‖H‖_max)`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max |U^*U − I|`.
    pub fn gram_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let g = crate::matrix::dot(self.vector(i), self.vector(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Debug dump: one row per `(vector, coordinate)` with columns
    /// `index,eigenvalue,coordinate,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,eigenvalue,coordinate,re,im")?;
        for j in 0..self.n {
            for (r, z) in self.vector(j).iter().enumerate() {
                writeln!(w, "{j},{:e},{r},{:e},{:e}", self.eigenvalues[j], z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Sorted eigenvalues only.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let t = tridiagonalize(h, false);
    let mut d = t.diag;
    implicit_ql(&mut d, &t.offdiag, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Full decomposition of a Hermitian matrix.
pub fn eigen_full(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.n();
    let t = tridiagonalize(h, true);
    let q = t.transform.expect("transform was requested");
    let mut d = t.diag;
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    implicit_ql(&mut d, &t.offdiag, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| d[j]).collect();

    // u_j = Q z_j
    let zero = Complex64::new(0.0, 0.0);
    let mut vectors = vec![zero; n * n];
    for (slot, &j) in order.iter().enumerate() {
        let zj = &z[j * n..(j + 1) * n];
        let u = &mut vectors[slot * n..(slot + 1) * n];
        for (r, ur) in u.iter_mut().enumerate() {
            let qrow = &q[r * n..(r + 1) * n];
            *ur = qrow.iter().zip(zj).map(|(a, &b)| a * b).sum();
        }
    }

    let scale = h.max_abs().max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= CLUSTER_TOLERANCE * scale {
            end += 1;
        }
        if end - start > 1 {
            orthonormalize(&mut vectors[start * n..end * n], n);
        }
        start = end;
    }
    for j in 0..n {
        fix_phase(&mut vectors[j * n..(j + 1) * n]);
    }

    let mut residual = 0.0_f64;
    for j in 0..n {
        let u = &vectors[j * n..(j + 1) * n];
        let hu = h.matvec(u);
        let r: f64 = hu
            .iter()
            .zip(u)
            .map(|(a, b)| (a - b * eigenvalues[j]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }

    Ok(SpectralDecomposition {
        n,
        eigenvalues,
        vectors,
        residual: residual / scale,
    })
}

/// Modified Gram-Schmidt over consecutive length-`n` vectors.
fn orthonormalize(block: &mut [Complex64], n: usize) {
    let k = block.len() / n;
    for j in 0..k {
        let (done, rest) = block.split_at_mut(j * n);
        let v = &mut rest[..n];
        for i in 0..j {
            let u = &done[i * n..(i + 1) * n];
            let c = crate::matrix::dot(u, v);
            for (vr, ur) in v.iter_mut().zip(u) {
                *vr -= c * ur;
            }
        }
        let norm = crate::matrix::norm(v);
        for vr in v.iter_mut() {
            *vr /= norm;
        }
    }
}

fn fix_phase(u: &mut [Complex64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (r, z) in u.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = r;
        }
    }
    if best_abs > 0.0 {
        let rot = u[best].conj() / best_abs;
        for z in u.iter_mut() {
            *z *= rot;
        }
        u[best] = Complex64::new(best_abs, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{builtin_ensemble, sample_matrix, Builtin};
    use crate::interval::Interval;

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_input_is_already_tridiagonal() {
        let h = HermitianMatrix::diagonal(&[3.0, -1.0, 2.0]);
        let t = tridiagonalize(&h, true);
        assert_eq!(t.diag, vec![3.0, -1.0, 2.0]);
        assert_eq!(t.offdiag, vec![0.0, 0.0]);
        let q = t.transform.unwrap();
        let id = HermitianMatrix::identity(3);
        assert_eq!(max_diff(&q, id.as_slice()), 0.0);
    }

    #[test]
    fn two_by_two_swap() {
        let h = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = tridiagonalize(&h, false);
        assert_eq!(t.diag, vec![0.0, 0.0]);
        assert_eq!(t.offdiag, vec![1.0]);
        let dec = eigen_full(&h).unwrap();
        assert!((dec.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((dec.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complex_phases_are_absorbed() {
        let h = HermitianMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, 2.0),
            _ => Complex64::new(1.0, 0.0),
        });
        let t = tridiagonalize(&h, true);
        assert!((t.offdiag[0] - 2.0).abs() < 1e-15);
        let err = max_diff(&t.reconstruct().unwrap(), h.as_slice());
        assert!(err < 1e-14, "{err}");
    }

    #[test]
    fn random_reconstruction() {
        let h = sample_matrix(&builtin_ensemble(Builtin::Gue), 8, 11);
        let t = tridiagonalize(&h, true);
        assert!(t.offdiag.iter().all(|&e| e >= 0.0));
        let err = max_diff(&t.reconstruct().unwrap(), h.as_slice());
        assert!(err <= 1e-12 * h.max_abs(), "{err}");
    }

    #[test]
    fn identity_spectrum() {
        let dec = eigen_full(&HermitianMatrix::identity(5)).unwrap();
        assert_eq!(dec.eigenvalues(), &[1.0; 5]);
        assert_eq!(dec.residual(), 0.0);
        assert!(dec.gram_error() < 1e-15);
    }

    #[test]
    fn gue_twenty() {
        let h = sample_matrix(&builtin_ensemble(Builtin::Gue), 20, 4).wigner_view();
        let dec = eigen_full(&h).unwrap();
        assert!(dec.residual() <= 1e-10);
        assert!(dec.gram_error() <= 1e-10);
        assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let fast = eigenvalues(&h).unwrap();
        for (a, b) in fast.iter().zip(dec.eigenvalues()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_convention() {
        let h = sample_matrix(&builtin_ensemble(Builtin::BernoulliComplex), 12, 2);
        let dec = eigen_full(&h).unwrap();
        for j in 0..12 {
            let u = dec.vector(j);
            let (r, m) = u
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            assert_eq!(m.im, 0.0, "vector {j} coordinate {r}");
            assert!(m.re > 0.0);
        }
    }

    #[test]
    fn sturm_examples() {
        let t = Tridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(count_in_interval(&t, Interval::new(1.5, 3.5).unwrap()), 2);
        assert_eq!(count_in_interval(&t, Interval::new(4.0, 5.0).unwrap()), 0);
        // Half-open: 1 is in [1, 2), 2 is not.
        assert_eq!(count_in_interval(&t, Interval::new(1.0, 2.0).unwrap()), 1);
    }

    #[test]
    fn sturm_matches_full_decomposition() {
        let h = sample_matrix(&builtin_ensemble(Builtin::Goe), 50, 8).wigner_view();
        let t = tridiagonalize(&h, false);
        let dec = eigen_full(&h).unwrap();
        for (a, b) in [(-3.0, 3.0), (-1.0, 0.5), (0.25, 0.3), (1.9, 2.5), (-0.7, -0.1)] {
            let iv = Interval::new(a, b).unwrap();
            let direct = dec.eigenvalues().iter().filter(|&&x| iv.contains(x)).count();
            assert_eq!(count_in_interval(&t, iv), direct, "[{a},{b})");
        }
    }

    #[test]
    fn bisection_agrees_with_ql() {
        let h = sample_matrix(&builtin_ensemble(Builtin::BernoulliReal), 30, 1);
        let t = tridiagonalize(&h, false);
        let bis = bisection_eigenvalues(&t);
        let ql = eigenvalues(&h).unwrap();
        for (a, b) in bis.iter().zip(&ql) {
            assert!((a - b).abs() <= 1e-9 * h.max_abs());
        }
    }

    #[test]
    fn ql_reports_non_convergence_on_nan() {
        let mut d = vec![f64::NAN, 1.0, 2.0];
        let r = implicit_ql(&mut d, &[1.0, 1.0], None);
        assert!(matches!(r, Err(crate::Error::NoConvergence { .. })));
    }
}
