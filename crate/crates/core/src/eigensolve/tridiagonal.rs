use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// Real symmetric tridiagonal matrix `T` with `H = Q T Q^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// Sub-diagonal, real and nonnegative.
    pub offdiag: Vec<f64>,
    /// Row-major `n x n` unitary `Q`, present when accumulation was requested.
    pub transform: Option<Vec<Complex64>>,
}

impl Tridiagonal {
    /// Builds a tridiagonal matrix without a transform. Negative off-diagonal
    /// entries are allowed here; only their squares enter the Sturm count and
    /// the eigenvalues.
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if !diag.is_empty() && offdiag.len() + 1 != diag.len() {
            return Err(Error::Contract(format!(
                "tridiagonal with {} diagonal entries needs {} off-diagonal entries",
                diag.len(),
                diag.len().saturating_sub(1)
            )));
        }
        Ok(Tridiagonal {
            diag,
            offdiag,
            transform: None,
        })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Infinity norm, also a Gershgorin radius for the spectrum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `Q T Q^*` as a row-major array; requires the transform.
    pub fn reconstruct(&self) -> Option<Vec<Complex64>> {
        let q = self.transform.as_ref()?;
        let n = self.n();
        // (Q T)[i][j] = Q[i][j] d_j + Q[i][j-1] e_{j-1} + Q[i][j+1] e_j
        let mut qt = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = q[i * n + j] * self.diag[j];
                if j > 0 {
                    s += q[i * n + j - 1] * self.offdiag[j - 1];
                }
                if j + 1 < n {
                    s += q[i * n + j + 1] * self.offdiag[j];
                }
                qt[i * n + j] = s;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| qt[i * n + k] * q[j * n + k].conj()).sum();
            }
        }
        Some(out)
    }
}

struct Reflector {
    v: Vec<Complex64>,
    tau: f64,
}

/// Turns `x` into the Householder vector `v` with `(I - tau v v^*) x = beta e_1`.
/// Returns `None` when `x = 0`.
fn make_reflector(x: &mut [Complex64]) -> Option<(f64, Complex64)> {
    let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if alpha == 0.0 {
        return None;
    }
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 {
        x0 / x0.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let beta = -phase * alpha;
    x[0] = x0 - beta;
    let vnorm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    Some((2.0 / vnorm2, beta))
}

/// Prepared reflector of the next step: `v`, `tau`, `beta` and `B v`.
struct Pending {
    v: Vec<Complex64>,
    tau: f64,
    beta: Complex64,
    bv: Vec<Complex64>,
}

/// Householder reduction of a Hermitian matrix to real tridiagonal form.
///
/// Only the lower triangle of the working copy is touched, and the
/// matrix-vector product of step `k + 1` is accumulated during the rank-2
/// update of step `k`, so each step streams the trailing block once.
/// Complex phases of the sub-diagonal are absorbed into a diagonal unitary
/// so the returned off-diagonal is real and nonnegative.
pub fn tridiagonalize(h: &HermitianMatrix, accumulate: bool) -> Tridiagonal {
    let n = h.n();
    let mut a = h.as_slice().to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let mut sub = vec![zero; n.saturating_sub(1)];
    let mut reflectors: Vec<Reflector> = Vec::new();
    let mut next: Option<Pending> = None;

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let off = k + 1;
        if m == 1 {
            sub[k] = a[off * n + k];
            continue;
        }
        let step = match next.take() {
            Some(p) => p,
            None => {
                let mut v: Vec<Complex64> = (0..m).map(|i| a[(off + i) * n + k]).collect();
                match make_reflector(&mut v) {
                    None => {
                        sub[k] = zero;
                        if accumulate {
                            reflectors.push(Reflector { v: Vec::new(), tau: 0.0 });
                        }
                        continue;
                    }
                    Some((tau, beta)) => {
                        let bv = lower_matvec(&a, n, off, &v);
                        Pending { v, tau, beta, bv }
                    }
                }
            }
        };
        let Pending { v, tau, beta, bv } = step;

        // w = p - (tau/2)(v^* p) v with p = tau B v.
        let mut w: Vec<Complex64> = bv.into_iter().map(|x| x * tau).collect();
        let vp: f64 = v.iter().zip(&w).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        let half_k = 0.5 * tau * vp;
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= vi * half_k;
        }

        // Column 0 of the trailing block first: it defines the next reflector.
        for i in 0..m {
            a[(off + i) * n + off] -= v[i] * w[0].conj() + w[i] * v[0].conj();
        }
        let mut pending = None;
        if m >= 3 {
            let mut v2: Vec<Complex64> = (1..m).map(|i| a[(off + i) * n + off]).collect();
            if let Some((tau2, beta2)) = make_reflector(&mut v2) {
                pending = Some(Pending {
                    v: v2,
                    tau: tau2,
                    beta: beta2,
                    bv: vec![zero; m - 1],
                });
            }
        }

        // B -= v w^* + w v^* on the rest of the lower triangle, feeding each
        // updated row into the next product B' v'.
        for i in 1..m {
            let vi = v[i];
            let wi = w[i];
            let row = &mut a[(off + i) * n + off + 1..(off + i) * n + off + i + 1];
            for ((bij, vj), wj) in row.iter_mut().zip(&v[1..=i]).zip(&w[1..=i]) {
                *bij -= vi * wj.conj() + wi * vj.conj();
            }
            if let Some(p) = pending.as_mut() {
                let ii = i - 1;
                let vii = p.v[ii];
                let mut acc = zero;
                for ((bij, vj), pj) in row[..ii].iter().zip(&p.v[..ii]).zip(p.bv[..ii].iter_mut()) {
                    acc += bij * vj;
                    *pj += bij.conj() * vii;
                }
                p.bv[ii] += acc + row[ii].re * vii;
            }
        }
        next = pending;

        sub[k] = beta;
        if accumulate {
            reflectors.push(Reflector { v, tau });
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();

    // D^* T D with d_{k+1} = d_k e_k / |e_k| makes every sub-diagonal |e_k|.
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    for (k, e) in sub.iter().enumerate() {
        let r = e.norm();
        phases[k + 1] = if r > 0.0 { phases[k] * (e / r) } else { phases[k] };
        offdiag.push(r);
    }

    let transform = accumulate.then(|| {
        let mut q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = Complex64::new(1.0, 0.0);
        }
        let mut r = vec![zero; n];
        for (k, refl) in reflectors.iter().enumerate().rev() {
            if refl.tau == 0.0 {
                continue;
            }
            let off = k + 1;
            let r = &mut r[off..n];
            r.iter_mut().for_each(|x| *x = zero);
            for (i, vi) in refl.v.iter().enumerate() {
                let row = &q[(off + i) * n + off..(off + i + 1) * n];
                let cv = vi.conj();
                for (rj, qij) in r.iter_mut().zip(row) {
                    *rj += cv * qij;
                }
            }
            for (i, vi) in refl.v.iter().enumerate() {
                let s = vi * refl.tau;
                let row = &mut q[(off + i) * n + off..(off + i + 1) * n];
                for (qij, rj) in row.iter_mut().zip(r.iter()) {
                    *qij -= s * rj;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] *= phases[j];
            }
        }
        q
    });

    Tridiagonal {
        diag,
        offdiag,
        transform,
    }
}

/// `B v` for the trailing block `B = a[off.., off..]`, read from its lower
/// triangle.
fn lower_matvec(a: &[Complex64], n: usize, off: usize, v: &[Complex64]) -> Vec<Complex64> {
    let m = v.len();
    let mut p = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        let row = &a[(off + i) * n + off..(off + i) * n + off + i];
        let vi = v[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for ((bij, vj), pj) in row.iter().zip(&v[..i]).zip(p[..i].iter_mut()) {
            acc += bij * vj;
            *pj += bij.conj() * vi;
        }
        p[i] += acc + a[(off + i) * n + off + i].re * vi;
    }
    p
}
