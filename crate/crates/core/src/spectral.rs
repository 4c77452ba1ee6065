//! Semicircle reference quantities, Stieltjes transforms, ESD deviations and
//! the Schur-complement resolvent identity.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{self, Tridiagonal};
use crate::error::{Error, Result};
pub use crate::interval::Interval;
use crate::matrix::{HermitianMatrix, Lu};

/// Relative residual above which a minor resolvent solve is rejected.
pub const RESOLVENT_SOLVE_TOLERANCE: f64 = 1e-8;

/// Semicircle density `(1/2π)√(4 − x²)` on `[−2, 2]`.
pub fn rho_sc(x: f64) -> f64 {
    if x.abs() <= 2.0 {
        (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// `∫_{−2}^{x} ρ_sc`, clipped to `[0, 1]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-2.0, 2.0);
    let anti = (x * (4.0 - x * x).max(0.0).sqrt() / 2.0 + 2.0 * (x / 2.0).asin()) / (2.0 * PI);
    (anti + 0.5).clamp(0.0, 1.0)
}

/// `∫_I ρ_sc`.
pub fn semicircle_mass(interval: Interval) -> f64 {
    semicircle_cdf(interval.b()) - semicircle_cdf(interval.a())
}

/// Inverse of [`semicircle_cdf`] on `(0, 1)`, by bisection to full precision.
pub fn semicircle_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `s_n(z) = (1/n) Σ 1/(λ_i − z)`. Defined for `Im z > 0`, where every term
/// has positive imaginary part.
pub fn stieltjes_empirical(eigenvalues: &[f64], z: Complex64) -> Complex64 {
    let sum: Complex64 = eigenvalues.iter().map(|&l| 1.0 / (l - z)).sum();
    sum / eigenvalues.len() as f64
}

/// Semicircle Stieltjes transform `s(z) = (−z + √(z² − 4))/2`, `Im z > 0`.
///
/// The root is `√(z − 2)·√(z + 2)` with principal factors, which puts the
/// cut on `[−2, 2]` and is asymptotic to `z`. The value is evaluated as
/// `−2 / (z + √(z² − 4))` (the same number) to avoid cancellation when `|z|`
/// is large.
pub fn stieltjes_sc(z: Complex64) -> Complex64 {
    let root = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    -2.0 / (z + root)
}

/// `|s + 1/(s + z)|`, zero exactly for the semicircle transform.
pub fn self_consistency_residual(s: Complex64, z: Complex64) -> f64 {
    (s + 1.0 / (s + z)).norm()
}

/// Empirical and semicircle transforms at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StieltjesSample {
    pub z: Complex64,
    pub s_n: Complex64,
    pub s_sc: Complex64,
    pub deviation: f64,
}

impl StieltjesSample {
    pub fn at(eigenvalues: &[f64], z: Complex64) -> Self {
        let s_n = stieltjes_empirical(eigenvalues, z);
        let s_sc = stieltjes_sc(z);
        StieltjesSample {
            z,
            s_n,
            s_sc,
            deviation: (s_n - s_sc).norm(),
        }
    }
}

/// One axis of a grid: `steps` evenly spaced points from `min` to `max`
/// inclusive (`steps = 1` gives just `min`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            s => (0..s)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (s - 1) as f64)
                .collect(),
        }
    }
}

/// Rectangular grid of spectral parameters, written
/// `re_min:re_max:steps,im_min:im_max:steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGrid {
    pub re: Axis,
    pub im: Axis,
}

impl ComplexGrid {
    /// Points ordered by real part, then imaginary part.
    pub fn points(&self) -> Vec<Complex64> {
        let ims = self.im.points();
        self.re
            .points()
            .into_iter()
            .flat_map(|re| ims.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }
}

impl FromStr for ComplexGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let axis = |t: &str| -> Result<Axis> {
            let parts: Vec<&str> = t.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("grid axis `{t}` is not min:max:steps")));
            }
            let f = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("grid value `{x}`: {e}")))
            };
            let steps = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Config(format!("grid steps `{}`: {e}", parts[2])))?;
            Ok(Axis {
                min: f(parts[0])?,
                max: f(parts[1])?,
                steps,
            })
        };
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("grid `{s}` needs a real and an imaginary axis")))?;
        let grid = ComplexGrid {
            re: axis(re)?,
            im: axis(im)?,
        };
        if grid.im.points().iter().any(|&y| !(y > 0.0)) {
            return Err(Error::Config("grid imaginary parts must be positive".into()));
        }
        Ok(grid)
    }
}

impl fmt::Display for ComplexGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{},{}:{}:{}",
            self.re.min, self.re.max, self.re.steps, self.im.min, self.im.max, self.im.steps
        )
    }
}

pub fn stieltjes_scan(eigenvalues: &[f64], grid: &ComplexGrid) -> Vec<StieltjesSample> {
    grid.points()
        .into_iter()
        .map(|z| StieltjesSample::at(eigenvalues, z))
        .collect()
}

/// Writes `re_z,im_z,re_sn,im_sn,re_s,im_s,deviation` rows.
pub fn write_stieltjes_csv<W: Write>(mut w: W, samples: &[StieltjesSample]) -> std::io::Result<()> {
    writeln!(w, "re_z,im_z,re_sn,im_sn,re_s,im_s,deviation")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{:e},{:e},{:e},{:e},{:e}",
            s.z.re, s.z.im, s.s_n.re, s.s_n.im, s.s_sc.re, s.s_sc.im, s.deviation
        )?;
    }
    Ok(())
}

/// Eigenvalue count in an interval against the semicircle prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsdDeviation {
    pub count: usize,
    /// `n ∫_I ρ_sc`.
    pub expected: f64,
    /// `|N_I − n ∫_I ρ_sc|`.
    pub deviation: f64,
}

impl EsdDeviation {
    fn new(count: usize, n: usize, interval: Interval) -> Self {
        let expected = n as f64 * semicircle_mass(interval);
        EsdDeviation {
            count,
            expected,
            deviation: (count as f64 - expected).abs(),
        }
    }

    /// `N_I / n − ∫_I ρ_sc` given the dimension.
    pub fn fraction_error(&self, n: usize) -> f64 {
        (self.count as f64 - self.expected) / n as f64
    }
}

pub fn esd_deviation(eigenvalues: &[f64], interval: Interval) -> EsdDeviation {
    let count = eigenvalues.iter().filter(|&&x| interval.contains(x)).count();
    EsdDeviation::new(count, eigenvalues.len(), interval)
}

/// Same as [`esd_deviation`] with `N_I` from a Sturm count.
pub fn esd_deviation_sturm(t: &Tridiagonal, interval: Interval) -> EsdDeviation {
    EsdDeviation::new(eigensolve::count_in_interval(t, interval), t.n(), interval)
}

/// Solves `(W_k − zI) y = b` by LU with one step of iterative refinement and
/// returns `y` with the relative residual `‖(W_k − zI) y − b‖ / ‖b‖`.
fn shifted_solve(minor: &HermitianMatrix, z: Complex64, b: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let m = minor.n();
    let mut shifted = minor.as_slice().to_vec();
    for i in 0..m {
        shifted[i * m + i] -= z;
    }
    let apply = |y: &[Complex64]| -> Vec<Complex64> {
        (0..m)
            .map(|i| {
                shifted[i * m..(i + 1) * m]
                    .iter()
                    .zip(y)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    };
    let lu = Lu::factor(m, shifted.clone())?;
    let mut y = lu.solve(b);
    let r: Vec<Complex64> = apply(&y).iter().zip(b).map(|(ay, bi)| bi - ay).collect();
    let dy = lu.solve(&r);
    for (yi, di) in y.iter_mut().zip(&dy) {
        *yi += di;
    }
    let r: f64 = apply(&y)
        .iter()
        .zip(b)
        .map(|(ay, bi)| (ay - bi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let bn = crate::matrix::norm(b);
    Some((y, if bn > 0.0 { r / bn } else { r }))
}

/// Right-hand side of the Schur-complement identity,
/// `(1/n) Σ_k 1/(w_kk − z − Y_k)` with `Y_k = b_k^* (W_{n,k} − zI)^{-1} b_k`,
/// where `W_{n,k}` drops row and column `k` and `b_k` is column `k`
/// without its diagonal entry.
pub fn schur_resolvent_trace(w: &HermitianMatrix, z: Complex64) -> Result<Complex64> {
    let n = w.n();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let y_k = if n == 1 {
            Complex64::new(0.0, 0.0)
        } else {
            let minor = w.minor_without(k);
            let b = w.column_without(k);
            let (y, residual) = shifted_solve(&minor, z, &b).ok_or(Error::ResolventSolveUnstable {
                minor: k,
                residual: f64::INFINITY,
            })?;
            if !(residual <= RESOLVENT_SOLVE_TOLERANCE) {
                return Err(Error::ResolventSolveUnstable { minor: k, residual });
            }
            crate::matrix::dot(&b, &y)
        };
        total += 1.0 / (w.get(k, k) - z - y_k);
    }
    Ok(total / n as f64)
}

/// `|schur_resolvent_trace(W, z) − s_n(z)|` with `s_n` from the spectrum.
pub fn schur_identity_residual(w: &HermitianMatrix, z: Complex64) -> Result<f64> {
    let rhs = schur_resolvent_trace(w, z)?;
    let s_n = stieltjes_empirical(&eigensolve::eigenvalues(w)?, z);
    Ok((rhs - s_n).norm())
}
