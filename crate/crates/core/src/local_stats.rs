//! Per-matrix local statistics.
//!
//! Identity checks remove the LAST row and column: `W_{n-1}` is the top-left
//! minor and `X` is the last column of `W_n` without its diagonal entry.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{eigen_full, eigenvalues, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::matrix::{dot, HermitianMatrix};

/// Interlacing tolerance, relative to `max(1, ‖W_n‖)`.
pub const INTERLACING_TOLERANCE: f64 = 1e-9;
/// Overlaps `|u_j^* X|` below this make the interlacing identity degenerate.
pub const DEGENERATE_OVERLAP: f64 = 1e-13;
/// Minimum spacing between `λ_i(A_n)` and the minor spectrum.
pub const COLLISION_SPACING: f64 = 1e-12;

/// `max_{i,j} |(u_i)_j|`.
pub fn delocalization_sup(decomp: &SpectralDecomposition) -> f64 {
    (0..decomp.n())
        .flat_map(|i| decomp.vector(i).iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapScale {
    /// Gaps of `W_n = M_n/√n`.
    W,
    /// Gaps of `A_n = √n M_n`, i.e. `n` times the `W` gaps.
    A,
}

/// Consecutive differences of sorted `W`-scale eigenvalues.
pub fn gaps(eigenvalues: &[f64], scale: GapScale) -> Vec<f64> {
    let factor = match scale {
        GapScale::W => 1.0,
        GapScale::A => eigenvalues.len() as f64,
    };
    eigenvalues
        .windows(2)
        .map(|w| (w[1] - w[0]) * factor)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub n: usize,
    pub holds: bool,
    pub max_violation: f64,
    /// Entry `i`: `λ_{i+1}(W_n) − λ_i(W_{n−1})`.
    pub upper_distances: Vec<f64>,
    /// Entry `i`: `λ_i(W_{n−1}) − λ_i(W_n)`.
    pub lower_distances: Vec<f64>,
    /// Eigenvalues of `W_n`.
    pub full: Vec<f64>,
    /// Eigenvalues of `W_{n−1}`.
    pub minor: Vec<f64>,
}

impl InterlacingReport {
    /// `λ_n(W_n) − λ_{n−1}(W_{n−1})`: distance from the top eigenvalue to the
    /// top of the minor.
    pub fn top_minor_distance(&self) -> f64 {
        self.upper_distances[self.n - 2]
    }

    /// `λ_n(W_n) − λ_{n−1}(W_n)`.
    pub fn top_gap(&self) -> f64 {
        self.full[self.n - 1] - self.full[self.n - 2]
    }
}

pub fn interlacing_from_spectra(full: Vec<f64>, minor: Vec<f64>) -> InterlacingReport {
    let n = full.len();
    assert_eq!(minor.len() + 1, n, "minor must have one fewer eigenvalue");
    let upper: Vec<f64> = (0..n - 1).map(|i| full[i + 1] - minor[i]).collect();
    let lower: Vec<f64> = (0..n - 1).map(|i| minor[i] - full[i]).collect();
    let max_violation = upper
        .iter()
        .chain(&lower)
        .fold(0.0_f64, |acc, &d| acc.max(-d));
    let norm = full.iter().map(|x| x.abs()).fold(1.0_f64, f64::max);
    InterlacingReport {
        n,
        holds: max_violation <= INTERLACING_TOLERANCE * norm,
        max_violation,
        upper_distances: upper,
        lower_distances: lower,
        full,
        minor,
    }
}

/// Decomposes `W_n` and its top-left minor and checks
/// `λ_i(W_n) <= λ_i(W_{n−1}) <= λ_{i+1}(W_n)`.
pub fn interlacing_check(w: &HermitianMatrix) -> Result<InterlacingReport> {
    if w.n() < 2 {
        return Err(Error::Contract("interlacing needs n >= 2".into()));
    }
    let full = eigenvalues(w)?;
    let minor = eigenvalues(&w.minor_without(w.n() - 1))?;
    Ok(interlacing_from_spectra(full, minor))
}

fn minor_overlaps(h: &HermitianMatrix) -> Result<(SpectralDecomposition, Vec<f64>)> {
    let last = h.n() - 1;
    let minor = eigen_full(&h.minor_without(last))?;
    let x = h.column_without(last);
    let overlaps = (0..minor.n())
        .map(|j| dot(minor.vector(j), &x).norm())
        .collect();
    Ok((minor, overlaps))
}

/// `|Σ_j |u_j(W_{n−1})^* X|² / (λ_j(W_{n−1}) − λ) − (w_nn − λ)|` with
/// `λ = λ_index(W_n)`.
pub fn interlacing_identity_residual_at(w: &HermitianMatrix, index: usize) -> Result<f64> {
    let n = w.n();
    if n < 2 || index >= n {
        return Err(Error::Contract(format!(
            "interlacing identity needs n >= 2 and index < n (n = {n}, index = {index})"
        )));
    }
    let lambda = eigenvalues(w)?[index];
    let (minor, overlaps) = minor_overlaps(w)?;
    if let Some((j, &o)) = overlaps
        .iter()
        .enumerate()
        .find(|(_, &o)| o < DEGENERATE_OVERLAP)
    {
        return Err(Error::IdentityDegenerate { index: j, overlap: o });
    }
    let lhs: f64 = minor
        .eigenvalues()
        .iter()
        .zip(&overlaps)
        .map(|(&mu, &o)| o * o / (mu - lambda))
        .sum();
    let rhs = w.get(n - 1, n - 1).re - lambda;
    Ok((lhs - rhs).abs())
}

/// The interlacing identity at the top eigenvalue `λ_n(W_n)`.
pub fn interlacing_identity_residual(w: &HermitianMatrix) -> Result<f64> {
    interlacing_identity_residual_at(w, w.n().saturating_sub(1))
}

/// `| |x|² − 1/(1 + Σ_j |u_j(A_{n−1})^* X|² / (λ_j(A_{n−1}) − λ_i(A_n))²) |`
/// where `x` is the last coordinate of the unit eigenvector `u_i(A_n)`.
pub fn first_coordinate_residual(h: &HermitianMatrix, index: usize) -> Result<f64> {
    let n = h.n();
    if n < 2 || index >= n {
        return Err(Error::Contract(format!(
            "eigenvector coordinate identity needs n >= 2 and index < n (n = {n}, index = {index})"
        )));
    }
    let full = eigen_full(h)?;
    let lambda = full.eigenvalues()[index];
    let direct = full.vector(index)[n - 1].norm_sqr();
    let (minor, overlaps) = minor_overlaps(h)?;
    let scale = h.max_abs().max(1.0);
    let mut sum = 0.0;
    for (j, (&mu, &o)) in minor.eigenvalues().iter().zip(&overlaps).enumerate() {
        let spacing = (mu - lambda).abs();
        if spacing <= COLLISION_SPACING * scale {
            return Err(Error::EigenvalueCollision { index: j, spacing });
        }
        sum += o * o / (spacing * spacing);
    }
    Ok((direct - 1.0 / (1.0 + sum)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionStatistic {
    /// `‖π_H X‖`.
    pub norm: f64,
    /// `‖π_H X‖ − √d`.
    pub centered: f64,
    pub dimension: usize,
}

/// Projection of `X` onto the span of the selected eigenvectors.
pub fn projection_statistic(
    decomp: &SpectralDecomposition,
    x: &[Complex64],
    index_set: &[usize],
) -> Result<ProjectionStatistic> {
    if let Some(&bad) = index_set.iter().find(|&&j| j >= decomp.n()) {
        return Err(Error::Contract(format!(
            "projection index {bad} outside 0..{}",
            decomp.n()
        )));
    }
    let norm = index_set
        .iter()
        .map(|&j| dot(decomp.vector(j), x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let d = index_set.len();
    Ok(ProjectionStatistic {
        norm,
        centered: norm - (d as f64).sqrt(),
        dimension: d,
    })
}

/// Projection of the last column of the unnormalized `M_n` (unit-variance
/// entries) onto `d` consecutive eigenvectors from the middle of the minor's
/// spectrum.
pub fn column_projection(m: &HermitianMatrix, d: usize) -> Result<ProjectionStatistic> {
    let n = m.n();
    if n < 2 || d > n - 1 {
        return Err(Error::Contract(format!(
            "projection dimension {d} exceeds minor size {}",
            n.saturating_sub(1)
        )));
    }
    let minor = eigen_full(&m.minor_without(n - 1))?;
    let x = m.column_without(n - 1);
    let start = (n - 1 - d) / 2;
    let set: Vec<usize> = (start..start + d).collect();
    projection_statistic(&minor, &x, &set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSide {
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatistic {
    pub k: usize,
    pub side: EdgeSide,
    /// Top: entry `j` is `(λ_{n−j}(W_n) − 2) n^{2/3}`. Bottom: entry `j` is
    /// `(−λ_{j+1}(W_n) − 2) n^{2/3}`, the mirror image, so both sides are
    /// nonincreasing and directly comparable.
    pub values: Vec<f64>,
}

pub fn edge_rescale(eigenvalues: &[f64], k: usize, side: EdgeSide) -> Result<EdgeStatistic> {
    let n = eigenvalues.len();
    if k > n {
        return Err(Error::Contract(format!("k = {k} exceeds n = {n}")));
    }
    let scale = (n as f64).powf(2.0 / 3.0);
    let values = (0..k)
        .map(|j| match side {
            EdgeSide::Top => (eigenvalues[n - 1 - j] - 2.0) * scale,
            EdgeSide::Bottom => (-eigenvalues[j] - 2.0) * scale,
        })
        .collect();
    Ok(EdgeStatistic { k, side, values })
}
