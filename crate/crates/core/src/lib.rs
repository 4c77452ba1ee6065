//! Random-matrix statistics laboratory.
//!
//! Samples Wigner-type Hermitian ensembles, decomposes them with a
//! self-contained eigensolver and measures the local spectral statistics
//! (semicircle concentration, Stieltjes transforms, delocalization,
//! interlacing, gaps, edge fluctuations) through a reproducible Monte Carlo
//! harness.

pub mod eigensolve;
pub mod ensembles;
mod error;
pub mod harness;
mod interval;
pub mod local_stats;
pub mod matrix;
pub mod rng;
pub mod spectral;

pub use eigensolve::{eigen_full, eigenvalues, SpectralDecomposition, Tridiagonal};
pub use ensembles::{
    builtin_ensemble, match_order, sample_matrix, AtomDistribution, Builtin, EnsembleSpec,
    Symmetry, Truncation,
};
pub use error::{Error, Result};
pub use interval::Interval;
pub use matrix::HermitianMatrix;
pub use num_complex::Complex64;
