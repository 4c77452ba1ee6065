//! Entry laws and Wigner-type ensembles.
//!
//! An [`EnsembleSpec`] fixes the law of the upper-triangular entries of the
//! unnormalized matrix `M_n`: independent, mean zero, variance one off the
//! diagonal and variance `c` on it, optionally truncated to `|ζ| <= K`.

mod atom;

pub use atom::{
    match_order, AtomDistribution, AtomKind, ComplexPoint, Probability, RealPoint,
    MATCH_TOLERANCE, MAX_MOMENT_ORDER,
};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix, Provenance};
use crate::rng::entry_rng;

/// Tolerance on declared variances.
pub const VARIANCE_TOLERANCE: f64 = 1e-12;

/// Draws beyond this count fall back to radial clamping so a resample loop
/// always terminates.
pub const MAX_RESAMPLE_ATTEMPTS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    ComplexHermitian,
    RealSymmetric,
}

/// Truncation level `K`, either fixed or `factor * ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Fixed(f64),
    LogScaled { log_factor: f64 },
}

impl Bound {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Bound::Fixed(k) => k,
            Bound::LogScaled { log_factor } => log_factor * (n as f64).ln(),
        }
    }
}

/// How `|ζ_ij| <= K` is enforced. No re-standardization is applied after
/// clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    None,
    /// Radially project entries with `|ζ| > K` onto the circle of radius `K`.
    Clamp(Bound),
    /// Redraw from the entry's own stream until `|ζ| <= K`.
    Resample(Bound),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Resample(Bound::LogScaled { log_factor: 10.0 })
    }
}

impl Truncation {
    /// The resolved bound at dimension `n`, if any.
    pub fn level(&self, n: usize) -> Option<f64> {
        match self {
            Truncation::None => None,
            Truncation::Clamp(b) | Truncation::Resample(b) => Some(b.resolve(n)),
        }
    }

    /// Draws one entry under this policy.
    pub fn draw<R: Rng + ?Sized>(&self, atom: &AtomDistribution, n: usize, rng: &mut R) -> Complex64 {
        match *self {
            Truncation::None => atom.sample(rng),
            Truncation::Clamp(b) => clamp(atom.sample(rng), b.resolve(n)),
            Truncation::Resample(b) => {
                let k = b.resolve(n);
                let mut z = atom.sample(rng);
                let mut attempts = 1;
                while z.norm() > k {
                    if attempts == MAX_RESAMPLE_ATTEMPTS {
                        return clamp(z, k);
                    }
                    z = atom.sample(rng);
                    attempts += 1;
                }
                z
            }
        }
    }
}

fn clamp(z: Complex64, k: f64) -> Complex64 {
    let r = z.norm();
    if r <= k {
        return z;
    }
    let mut out = z * (k / r);
    // Rounding can leave |out| one ulp above k.
    while out.norm() > k {
        out *= 1.0 - f64::EPSILON;
    }
    out
}

/// A Wigner-type ensemble. Serialized as
/// `{name, symmetry, offdiag_atom, diag_atom, c, truncation}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnsembleSpec {
    name: String,
    symmetry: Symmetry,
    offdiag_atom: AtomDistribution,
    diag_atom: AtomDistribution,
    diag_variance_c: f64,
    truncation: Truncation,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(default = "custom_name")]
    name: String,
    symmetry: Symmetry,
    offdiag_atom: AtomDistribution,
    diag_atom: AtomDistribution,
    c: f64,
    #[serde(default)]
    truncation: Truncation,
}

fn custom_name() -> String {
    "custom".into()
}

impl TryFrom<RawSpec> for EnsembleSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        EnsembleSpec::new(r.name, r.symmetry, r.offdiag_atom, r.diag_atom, r.c, r.truncation)
    }
}

impl From<EnsembleSpec> for RawSpec {
    fn from(s: EnsembleSpec) -> Self {
        RawSpec {
            name: s.name,
            symmetry: s.symmetry,
            offdiag_atom: s.offdiag_atom,
            diag_atom: s.diag_atom,
            c: s.diag_variance_c,
            truncation: s.truncation,
        }
    }
}

impl EnsembleSpec {
    pub fn new(
        name: impl Into<String>,
        symmetry: Symmetry,
        offdiag_atom: AtomDistribution,
        diag_atom: AtomDistribution,
        diag_variance_c: f64,
        truncation: Truncation,
    ) -> Result<Self> {
        if !(diag_variance_c > 0.0) {
            return Err(Error::InvalidEnsemble("c must be positive".into()));
        }
        let v = offdiag_atom.variance();
        if (v - 1.0).abs() > VARIANCE_TOLERANCE {
            return Err(Error::InvalidEnsemble(format!(
                "off-diagonal variance is {v}, expected 1"
            )));
        }
        let v = diag_atom.variance();
        if (v - diag_variance_c).abs() > VARIANCE_TOLERANCE {
            return Err(Error::InvalidEnsemble(format!(
                "diagonal variance is {v}, expected c = {diag_variance_c}"
            )));
        }
        if !diag_atom.is_real() {
            return Err(Error::InvalidEnsemble("diagonal atom must be real".into()));
        }
        if symmetry == Symmetry::RealSymmetric && !offdiag_atom.is_real() {
            return Err(Error::InvalidEnsemble(
                "real symmetric ensembles need a real off-diagonal atom".into(),
            ));
        }
        if let Some(k) = match truncation {
            Truncation::None => None,
            Truncation::Clamp(b) | Truncation::Resample(b) => match b {
                Bound::Fixed(k) => Some(k),
                Bound::LogScaled { log_factor } => Some(log_factor),
            },
        } {
            if !(k > 0.0) {
                return Err(Error::InvalidEnsemble("truncation level must be positive".into()));
            }
        }
        Ok(EnsembleSpec {
            name: name.into(),
            symmetry,
            offdiag_atom,
            diag_atom,
            diag_variance_c,
            truncation,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn offdiag_atom(&self) -> &AtomDistribution {
        &self.offdiag_atom
    }

    pub fn diag_atom(&self) -> &AtomDistribution {
        &self.diag_atom
    }

    pub fn diag_variance_c(&self) -> f64 {
        self.diag_variance_c
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// True when both entry laws are continuous.
    pub fn is_continuous(&self) -> bool {
        !self.offdiag_atom.has_atoms() && !self.diag_atom.has_atoms()
    }

    /// Parses a builtin name or a JSON document.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            Ok(serde_json::from_str(t)?)
        } else {
            Ok(builtin_ensemble(t.parse()?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Gue,
    Goe,
    BernoulliComplex,
    BernoulliReal,
    ThreePointGueMatched,
    ThreePointGoeMatched,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::Gue,
        Builtin::Goe,
        Builtin::BernoulliComplex,
        Builtin::BernoulliReal,
        Builtin::ThreePointGueMatched,
        Builtin::ThreePointGoeMatched,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::Gue => "gue",
            Builtin::Goe => "goe",
            Builtin::BernoulliComplex => "bernoulli_complex",
            Builtin::BernoulliReal => "bernoulli_real",
            Builtin::ThreePointGueMatched => "three_point_gue_matched",
            Builtin::ThreePointGoeMatched => "three_point_goe_matched",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownEnsemble(s.to_string()))
    }
}

/// The named ensembles. GOE has `c = 2`, every other builtin `c = 1`; all
/// default to `Resample(10 ln n)` truncation.
pub fn builtin_ensemble(name: Builtin) -> EnsembleSpec {
    let half = 0.5_f64.sqrt();
    let (symmetry, off, diag, c) = match name {
        Builtin::Gue => (
            Symmetry::ComplexHermitian,
            AtomDistribution::complex_gaussian(0.5, 0.5, 0.0),
            AtomDistribution::real_gaussian(1.0),
            1.0,
        ),
        Builtin::Goe => (
            Symmetry::RealSymmetric,
            AtomDistribution::real_gaussian(1.0),
            AtomDistribution::real_gaussian(2.0),
            2.0,
        ),
        Builtin::BernoulliComplex => (
            Symmetry::ComplexHermitian,
            AtomDistribution::scaled_sum(&AtomDistribution::rademacher(1.0), half).unwrap(),
            AtomDistribution::rademacher(1.0),
            1.0,
        ),
        Builtin::BernoulliReal => (
            Symmetry::RealSymmetric,
            AtomDistribution::rademacher(1.0),
            AtomDistribution::rademacher(1.0),
            1.0,
        ),
        Builtin::ThreePointGueMatched => (
            Symmetry::ComplexHermitian,
            AtomDistribution::scaled_sum(&AtomDistribution::three_point(1.0), half).unwrap(),
            AtomDistribution::three_point(1.0),
            1.0,
        ),
        Builtin::ThreePointGoeMatched => (
            Symmetry::RealSymmetric,
            AtomDistribution::three_point(1.0),
            AtomDistribution::three_point(2.0_f64.sqrt()),
            2.0,
        ),
    };
    EnsembleSpec::new(name.as_str(), symmetry, off, diag, c, Truncation::default())
        .expect("builtin ensembles are valid")
}

/// Draws `M_n`. Entry `(i, j)`, `i <= j`, depends only on `(spec, n, seed, i, j)`.
pub fn sample_matrix(spec: &EnsembleSpec, n: usize, seed: u64) -> HermitianMatrix {
    assert!(n >= 1, "dimension must be positive");
    let trunc = spec.truncation;
    HermitianMatrix::from_upper(n, |i, j| {
        let mut rng = entry_rng(seed, i, j);
        if i == j {
            trunc.draw(&spec.diag_atom, n, &mut rng)
        } else {
            let z = trunc.draw(&spec.offdiag_atom, n, &mut rng);
            match spec.symmetry {
                Symmetry::RealSymmetric => Complex64::new(z.re, 0.0),
                Symmetry::ComplexHermitian => z,
            }
        }
    })
    .with_provenance(Provenance {
        ensemble: spec.name.clone(),
        seed,
    })
}
