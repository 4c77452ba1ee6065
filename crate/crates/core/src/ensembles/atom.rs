use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Highest total order `m + l` for which [`AtomDistribution::moment`] answers.
pub const MAX_MOMENT_ORDER: u32 = 8;

/// Agreement tolerance used by [`match_order`].
pub const MATCH_TOLERANCE: f64 = 1e-10;

/// Exact probability weight; serialized as `"p/q"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probability(pub Ratio<u64>);

impl Probability {
    pub fn new(numer: u64, denom: u64) -> Self {
        Probability(Ratio::new(numer, denom))
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ratio::<u64>::from_str(s.trim())
            .map(Probability)
            .map_err(|e| serde::de::Error::custom(format!("bad probability `{s}`: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPoint {
    pub value: f64,
    pub probability: Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
    pub probability: Probability,
}

/// The law of a single matrix entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomKind {
    RealGaussian {
        variance: f64,
    },
    /// Jointly Gaussian `(Re ζ, Im ζ)` with the given covariance matrix.
    ComplexGaussian {
        var_re: f64,
        var_im: f64,
        cov: f64,
    },
    DiscreteReal {
        points: Vec<RealPoint>,
    },
    DiscreteComplex {
        points: Vec<ComplexPoint>,
    },
    /// `scale * (ξ₁ + i ξ₂)` with `ξ₁, ξ₂` independent copies of a real base atom.
    ScaledSum {
        base: Box<AtomKind>,
        scale: f64,
    },
}

/// A validated atom: probabilities are exact and sum to one, and the mean
/// vanishes to `1e-12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomKind", into = "AtomKind")]
pub struct AtomDistribution {
    kind: AtomKind,
    /// Almost-sure bound on `|ζ|`; zero for unbounded laws.
    bound: f64,
}

impl TryFrom<AtomKind> for AtomDistribution {
    type Error = Error;
    fn try_from(kind: AtomKind) -> Result<Self> {
        AtomDistribution::new(kind)
    }
}

impl From<AtomDistribution> for AtomKind {
    fn from(a: AtomDistribution) -> Self {
        a.kind
    }
}

impl AtomDistribution {
    pub fn new(kind: AtomKind) -> Result<Self> {
        validate_kind(&kind)?;
        let atom = AtomDistribution {
            bound: kind_bound(&kind),
            kind,
        };
        let mean = Complex64::new(atom.moment(1, 0)?, atom.moment(0, 1)?);
        if mean.norm() > 1e-12 {
            return Err(Error::InvalidAtom(format!("mean {mean} is not zero")));
        }
        Ok(atom)
    }

    pub fn real_gaussian(variance: f64) -> Self {
        Self::new(AtomKind::RealGaussian { variance }).expect("valid gaussian")
    }

    pub fn complex_gaussian(var_re: f64, var_im: f64, cov: f64) -> Self {
        Self::new(AtomKind::ComplexGaussian {
            var_re,
            var_im,
            cov,
        })
        .expect("valid gaussian")
    }

    /// `±scale` with probability 1/2 each.
    pub fn rademacher(scale: f64) -> Self {
        Self::new(rademacher_kind(scale)).expect("valid rademacher")
    }

    /// `{±√3·scale w.p. 1/6, 0 w.p. 2/3}`: variance `scale²` and the first five
    /// moments of a Gaussian.
    pub fn three_point(scale: f64) -> Self {
        Self::new(three_point_kind(scale)).expect("valid three-point atom")
    }

    /// `scale * (ξ₁ + i ξ₂)` over independent copies of a real base.
    pub fn scaled_sum(base: &AtomDistribution, scale: f64) -> Result<Self> {
        Self::new(AtomKind::ScaledSum {
            base: Box::new(base.kind.clone()),
            scale,
        })
    }

    pub fn kind(&self) -> &AtomKind {
        &self.kind
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_real(&self) -> bool {
        kind_is_real(&self.kind)
    }

    pub fn has_atoms(&self) -> bool {
        kind_is_discrete(&self.kind)
    }

    /// `E[Re(ζ)^m Im(ζ)^l]`.
    pub fn moment(&self, m: u32, l: u32) -> Result<f64> {
        if m + l > MAX_MOMENT_ORDER {
            return Err(Error::MomentUnavailable(format!(
                "order {} exceeds the supported maximum {MAX_MOMENT_ORDER}",
                m + l
            )));
        }
        Ok(kind_moment(&self.kind, m, l))
    }

    /// `E|ζ|²`.
    pub fn variance(&self) -> f64 {
        kind_moment(&self.kind, 2, 0) + kind_moment(&self.kind, 0, 2)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        sample_kind(&self.kind, rng)
    }
}

/// Largest `k <= k_max` such that every mixed moment of total order at most
/// `k` agrees within [`MATCH_TOLERANCE`].
pub fn match_order(a: &AtomDistribution, b: &AtomDistribution, k_max: u32) -> Result<u32> {
    if k_max > MAX_MOMENT_ORDER {
        return Err(Error::MomentUnavailable(format!(
            "k_max {k_max} exceeds {MAX_MOMENT_ORDER}"
        )));
    }
    for k in 1..=k_max {
        for m in 0..=k {
            let l = k - m;
            if (a.moment(m, l)? - b.moment(m, l)?).abs() > MATCH_TOLERANCE {
                return Ok(k - 1);
            }
        }
    }
    Ok(k_max)
}

pub(crate) fn rademacher_kind(scale: f64) -> AtomKind {
    AtomKind::DiscreteReal {
        points: vec![
            RealPoint {
                value: scale,
                probability: Probability::new(1, 2),
            },
            RealPoint {
                value: -scale,
                probability: Probability::new(1, 2),
            },
        ],
    }
}

pub(crate) fn three_point_kind(scale: f64) -> AtomKind {
    let v = 3.0_f64.sqrt() * scale;
    AtomKind::DiscreteReal {
        points: vec![
            RealPoint {
                value: v,
                probability: Probability::new(1, 6),
            },
            RealPoint {
                value: -v,
                probability: Probability::new(1, 6),
            },
            RealPoint {
                value: 0.0,
                probability: Probability::new(2, 3),
            },
        ],
    }
}

fn check_probabilities<'a>(probs: impl Iterator<Item = &'a Probability>) -> Result<()> {
    let mut total = Ratio::new(0u64, 1);
    let mut count = 0;
    for p in probs {
        total += p.0;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidAtom("discrete atom has no points".into()));
    }
    if total != Ratio::new(1, 1) {
        return Err(Error::InvalidAtom(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

fn validate_kind(kind: &AtomKind) -> Result<()> {
    let finite = |x: f64, what: &str| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidAtom(format!("{what} is not finite")))
        }
    };
    match kind {
        AtomKind::RealGaussian { variance } => {
            finite(*variance, "variance")?;
            if *variance < 0.0 {
                return Err(Error::InvalidAtom("negative variance".into()));
            }
        }
        AtomKind::ComplexGaussian {
            var_re,
            var_im,
            cov,
        } => {
            finite(*var_re, "var_re")?;
            finite(*var_im, "var_im")?;
            finite(*cov, "cov")?;
            if *var_re < 0.0 || *var_im < 0.0 || cov * cov > var_re * var_im * (1.0 + 1e-12) {
                return Err(Error::InvalidAtom(
                    "covariance matrix is not positive semidefinite".into(),
                ));
            }
        }
        AtomKind::DiscreteReal { points } => {
            for p in points {
                finite(p.value, "point value")?;
            }
            check_probabilities(points.iter().map(|p| &p.probability))?;
        }
        AtomKind::DiscreteComplex { points } => {
            for p in points {
                finite(p.re, "point value")?;
                finite(p.im, "point value")?;
            }
            check_probabilities(points.iter().map(|p| &p.probability))?;
        }
        AtomKind::ScaledSum { base, scale } => {
            finite(*scale, "scale")?;
            if !kind_is_real(base) {
                return Err(Error::InvalidAtom("scaled_sum base must be real".into()));
            }
            validate_kind(base)?;
        }
    }
    Ok(())
}

fn kind_is_real(kind: &AtomKind) -> bool {
    match kind {
        AtomKind::RealGaussian { .. } | AtomKind::DiscreteReal { .. } => true,
        AtomKind::ComplexGaussian { var_im, cov, .. } => *var_im == 0.0 && *cov == 0.0,
        AtomKind::DiscreteComplex { points } => points.iter().all(|p| p.im == 0.0),
        AtomKind::ScaledSum { .. } => false,
    }
}

fn kind_is_discrete(kind: &AtomKind) -> bool {
    match kind {
        AtomKind::DiscreteReal { .. } | AtomKind::DiscreteComplex { .. } => true,
        AtomKind::ScaledSum { base, .. } => kind_is_discrete(base),
        _ => false,
    }
}

fn kind_bound(kind: &AtomKind) -> f64 {
    match kind {
        AtomKind::RealGaussian { .. } | AtomKind::ComplexGaussian { .. } => 0.0,
        AtomKind::DiscreteReal { points } => {
            points.iter().map(|p| p.value.abs()).fold(0.0, f64::max)
        }
        AtomKind::DiscreteComplex { points } => points
            .iter()
            .map(|p| Complex64::new(p.re, p.im).norm())
            .fold(0.0, f64::max),
        AtomKind::ScaledSum { base, scale } => {
            let b = kind_bound(base);
            (2.0_f64).sqrt() * b * scale.abs()
        }
    }
}

/// `(k - 1)!!` for even `k`, the `k`-th moment of a standard Gaussian; zero
/// for odd `k`.
fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    (1..k).step_by(2).map(|x| x as f64).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `E[X^m Y^l]` for a centered bivariate Gaussian by Isserlis' theorem:
/// sum over the number `j` of cross pairs.
fn bivariate_gaussian_moment(m: u32, l: u32, sxx: f64, syy: f64, sxy: f64) -> f64 {
    let mut total = 0.0;
    for j in 0..=m.min(l) {
        if !(m - j).is_multiple_of(2) || !(l - j).is_multiple_of(2) {
            continue;
        }
        let pairings = binomial(m, j)
            * binomial(l, j)
            * factorial(j)
            * gaussian_moment(m - j)
            * gaussian_moment(l - j);
        total += pairings
            * sxx.powi(((m - j) / 2) as i32)
            * syy.powi(((l - j) / 2) as i32)
            * sxy.powi(j as i32);
    }
    total
}

fn kind_moment(kind: &AtomKind, m: u32, l: u32) -> f64 {
    match kind {
        AtomKind::RealGaussian { variance } => {
            if l > 0 {
                0.0
            } else {
                gaussian_moment(m) * variance.powi(m as i32 / 2)
            }
        }
        AtomKind::ComplexGaussian {
            var_re,
            var_im,
            cov,
        } => bivariate_gaussian_moment(m, l, *var_re, *var_im, *cov),
        AtomKind::DiscreteReal { points } => {
            if l > 0 {
                return 0.0;
            }
            points
                .iter()
                .map(|p| p.probability.to_f64() * p.value.powi(m as i32))
                .sum()
        }
        AtomKind::DiscreteComplex { points } => points
            .iter()
            .map(|p| p.probability.to_f64() * p.re.powi(m as i32) * p.im.powi(l as i32))
            .sum(),
        AtomKind::ScaledSum { base, scale } => {
            scale.powi((m + l) as i32) * kind_moment(base, m, 0) * kind_moment(base, l, 0)
        }
    }
}

fn sample_discrete<R: Rng + ?Sized>(probs: impl Iterator<Item = Probability> + Clone, rng: &mut R) -> usize {
    let lcm = probs
        .clone()
        .fold(1u64, |acc, p| num_integer_lcm(acc, *p.0.denom()));
    let mut u = rng.random_range(0..lcm);
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        let w = *p.0.numer() * (lcm / *p.0.denom());
        if u < w {
            return i;
        }
        u -= w;
        last = i;
    }
    last
}

fn num_integer_lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

fn sample_kind<R: Rng + ?Sized>(kind: &AtomKind, rng: &mut R) -> Complex64 {
    match kind {
        AtomKind::RealGaussian { variance } => {
            let z: f64 = rng.sample(StandardNormal);
            Complex64::new(variance.sqrt() * z, 0.0)
        }
        AtomKind::ComplexGaussian {
            var_re,
            var_im,
            cov,
        } => {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            if *var_re > 0.0 {
                let sx = var_re.sqrt();
                let rho = cov / sx;
                let rest = (var_im - rho * rho).max(0.0).sqrt();
                Complex64::new(sx * z1, rho * z1 + rest * z2)
            } else {
                Complex64::new(0.0, var_im.sqrt() * z2)
            }
        }
        AtomKind::DiscreteReal { points } => {
            let i = sample_discrete(points.iter().map(|p| p.probability), rng);
            Complex64::new(points[i].value, 0.0)
        }
        AtomKind::DiscreteComplex { points } => {
            let i = sample_discrete(points.iter().map(|p| p.probability), rng);
            Complex64::new(points[i].re, points[i].im)
        }
        AtomKind::ScaledSum { base, scale } => {
            let a = sample_kind(base, rng).re;
            let b = sample_kind(base, rng).re;
            Complex64::new(scale * a, scale * b)
        }
    }
}
