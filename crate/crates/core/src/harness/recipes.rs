use serde::{Deserialize, Serialize};

use super::config::{IndexRule, Statistic};
use super::empirical::summarize;
use super::gfun::{GSpec, MAX_DERIVATIVE};
use super::runner::{gap_at, run_trials, RunOptions, TrialRecord};
use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};

/// One side of a two-ensemble comparison. Equal labels and master seeds give
/// equal trial seeds.
#[derive(Debug, Clone)]
pub struct Side {
    pub spec: EnsembleSpec,
    pub label: String,
    pub master_seed: u64,
}

impl Side {
    pub fn new(spec: EnsembleSpec, master_seed: u64) -> Self {
        Side {
            label: spec.name().to_string(),
            spec,
            master_seed,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Radius of the box on which derivative bounds of `G` are declared: every
/// eigenvalue of `A_n` lies in `[−3n, 3n]` except with overwhelming
/// probability.
pub fn a_scale_radius(n: usize) -> f64 {
    3.0 * n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourMomentResult {
    pub n: usize,
    pub trials: (usize, usize),
    pub mean_a: f64,
    pub mean_b: f64,
    /// `|E G(A) − E G(B)|` estimated by the sample means.
    pub diff: f64,
    /// `sqrt(var_a/m + var_b/n)`.
    pub mc_stderr: f64,
    /// Bounds on `sup |∇^j G|`, `j = 0..=5`, on the box of radius
    /// [`a_scale_radius`].
    pub derivative_bounds: [f64; MAX_DERIVATIVE + 1],
}

impl FourMomentResult {
    pub fn from_samples(a: &[f64], b: &[f64], g: &GSpec, n: usize) -> Result<Self> {
        if a.len() < 2 || b.len() < 2 {
            return Err(Error::InsufficientSamples {
                required: 2,
                got: a.len().min(b.len()),
            });
        }
        let (sa, sb) = (summarize(a), summarize(b));
        Ok(FourMomentResult {
            n,
            trials: (a.len(), b.len()),
            mean_a: sa.mean,
            mean_b: sb.mean,
            diff: (sa.mean - sb.mean).abs(),
            mc_stderr: (sa.variance / a.len() as f64 + sb.variance / b.len() as f64).sqrt(),
            derivative_bounds: g.derivative_bounds(n, a_scale_radius(n)),
        })
    }

    /// Whether every declared derivative bound is at most `n^{c0}`.
    pub fn derivatives_within(&self, c0: f64) -> bool {
        let cap = (self.n as f64).powf(c0);
        self.derivative_bounds.iter().all(|&b| b <= cap)
    }

    pub fn within(&self, stderr_multiple: f64) -> bool {
        self.diff <= stderr_multiple * self.mc_stderr
    }
}

fn scalar_column(records: &[TrialRecord], name: &str) -> Vec<f64> {
    records
        .iter()
        .filter_map(|r| r.stat(name).and_then(|v| v.first().copied()))
        .collect()
}

/// Monte Carlo estimate of `E G(λ_{i_1}(A_n), …) ` on both sides with the
/// resulting difference and its standard error.
pub fn four_moment_compare(
    a: &Side,
    b: &Side,
    n: usize,
    trials: usize,
    g: &GSpec,
    indices: &[IndexRule],
    opts: &RunOptions,
) -> Result<FourMomentResult> {
    g.validate(indices.len())?;
    let statistic = Statistic::FourMoment {
        g: g.clone(),
        indices: indices.to_vec(),
    };
    let ra = run_trials(&a.spec, &a.label, a.master_seed, n, trials, &statistic, opts)?;
    let rb = run_trials(&b.spec, &b.label, b.master_seed, n, trials, &statistic, opts)?;
    FourMomentResult::from_samples(&scalar_column(&ra, "g"), &scalar_column(&rb, "g"), g, n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTailResult {
    pub n: usize,
    pub index: usize,
    /// `n^{-c0}`.
    pub threshold: f64,
    pub frequency: f64,
    pub gaps: Vec<f64>,
}

/// Fraction of spectra (each sorted, `W` scale) whose `A`-scale gap at
/// `index` falls below `n^{-c0}`.
pub fn gap_tail_frequency(spectra: &[Vec<f64>], index: IndexRule, c0: f64) -> Result<GapTailResult> {
    let n = spectra
        .first()
        .map(Vec::len)
        .ok_or(Error::InsufficientSamples { required: 1, got: 0 })?;
    if n < 2 || spectra.iter().any(|s| s.len() != n) {
        return Err(Error::Contract("spectra must share a dimension >= 2".into()));
    }
    let i = index.resolve(n)?;
    let threshold = (n as f64).powf(-c0);
    let gaps: Vec<f64> = spectra.iter().map(|s| gap_at(s, i)).collect();
    let small = gaps.iter().filter(|&&g| g < threshold).count();
    Ok(GapTailResult {
        n,
        index: i,
        threshold,
        frequency: small as f64 / gaps.len() as f64,
        gaps,
    })
}

/// Samples `trials` matrices and measures [`gap_tail_frequency`].
pub fn gap_tail_experiment(
    side: &Side,
    n: usize,
    trials: usize,
    index: IndexRule,
    c0: f64,
    opts: &RunOptions,
) -> Result<GapTailResult> {
    let statistic = Statistic::GapAt { index, c0 };
    let records = run_trials(&side.spec, &side.label, side.master_seed, n, trials, &statistic, opts)?;
    let gaps = scalar_column(&records, "gap");
    let threshold = (n as f64).powf(-c0);
    let small = gaps.iter().filter(|&&g| g < threshold).count();
    Ok(GapTailResult {
        n,
        index: index.resolve(n)?,
        threshold,
        frequency: small as f64 / gaps.len().max(1) as f64,
        gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{builtin_ensemble, Builtin};

    #[test]
    fn zero_matrix_fixture_has_full_frequency() {
        let spectra = vec![vec![0.0; 6]; 4];
        let r = gap_tail_frequency(&spectra, IndexRule::Index(3), 0.1).unwrap();
        assert_eq!(r.frequency, 1.0);
        assert_eq!(r.index, 3);
    }

    #[test]
    fn well_separated_fixture_has_zero_frequency() {
        let spectra = vec![vec![-1.0, 0.0, 1.0]; 3];
        let r = gap_tail_frequency(&spectra, IndexRule::FromTop(0), 0.5).unwrap();
        assert_eq!(r.frequency, 0.0);
    }

    #[test]
    fn identical_sides_give_zero_difference() {
        let side = Side::new(builtin_ensemble(Builtin::Gue), 11);
        let g = GSpec::EdgeCoordinate { index: 0 };
        let r = four_moment_compare(&side, &side, 20, 8, &g, &[IndexRule::FromTop(0)], &RunOptions::default())
            .unwrap();
        assert_eq!(r.diff, 0.0);
        assert!(r.mc_stderr > 0.0);
    }
}
