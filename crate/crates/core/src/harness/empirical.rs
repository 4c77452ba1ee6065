use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted samples of a scalar statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Contract("empirical distribution with NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted: samples })
    }

    /// Pool several sample sets into one.
    pub fn pooled(parts: &[EmpiricalDistribution]) -> Self {
        let mut all: Vec<f64> = parts.iter().flat_map(|p| p.sorted.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        EmpiricalDistribution { sorted: all }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{x_i <= x}`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&s| s <= x)
    }

    /// Right-continuous ECDF.
    pub fn ecdf(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        self.count_le(x) as f64 / self.sorted.len() as f64
    }

    /// Linear interpolation between order statistics at position `(m−1)p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let m = self.sorted.len();
        if m == 0 || !(0.0..=1.0).contains(&p) {
            return f64::NAN;
        }
        let h = (m - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(m - 1);
        let frac = h - lo as f64;
        self.sorted[lo] + frac * (self.sorted[hi] - self.sorted[lo])
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn summary(&self) -> Summary {
        summarize(&self.sorted)
    }
}

pub const SUMMARY_QUANTILES: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased; zero for a single sample.
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Values at [`SUMMARY_QUANTILES`].
    pub quantiles: Vec<f64>,
}

impl Summary {
    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

pub fn summarize(samples: &[f64]) -> Summary {
    let count = samples.len();
    let mean = samples.iter().sum::<f64>() / count as f64;
    let variance = if count > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
    } else {
        0.0
    };
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let dist = EmpiricalDistribution { sorted };
    Summary {
        count,
        mean,
        variance,
        min: dist.sorted.first().copied().unwrap_or(f64::NAN),
        max: dist.sorted.last().copied().unwrap_or(f64::NAN),
        quantiles: SUMMARY_QUANTILES.iter().map(|&p| dist.quantile(p)).collect(),
    }
}
