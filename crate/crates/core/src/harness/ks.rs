use serde::{Deserialize, Serialize};

use super::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

/// Fewest samples per side for which the asymptotic critical value is used.
pub const MIN_KS_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub p_value: f64,
    pub reject: bool,
    pub sizes: (usize, usize),
}

/// `c(α) = sqrt(−ln(α/2)/2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Asymptotic Kolmogorov tail `2 Σ (−1)^{k−1} exp(−2k²λ²)`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test. `D` is exact; the critical value
/// `c(α) sqrt((m+n)/(mn))` is asymptotic.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if a.len() < MIN_KS_SAMPLES || b.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_KS_SAMPLES,
            got: a.len().min(b.len()),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Contract(format!("KS level {alpha} outside (0, 1)")));
    }
    let da = EmpiricalDistribution::new(a.to_vec())?;
    let db = EmpiricalDistribution::new(b.to_vec())?;
    let (xa, xb) = (da.samples(), db.samples());
    let (m, n) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < m && j < n {
        let x = xa[i].min(xb[j]);
        while i < m && xa[i] <= x {
            i += 1;
        }
        while j < n && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / m as f64 - j as f64 / n as f64).abs());
    }
    let (mf, nf) = (m as f64, n as f64);
    let critical_value = ks_coefficient(alpha) * ((mf + nf) / (mf * nf)).sqrt();
    let ne = (mf * nf / (mf + nf)).sqrt();
    let p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
    Ok(KsResult {
        statistic: d,
        critical_value,
        alpha,
        p_value,
        reject: d > critical_value,
        sizes: (m, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values() {
        assert!((ks_coefficient(0.05) - 1.358).abs() < 1e-3);
        assert!((ks_coefficient(0.01) - 1.628).abs() < 1e-3);
    }

    #[test]
    fn identical_samples() {
        let a: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let r = ks_two_sample(&a, &a, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn disjoint_samples() {
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| 100.0 + i as f64).collect();
        let r = ks_two_sample(&a, &b, 0.05).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.reject);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn exact_statistic_with_ties() {
        let a = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        let b = [2.0, 2.0, 2.0, 2.0, 2.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        // At x = 2: F_a = 0.3, F_b = 0.5.
        // At x = 5: F_a = 0.6, F_b = 0.5.
        let r = ks_two_sample(&a, &b, 0.05).unwrap();
        assert!((r.statistic - 0.2).abs() < 1e-15);
    }

    #[test]
    fn too_few_samples() {
        let a = [0.0; 9];
        assert!(matches!(
            ks_two_sample(&a, &a, 0.05),
            Err(Error::InsufficientSamples { required: 10, got: 9 })
        ));
    }
}
