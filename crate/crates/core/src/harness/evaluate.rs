use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::Statistic;
use super::empirical::{summarize, EmpiricalDistribution, Summary};
use super::ks::ks_two_sample;
use super::recipes::FourMomentResult;
use super::runner::{effective_entry_bound, ExperimentRun};
use crate::error::Result;
use crate::local_stats::INTERLACING_TOLERANCE;
use crate::spectral::semicircle_mass;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub ensemble: String,
    pub n: usize,
    pub stat_name: String,
    pub value_index: usize,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub observed: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureNote {
    pub ensemble: String,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub statistic: String,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    pub groups: Vec<GroupSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub four_moment: Vec<FourMomentResult>,
    pub failures: Vec<FailureNote>,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn verdict(criterion: String, observed: f64, threshold: f64, passed: bool) -> Verdict {
    Verdict {
        criterion,
        observed,
        threshold,
        passed,
    }
}

/// Fraction-of-trials verdict for a per-trial bound `value <= bound`.
fn fraction_verdict(name: String, values: &[f64], bound: impl Fn(f64) -> bool, min_fraction: f64) -> Verdict {
    let ok = values.iter().filter(|&&v| bound(v)).count();
    let frac = ok as f64 / values.len().max(1) as f64;
    verdict(name, frac, min_fraction, !values.is_empty() && frac >= min_fraction)
}

/// Per-group summaries and threshold verdicts. `passed` is false when any
/// verdict fails.
pub fn evaluate(run: &ExperimentRun) -> Result<ExperimentSummary> {
    let cfg = &run.config;
    let th = &cfg.thresholds;
    let min_fraction = th.min_pass_fraction.unwrap_or(1.0);
    let specs = cfg.resolved_ensembles()?;

    let mut columns: BTreeMap<(usize, usize, String, usize), Vec<f64>> = BTreeMap::new();
    let label_pos = |l: &str| run.labels.iter().position(|x| x == l).unwrap_or(usize::MAX);
    for r in run.records.iter().filter(|r| r.failure.is_none()) {
        for s in &r.stats {
            for (i, v) in s.values.iter().enumerate() {
                columns
                    .entry((label_pos(&r.ensemble), r.n, s.name.clone(), i))
                    .or_default()
                    .push(*v);
            }
        }
    }
    let groups = columns
        .iter()
        .map(|((e, n, name, i), v)| GroupSummary {
            ensemble: run.labels[*e].clone(),
            n: *n,
            stat_name: name.clone(),
            value_index: *i,
            summary: summarize(v),
        })
        .collect();

    let mut verdicts = Vec::new();
    let mut four_moment = Vec::new();
    for (spec, label) in specs.iter().zip(&run.labels) {
        for &n in &cfg.n_values {
            let nf = n as f64;
            let col = |name: &str| run.values(label, n, name, 0);
            let tag = |what: &str| format!("{label} n={n}: {what}");
            match &cfg.statistic {
                Statistic::Esd { interval, delta } => {
                    let bound = delta * nf * interval.width();
                    verdicts.push(fraction_verdict(
                        tag(&format!("fraction of trials with deviation <= delta n |I| = {bound}")),
                        &col("esd_deviation"),
                        |v| v <= bound,
                        min_fraction,
                    ));
                    if let Some(tol) = th.max_fraction_error {
                        verdicts.push(fraction_verdict(
                            tag(&format!(
                                "fraction of trials with |N_I/n - {:.6}| <= {tol}",
                                semicircle_mass(*interval)
                            )),
                            &col("esd_fraction_error"),
                            |v| v.abs() <= tol,
                            min_fraction,
                        ));
                    }
                }
                Statistic::DelocSup => {
                    if let Some(c) = th.constant {
                        let bound = c * nf.ln() / nf.sqrt();
                        verdicts.push(fraction_verdict(
                            tag(&format!("fraction of trials with sup <= {c} log n / sqrt n = {bound:.6}")),
                            &col("deloc_sup"),
                            |v| v <= bound,
                            min_fraction,
                        ));
                    }
                }
                Statistic::Projection { .. } => {
                    if let Some(c) = th.constant {
                        let k = effective_entry_bound(spec, n);
                        verdicts.push(fraction_verdict(
                            tag(&format!("fraction of trials with |norm - sqrt d| <= {c} K log n, K = {k:.4}")),
                            &col("projection_ratio"),
                            |v| v <= c,
                            min_fraction,
                        ));
                    }
                }
                Statistic::InterlaceBias => {
                    let worst = col("interlace_violation").into_iter().fold(0.0, f64::max);
                    verdicts.push(verdict(
                        tag("max interlacing violation"),
                        worst,
                        INTERLACING_TOLERANCE,
                        worst <= INTERLACING_TOLERANCE,
                    ));
                    if let Some(ratio) = th.max_ratio {
                        let md = EmpiricalDistribution::new(col("minor_distance"))?.median();
                        let mg = EmpiricalDistribution::new(col("top_gap"))?.median();
                        verdicts.push(verdict(
                            tag("median minor distance / median top gap"),
                            md / mg,
                            ratio,
                            md <= ratio * mg,
                        ));
                    }
                }
                Statistic::GapAt { .. } => {
                    if let Some(max) = th.max_frequency {
                        let small = col("gap_small");
                        let freq = small.iter().sum::<f64>() / small.len().max(1) as f64;
                        verdicts.push(verdict(tag("frequency of gap < n^-c0"), freq, max, freq <= max));
                    }
                }
                Statistic::Identities { .. } => {
                    if let Some(max) = th.max_residual {
                        for name in [
                            "schur_residual",
                            "interlacing_identity_residual",
                            "first_coordinate_residual",
                        ] {
                            let worst = col(name).into_iter().fold(0.0, f64::max);
                            verdicts.push(verdict(tag(&format!("max {name}")), worst, max, worst <= max));
                        }
                    }
                }
                Statistic::StieltjesGrid { .. } => {
                    if let Some(max) = th.max_deviation {
                        let worst = run
                            .group(label, n)
                            .filter_map(|r| r.stat("stieltjes_deviation"))
                            .flatten()
                            .fold(0.0f64, |a, &b| a.max(b));
                        verdicts.push(verdict(tag("sup |s_n - s| over grid and trials"), worst, max, worst <= max));
                    }
                }
                _ => {}
            }
        }
    }

    if run.labels.len() == 2 {
        let (la, lb) = (&run.labels[0], &run.labels[1]);
        for &n in &cfg.n_values {
            match &cfg.statistic {
                Statistic::EdgeTopK { k } | Statistic::EdgeBottomK { k } => {
                    if let Some(alpha) = th.alpha {
                        let name = if matches!(cfg.statistic, Statistic::EdgeTopK { .. }) {
                            "edge_top"
                        } else {
                            "edge_bottom"
                        };
                        for j in 0..*k {
                            let ks = ks_two_sample(
                                &run.values(la, n, name, j),
                                &run.values(lb, n, name, j),
                                alpha,
                            )?;
                            verdicts.push(verdict(
                                format!("{la} vs {lb} n={n}: KS D for {name}[{j}] (p = {:.4})", ks.p_value),
                                ks.statistic,
                                ks.critical_value,
                                !ks.reject,
                            ));
                        }
                    }
                }
                Statistic::FourMoment { g, .. } => {
                    let r = FourMomentResult::from_samples(
                        &run.values(la, n, "g", 0),
                        &run.values(lb, n, "g", 0),
                        g,
                        n,
                    )?;
                    if let Some(m) = th.stderr_multiple {
                        verdicts.push(verdict(
                            format!("{la} vs {lb} n={n}: |E G(A) - E G(B)| / stderr"),
                            r.diff / r.mc_stderr,
                            m,
                            r.within(m),
                        ));
                    }
                    four_moment.push(r);
                }
                _ => {}
            }
        }
    }

    let failures = run
        .failures()
        .map(|r| FailureNote {
            ensemble: r.ensemble.clone(),
            n: r.n,
            trial: r.trial,
            seed: r.seed,
            error: r.failure.clone().unwrap_or_default(),
        })
        .collect();
    Ok(ExperimentSummary {
        name: cfg.name.clone(),
        statistic: cfg.statistic.label().to_string(),
        passed: verdicts.iter().all(|v| v.passed),
        verdicts,
        groups,
        four_moment,
        failures,
    })
}
