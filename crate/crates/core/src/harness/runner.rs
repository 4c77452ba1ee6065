use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{ExperimentConfig, IndexRule, Statistic};
use crate::eigensolve::{self, tridiagonalize};
use crate::ensembles::{sample_matrix, EnsembleSpec};
use crate::error::{Error, Result};
use crate::local_stats::{self, EdgeSide, GapScale};
use crate::rng::trial_seed;
use crate::spectral::{self, ComplexGrid};

/// One named statistic produced by a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Stat {
    pub name: String,
    pub values: Vec<f64>,
}

impl Stat {
    fn new(name: &str, values: Vec<f64>) -> Self {
        Stat {
            name: name.to_string(),
            values,
        }
    }

    fn scalar(name: &str, value: f64) -> Self {
        Stat::new(name, vec![value])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub ensemble: String,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    /// Empty when the trial failed.
    pub stats: Vec<Stat>,
    pub failure: Option<String>,
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn stat(&self, name: &str) -> Option<&[f64]> {
        self.stats.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Print a per-trial counter on stderr.
    pub progress: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    /// Trial-seed label of each configured ensemble, in config order.
    pub labels: Vec<String>,
    /// Sorted by (ensemble in config order, n, trial).
    pub records: Vec<TrialRecord>,
}

impl ExperimentRun {
    /// Successful records of one ensemble at one dimension.
    pub fn group<'a>(&'a self, label: &'a str, n: usize) -> impl Iterator<Item = &'a TrialRecord> + 'a {
        self.records
            .iter()
            .filter(move |r| r.ensemble == label && r.n == n && r.failure.is_none())
    }

    /// Coordinate `index` of statistic `name` over a group.
    pub fn values(&self, label: &str, n: usize, name: &str, index: usize) -> Vec<f64> {
        self.group(label, n)
            .filter_map(|r| r.stat(name).and_then(|v| v.get(index).copied()))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| r.failure.is_some())
    }
}

/// Largest `K` with `|ζ| <= K` for every entry at dimension `n`.
pub fn effective_entry_bound(spec: &EnsembleSpec, n: usize) -> f64 {
    let atoms = spec.offdiag_atom().bound().max(spec.diag_atom().bound());
    match spec.truncation().level(n) {
        Some(level) => atoms.min(level),
        None => atoms,
    }
}

/// `A`-scale gap at 1-based index `i` of the `W`-scale spectrum:
/// `λ_{i+1} − λ_i`, and the top gap `λ_n − λ_{n−1}` for `i = n`.
pub fn gap_at(eigenvalues_w: &[f64], i: usize) -> f64 {
    let n = eigenvalues_w.len();
    let g = local_stats::gaps(eigenvalues_w, GapScale::A);
    if i < n {
        g[i - 1]
    } else {
        g[n - 2]
    }
}

fn resolve_indices(indices: &[IndexRule], n: usize) -> Result<Vec<usize>> {
    indices.iter().map(|r| r.resolve(n)).collect()
}

/// Computes the statistic on one sampled matrix.
pub fn compute_trial(
    statistic: &Statistic,
    grid: Option<&ComplexGrid>,
    spec: &EnsembleSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<Stat>> {
    let m = sample_matrix(spec, n, seed);
    let w = m.wigner_view();
    let nf = n as f64;
    let stats = match statistic {
        Statistic::EdgeTopK { k } | Statistic::EdgeBottomK { k } => {
            let side = if matches!(statistic, Statistic::EdgeTopK { .. }) {
                EdgeSide::Top
            } else {
                EdgeSide::Bottom
            };
            let e = local_stats::edge_rescale(&eigensolve::eigenvalues(&w)?, *k, side)?;
            let name = match side {
                EdgeSide::Top => "edge_top",
                EdgeSide::Bottom => "edge_bottom",
            };
            vec![Stat::new(name, e.values)]
        }
        Statistic::GapAt { index, c0 } => {
            let i = index.resolve(n)?;
            let gap = gap_at(&eigensolve::eigenvalues(&w)?, i);
            let small = if gap < nf.powf(-c0) { 1.0 } else { 0.0 };
            vec![Stat::scalar("gap", gap), Stat::scalar("gap_small", small)]
        }
        Statistic::Esd { interval, .. } => {
            let t = tridiagonalize(&w, false);
            let e = spectral::esd_deviation_sturm(&t, *interval);
            vec![
                Stat::scalar("esd_count", e.count as f64),
                Stat::scalar("esd_fraction_error", e.fraction_error(n)),
                Stat::scalar("esd_deviation", e.deviation),
            ]
        }
        Statistic::DelocSup => {
            let sup = local_stats::delocalization_sup(&eigensolve::eigen_full(&w)?);
            vec![
                Stat::scalar("deloc_sup", sup),
                Stat::scalar("deloc_ratio", sup * nf.sqrt() / nf.ln()),
            ]
        }
        Statistic::StieltjesGrid { .. } => {
            let grid = grid.ok_or_else(|| Error::Config("missing Stieltjes grid".into()))?;
            let scan = spectral::stieltjes_scan(&eigensolve::eigenvalues(&w)?, grid);
            vec![Stat::new(
                "stieltjes_deviation",
                scan.iter().map(|s| s.deviation).collect(),
            )]
        }
        Statistic::InterlaceBias => {
            let r = local_stats::interlacing_check(&w)?;
            vec![
                Stat::scalar("minor_distance", r.top_minor_distance()),
                Stat::scalar("top_gap", r.top_gap()),
                Stat::scalar("interlace_violation", r.max_violation),
            ]
        }
        Statistic::Projection { d } => {
            let p = local_stats::column_projection(&m, *d)?;
            let k = effective_entry_bound(spec, n);
            vec![
                Stat::scalar("projection_norm", p.norm),
                Stat::scalar("projection_centered", p.centered),
                Stat::scalar("projection_ratio", p.centered.abs() / (k * nf.ln())),
            ]
        }
        Statistic::FourMoment { g, indices } => {
            let eigs = eigensolve::eigenvalues(&w)?;
            let x: Vec<f64> = resolve_indices(indices, n)?
                .into_iter()
                .map(|i| eigs[i - 1] * nf)
                .collect();
            vec![Stat::scalar("g", g.eval(&x, n))]
        }
        Statistic::Identities { z_re, z_im } => {
            let z = crate::Complex64::new(*z_re, *z_im);
            vec![
                Stat::scalar("schur_residual", spectral::schur_identity_residual(&w, z)?),
                Stat::scalar(
                    "interlacing_identity_residual",
                    local_stats::interlacing_identity_residual(&w)?,
                ),
                Stat::scalar(
                    "first_coordinate_residual",
                    local_stats::first_coordinate_residual(&w, n - 1)?,
                ),
            ]
        }
    };
    Ok(stats)
}

struct Job<'a> {
    spec: &'a EnsembleSpec,
    label: &'a str,
    n: usize,
    trial: usize,
    seed: u64,
}

fn execute(
    jobs: &[Job<'_>],
    statistic: &Statistic,
    grid: Option<&ComplexGrid>,
    opts: &RunOptions,
) -> Result<Vec<TrialRecord>> {
    let total = jobs.len();
    let done = AtomicUsize::new(0);
    let run_one = |job: &Job<'_>| {
        let start = Instant::now();
        let outcome = compute_trial(statistic, grid, job.spec, job.n, job.seed);
        let wall_time = start.elapsed();
        if opts.progress {
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            eprintln!("trial {k}/{total}");
        }
        let (stats, failure) = match outcome {
            Ok(stats) => (stats, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        TrialRecord {
            ensemble: job.label.to_string(),
            n: job.n,
            trial: job.trial,
            seed: job.seed,
            stats,
            failure,
            wall_time,
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| jobs.par_iter().map(run_one).collect());
    if !records.is_empty() && records.iter().all(|r| r.failure.is_some()) {
        return Err(Error::AllTrialsFailed {
            trials: records.len(),
            first: records[0].failure.clone().unwrap_or_default(),
        });
    }
    Ok(records)
}

/// Runs every (ensemble, n, trial) of the configuration. Trial seeds depend
/// only on the master seed, ensemble label, `n` and trial index, so output is
/// independent of the thread count. Per-trial failures are recorded; the run
/// fails only if every trial does.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentRun> {
    config.validate()?;
    let specs = config.resolved_ensembles()?;
    let labels = config.labels()?;
    let grid = config.statistic.grid()?;
    let mut jobs = Vec::new();
    for (spec, label) in specs.iter().zip(&labels) {
        for &n in &config.n_values {
            for trial in 0..config.trials {
                jobs.push(Job {
                    spec,
                    label,
                    n,
                    trial,
                    seed: trial_seed(config.master_seed, label, n, trial),
                });
            }
        }
    }
    let records = execute(&jobs, &config.statistic, grid.as_ref(), opts)?;
    Ok(ExperimentRun {
        config: config.clone(),
        labels,
        records,
    })
}

/// Trials of one ensemble under an explicit seed label, outside a config.
pub fn run_trials(
    spec: &EnsembleSpec,
    label: &str,
    master_seed: u64,
    n: usize,
    trials: usize,
    statistic: &Statistic,
    opts: &RunOptions,
) -> Result<Vec<TrialRecord>> {
    let grid = statistic.grid()?;
    let jobs: Vec<Job<'_>> = (0..trials)
        .map(|trial| Job {
            spec,
            label,
            n,
            trial,
            seed: trial_seed(master_seed, label, n, trial),
        })
        .collect();
    execute(&jobs, statistic, grid.as_ref(), opts)
}

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub const CSV_HEADER: &str = "ensemble,n,trial,seed,stat_name,value_index,value,wall_ms";

/// Long-format CSV, one row per statistic coordinate. `wall_ms` is written as
/// 0 unless `timing` is set, so untimed output is byte-reproducible.
pub fn write_records_csv<W: Write>(mut w: W, records: &[TrialRecord], timing: bool) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let ms = if timing {
            r.wall_time.as_secs_f64() * 1e3
        } else {
            0.0
        };
        for s in &r.stats {
            for (i, v) in s.values.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.ensemble,
                    r.n,
                    r.trial,
                    r.seed,
                    s.name,
                    i,
                    format_value(*v),
                    format_value(ms)
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::EnsembleRef;
    use crate::harness::Thresholds;

    fn config(statistic: Statistic) -> ExperimentConfig {
        ExperimentConfig {
            name: "t".into(),
            ensembles: vec![EnsembleRef::Name("gue".into())],
            n_values: vec![8, 12],
            trials: 3,
            master_seed: 5,
            statistic,
            thresholds: Thresholds::default(),
        }
    }

    #[test]
    fn records_are_ordered_and_seeded() {
        let run = run_experiment(&config(Statistic::DelocSup), &RunOptions::default()).unwrap();
        assert_eq!(run.records.len(), 6);
        let keys: Vec<(usize, usize)> = run.records.iter().map(|r| (r.n, r.trial)).collect();
        assert_eq!(keys, vec![(8, 0), (8, 1), (8, 2), (12, 0), (12, 1), (12, 2)]);
        assert_eq!(run.records[4].seed, trial_seed(5, "gue", 12, 1));
    }

    #[test]
    fn value_formatting_roundtrips() {
        for v in [0.0, 1.5, -2.25e-13, 3.0e20, 0.1, 183.0, f64::MIN_POSITIVE] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(2.5e-10), "2.5e-10");
        assert_eq!(format_value(183.0), "183");
    }

    #[test]
    fn gap_at_top_uses_last_gap() {
        let eigs = [0.0, 0.1, 0.3];
        assert!((gap_at(&eigs, 3) - 0.6).abs() < 1e-12);
        assert!((gap_at(&eigs, 1) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn csv_untimed_has_zero_wall() {
        let run = run_experiment(&config(Statistic::EdgeTopK { k: 2 }), &RunOptions::default()).unwrap();
        let mut out = Vec::new();
        write_records_csv(&mut out, &run.records, false).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 6 * 2);
        assert!(lines[1].starts_with("gue,8,0,"));
        assert!(lines[1].contains(",edge_top,0,"));
        assert!(lines[1].ends_with(",0"));
    }

    #[test]
    fn two_sample_statistic_needs_two_ensembles() {
        let cfg = config(Statistic::FourMoment {
            g: crate::harness::GSpec::Coordinate { index: 0 },
            indices: vec![IndexRule::FromTop(0)],
        });
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn repeated_ensemble_gets_distinct_label() {
        let mut cfg = config(Statistic::DelocSup);
        cfg.ensembles.push(EnsembleRef::Name("gue".into()));
        assert_eq!(cfg.labels().unwrap(), vec!["gue".to_string(), "gue#2".to_string()]);
    }
}
