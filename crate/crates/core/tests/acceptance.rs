//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//! Master seeds are fixed, so every run sees the same samples.

use std::process::ExitCode;
use std::time::Instant;

use wignerlab::eigensolve::{count_in_interval, tridiagonalize};
use wignerlab::harness::{
    evaluate, four_moment_compare, ks_two_sample, run_experiment, run_trials, write_records_csv, EnsembleRef,
    EmpiricalDistribution, ExperimentConfig, GSpec, IndexRule, RunOptions, Side, Statistic, Thresholds,
};
use wignerlab::local_stats::{
    first_coordinate_residual, interlacing_check, interlacing_identity_residual_at, INTERLACING_TOLERANCE,
};
use wignerlab::spectral::{
    esd_deviation_sturm, schur_identity_residual, self_consistency_residual, semicircle_mass, stieltjes_sc,
    ComplexGrid,
};
use wignerlab::{builtin_ensemble, eigen_full, sample_matrix, Builtin, Complex64, Interval};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn opts() -> RunOptions {
    RunOptions::default()
}

fn wigner(b: Builtin, n: usize, seed: u64) -> wignerlab::HermitianMatrix {
    sample_matrix(&builtin_ensemble(b), n, seed).wigner_view()
}

fn identities() -> Outcome {
    let mut worst = [0.0f64; 3];
    let zs = [Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.1), Complex64::new(-2.1, 0.05)];
    for b in [Builtin::Gue, Builtin::Goe] {
        for n in [5, 20, 50] {
            for seed in 0..50 {
                let w = wigner(b, n, 1000 + seed);
                for i in [0, n / 2, n - 1] {
                    worst[0] = worst[0].max(interlacing_identity_residual_at(&w, i).unwrap());
                    worst[1] = worst[1].max(first_coordinate_residual(&w, i).unwrap());
                }
                for z in zs {
                    worst[2] = worst[2].max(schur_identity_residual(&w, z).unwrap());
                }
            }
        }
    }
    outcome(
        worst.iter().all(|&r| r <= 1e-8),
        format!(
            "max residuals: interlacing identity {:.2e}, first coordinate {:.2e}, Schur {:.2e} (tol 1e-8)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn interlacing() -> Outcome {
    let mut worst = 0.0f64;
    let mut all_hold = true;
    for b in Builtin::ALL {
        for n in [5, 50, 200] {
            for seed in 0..50 {
                let r = interlacing_check(&wigner(b, n, 2000 + seed)).unwrap();
                all_hold &= r.holds;
                worst = worst.max(r.max_violation);
            }
        }
    }
    outcome(
        all_hold && worst <= INTERLACING_TOLERANCE,
        format!("max violation {worst:.2e} over 6 builtins x 3 sizes x 50 seeds (tol 1e-9)"),
    )
}

fn eigensolver() -> Outcome {
    let mut cases: Vec<(Builtin, usize, u64)> = Vec::new();
    for b in [Builtin::Gue, Builtin::Goe] {
        for n in [5, 20, 50] {
            cases.extend((0..50).map(|s| (b, n, 1000 + s)));
        }
    }
    for b in Builtin::ALL {
        for n in [5, 50, 200] {
            cases.extend((0..50).map(|s| (b, n, 2000 + s)));
        }
    }
    let (mut res, mut gram) = (0.0f64, 0.0f64);
    let mut partitions_ok = true;
    for &(b, n, seed) in &cases {
        let w = wigner(b, n, seed);
        let d = eigen_full(&w).unwrap();
        res = res.max(d.residual());
        gram = gram.max(d.gram_error());
        let t = tridiagonalize(&w, false);
        let r = 2.0 * t.norm_inf() + 1.0;
        let cuts = [-r, -1.7, -1.0, -0.35, 0.0, 0.2, 0.9, 1.6, r];
        let total: usize = cuts
            .windows(2)
            .map(|c| count_in_interval(&t, Interval::new(c[0], c[1]).unwrap()))
            .sum();
        partitions_ok &= total == n;
    }
    outcome(
        res <= 1e-10 && gram <= 1e-10 && partitions_ok,
        format!(
            "{} matrices: max residual {res:.2e}, max Gram error {gram:.2e} (tol 1e-10); 8-piece Sturm partitions sum to n: {partitions_ok}",
            cases.len()
        ),
    )
}

fn stieltjes() -> Outcome {
    let grid: ComplexGrid = "-3:3:10,0.01:2:10".parse().unwrap();
    let sc = grid
        .points()
        .into_iter()
        .map(|z| self_consistency_residual(stieltjes_sc(z), z))
        .fold(0.0, f64::max);
    let cfg = ExperimentConfig {
        name: "stieltjes".into(),
        ensembles: vec![EnsembleRef::Name("gue".into())],
        n_values: vec![1000],
        trials: 10,
        master_seed: 4,
        statistic: Statistic::StieltjesGrid {
            grid: "-3:3:13,0.1:0.1:1".into(),
        },
        thresholds: Thresholds {
            max_deviation: Some(0.05),
            ..Thresholds::default()
        },
    };
    let s = evaluate(&run_experiment(&cfg, &opts()).unwrap()).unwrap();
    let v = &s.verdicts[0];
    outcome(
        sc <= 1e-12 && s.passed,
        format!(
            "self-consistency residual {sc:.2e} on 100 points (tol 1e-12); GUE n=1000 x 10: sup |s_n - s| = {:.4} (tol 0.05)",
            v.observed
        ),
    )
}

fn esd() -> Outcome {
    let interval = Interval::new(-1.0, 1.0).unwrap();
    let mass = semicircle_mass(interval);
    let cfg = ExperimentConfig {
        name: "esd".into(),
        ensembles: vec![EnsembleRef::Name("gue".into())],
        n_values: vec![2000],
        trials: 20,
        master_seed: 5,
        statistic: Statistic::Esd { interval, delta: 0.1 },
        thresholds: Thresholds {
            max_fraction_error: Some(0.02),
            ..Thresholds::default()
        },
    };
    let run = run_experiment(&cfg, &opts()).unwrap();
    let errs = run.values("gue", 2000, "esd_fraction_error", 0);
    let worst = errs.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let all = errs.len() == 20 && worst <= 0.02;
    // Independent check of one trial by a direct Sturm count.
    let r = &run.records[0];
    let t = tridiagonalize(&sample_matrix(&builtin_ensemble(Builtin::Gue), 2000, r.seed).wigner_view(), false);
    let direct = esd_deviation_sturm(&t, interval).count as f64;
    let consistent = direct == r.stat("esd_count").unwrap()[0];
    outcome(
        all && consistent,
        format!("GUE n=2000 x 20: mass {mass:.4}, max |N_I/n - mass| = {worst:.4} (tol 0.02)"),
    )
}

fn delocalization() -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for (b, seed) in [(Builtin::Gue, 6), (Builtin::BernoulliReal, 7)] {
        let cfg = ExperimentConfig {
            name: "deloc".into(),
            ensembles: vec![EnsembleRef::Name(b.as_str().into())],
            n_values: vec![500],
            trials: 100,
            master_seed: seed,
            statistic: Statistic::DelocSup,
            thresholds: Thresholds {
                constant: Some(10.0),
                min_pass_fraction: Some(0.99),
                ..Thresholds::default()
            },
        };
        let run = run_experiment(&cfg, &opts()).unwrap();
        let s = evaluate(&run).unwrap();
        passed &= s.passed && run.failures().count() == 0;
        let worst = run.values(b.as_str(), 500, "deloc_ratio", 0).into_iter().fold(0.0, f64::max);
        details.push(format!(
            "{b}: {:.0}/100 within, worst sup sqrt(n)/log n = {worst:.3}",
            s.verdicts[0].observed * 100.0
        ));
    }
    outcome(passed, format!("n=500, C=10, need >= 99/100: {}", details.join("; ")))
}

fn edge_bias() -> Outcome {
    let cfg = ExperimentConfig {
        name: "bias".into(),
        ensembles: vec![EnsembleRef::Name("gue".into())],
        n_values: vec![200],
        trials: 100,
        master_seed: 8,
        statistic: Statistic::InterlaceBias,
        thresholds: Thresholds {
            max_ratio: Some(0.2),
            ..Thresholds::default()
        },
    };
    let run = run_experiment(&cfg, &opts()).unwrap();
    let s = evaluate(&run).unwrap();
    let md = EmpiricalDistribution::new(run.values("gue", 200, "minor_distance", 0)).unwrap().median();
    let mg = EmpiricalDistribution::new(run.values("gue", 200, "top_gap", 0)).unwrap().median();
    outcome(
        s.passed,
        format!("GUE n=200 x 100: median minor distance {md:.5}, median top gap {mg:.5}, ratio {:.4} (max 0.2)", md / mg),
    )
}

fn edge_values(b: Builtin, master: u64) -> Vec<f64> {
    let spec = builtin_ensemble(b);
    run_trials(&spec, b.as_str(), master, 200, 500, &Statistic::EdgeTopK { k: 1 }, &opts())
        .unwrap()
        .iter()
        .map(|r| r.stat("edge_top").unwrap()[0])
        .collect()
}

fn edge_universality() -> Outcome {
    let gue = edge_values(Builtin::Gue, 42);
    let matched = edge_values(Builtin::ThreePointGueMatched, 42);
    let ks = ks_two_sample(&gue, &matched, 0.01).unwrap();
    let control = ks_two_sample(&gue, &edge_values(Builtin::BernoulliComplex, 42), 0.01).unwrap();
    outcome(
        !ks.reject,
        format!(
            "n=200 x 500: D = {:.4}, critical {:.4}, p = {:.3}, reject = {}; informational control vs bernoulli_complex: D = {:.4}, p = {:.3}, reject = {}",
            ks.statistic, ks.critical_value, ks.p_value, ks.reject, control.statistic, control.p_value, control.reject
        ),
    )
}

fn four_moment() -> Outcome {
    let g = GSpec::EdgeCoordinate { index: 0 };
    let top = [IndexRule::FromTop(0)];
    let gue = Side::new(builtin_ensemble(Builtin::Gue), 9);
    let same = four_moment_compare(&gue, &gue, 200, 50, &g, &top, &opts()).unwrap();
    let matched = Side::new(builtin_ensemble(Builtin::ThreePointGueMatched), 9);
    let r = four_moment_compare(&gue, &matched, 200, 500, &g, &top, &opts()).unwrap();
    outcome(
        same.diff == 0.0 && r.within(3.0),
        format!(
            "identical ensemble and seeds: diff = {}; GUE vs three_point_gue_matched n=200 x 500: diff {:.4}, stderr {:.4}, ratio {:.3} (max 3)",
            same.diff,
            r.diff,
            r.mc_stderr,
            r.diff / r.mc_stderr
        ),
    )
}

fn gap_tail() -> Outcome {
    let mut passed = true;
    let mut freqs = Vec::new();
    for (rule, name) in [
        (IndexRule::Fraction(0.5), "n/2"),
        (IndexRule::FromTop(1), "n-1"),
        (IndexRule::FromTop(0), "n"),
    ] {
        let cfg = ExperimentConfig {
            name: "gaps".into(),
            ensembles: vec![EnsembleRef::Name("gue".into())],
            n_values: vec![100],
            trials: 200,
            master_seed: 10,
            statistic: Statistic::GapAt { index: rule, c0: 0.5 },
            thresholds: Thresholds {
                max_frequency: Some(0.05),
                ..Thresholds::default()
            },
        };
        let s = evaluate(&run_experiment(&cfg, &opts()).unwrap()).unwrap();
        passed &= s.passed;
        freqs.push(format!("i={name}: {:.3}", s.verdicts[0].observed));
    }
    outcome(passed, format!("GUE n=100 x 200, gap < n^-0.5 frequency (max 0.05): {}", freqs.join(", ")))
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        name: "determinism".into(),
        ensembles: vec![
            EnsembleRef::Name("gue".into()),
            EnsembleRef::Name("three_point_gue_matched".into()),
        ],
        n_values: vec![30, 60],
        trials: 16,
        master_seed: 11,
        statistic: Statistic::EdgeTopK { k: 3 },
        thresholds: Thresholds::default(),
    };
    let csv = |threads: usize| {
        let run = run_experiment(
            &cfg,
            &RunOptions {
                threads: Some(threads),
                progress: false,
            },
        )
        .unwrap();
        let mut out = Vec::new();
        write_records_csv(&mut out, &run.records, false).unwrap();
        out
    };
    let reference = csv(1);
    let same = [1, 2, 4, 7].iter().all(|&t| csv(t) == reference);
    outcome(
        same,
        format!("{} CSV bytes identical across reruns with 1, 2, 4 and 7 threads: {same}", reference.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact identities", identities),
        ("interlacing", interlacing),
        ("eigensolver contract", eigensolver),
        ("Stieltjes transform", stieltjes),
        ("ESD concentration", esd),
        ("delocalization", delocalization),
        ("edge bias", edge_bias),
        ("edge universality", edge_universality),
        ("four moment comparison", four_moment),
        ("gap lower tail", gap_tail),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} [{:.1}s]: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
