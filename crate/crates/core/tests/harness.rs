use proptest::prelude::*;

use wignerlab::harness::{
    evaluate, four_moment_compare, gap_tail_frequency, ks_two_sample, run_experiment, write_records_csv,
    EmpiricalDistribution, EnsembleRef, ExperimentConfig, GSpec, IndexRule, RunOptions, Side, Statistic,
    Thresholds,
};
use wignerlab::{builtin_ensemble, Builtin, Interval};

fn config(statistic: Statistic, ensembles: &[&str]) -> ExperimentConfig {
    ExperimentConfig {
        name: "test".into(),
        ensembles: ensembles.iter().map(|e| EnsembleRef::Name(e.to_string())).collect(),
        n_values: vec![16, 24],
        trials: 12,
        master_seed: 99,
        statistic,
        thresholds: Thresholds::default(),
    }
}

fn csv_with_threads(cfg: &ExperimentConfig, threads: usize) -> Vec<u8> {
    let run = run_experiment(
        cfg,
        &RunOptions {
            threads: Some(threads),
            progress: false,
        },
    )
    .unwrap();
    let mut out = Vec::new();
    write_records_csv(&mut out, &run.records, false).unwrap();
    out
}

#[test]
fn output_is_independent_of_thread_count() {
    for statistic in [
        Statistic::EdgeTopK { k: 3 },
        Statistic::DelocSup,
        Statistic::Esd {
            interval: Interval::new(-1.0, 1.0).unwrap(),
            delta: 0.2,
        },
        Statistic::StieltjesGrid {
            grid: "-2:2:5,0.1:0.5:2".into(),
        },
    ] {
        let cfg = config(statistic, &["gue", "bernoulli_complex"]);
        let one = csv_with_threads(&cfg, 1);
        assert_eq!(one, csv_with_threads(&cfg, 2));
        assert_eq!(one, csv_with_threads(&cfg, 5));
    }
}

#[test]
fn ks_of_a_sample_with_itself_is_zero() {
    let cfg = config(Statistic::EdgeTopK { k: 1 }, &["goe"]);
    let run = run_experiment(&cfg, &RunOptions::default()).unwrap();
    let a = run.values("goe", 16, "edge_top", 0);
    let r = ks_two_sample(&a, &a, 0.05).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert!(!r.reject);
}

#[test]
fn same_ensemble_and_seeds_give_zero_four_moment_difference() {
    let side = Side::new(builtin_ensemble(Builtin::BernoulliComplex), 4);
    let g = GSpec::Product {
        factors: vec![
            GSpec::Bump {
                index: 0,
                center: 0.0,
                width: 2.0,
                edge: true,
            },
            GSpec::Coordinate { index: 1 },
        ],
    };
    let r = four_moment_compare(
        &side,
        &side,
        25,
        10,
        &g,
        &[IndexRule::FromTop(1), IndexRule::FromTop(0)],
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(r.diff, 0.0);
    assert_eq!(r.mean_a, r.mean_b);
}

#[test]
fn repeated_ensemble_in_config_draws_new_samples() {
    let cfg = config(
        Statistic::FourMoment {
            g: GSpec::EdgeCoordinate { index: 0 },
            indices: vec![IndexRule::FromTop(0)],
        },
        &["gue", "gue"],
    );
    let run = run_experiment(&cfg, &RunOptions::default()).unwrap();
    let s = evaluate(&run).unwrap();
    assert_eq!(s.four_moment.len(), 2);
    assert!(s.four_moment.iter().all(|r| r.diff > 0.0));
}

#[test]
fn zero_gaps_give_full_tail_frequency() {
    let spectra = vec![vec![0.0; 10]; 5];
    for rule in [IndexRule::Fraction(0.5), IndexRule::FromTop(1), IndexRule::FromTop(0)] {
        assert_eq!(gap_tail_frequency(&spectra, rule, 0.2).unwrap().frequency, 1.0);
    }
}

#[test]
fn config_json_example_runs() {
    let text = r#"{
        "name": "interlace",
        "ensembles": ["three_point_goe_matched"],
        "n_values": [20],
        "trials": 10,
        "master_seed": 1,
        "statistic": {"kind": "interlace_bias"},
        "thresholds": {"max_ratio": 1.0}
    }"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let s = evaluate(&run_experiment(&cfg, &RunOptions::default()).unwrap()).unwrap();
    assert!(s.passed, "{:?}", s.verdicts);
    assert_eq!(s.verdicts.len(), 2);
}

proptest! {
    #[test]
    fn pooled_ecdf_is_the_mixture(
        a in prop::collection::vec(-10i32..10, 1..30),
        b in prop::collection::vec(-10i32..10, 1..30),
        x in -11i32..11,
    ) {
        let da = EmpiricalDistribution::new(a.iter().map(|&v| v as f64).collect()).unwrap();
        let db = EmpiricalDistribution::new(b.iter().map(|&v| v as f64).collect()).unwrap();
        let pooled = EmpiricalDistribution::pooled(&[da.clone(), db.clone()]);
        let x = x as f64;
        // Counts are integers, so the mixture identity holds exactly.
        prop_assert_eq!(pooled.count_le(x), da.count_le(x) + db.count_le(x));
        let mix = (da.len() as f64 * da.ecdf(x) + db.len() as f64 * db.ecdf(x)) / pooled.len() as f64;
        prop_assert!((pooled.ecdf(x) - mix).abs() < 1e-15);
    }

    #[test]
    fn ks_statistic_is_symmetric(
        a in prop::collection::vec(-5.0f64..5.0, 10..40),
        b in prop::collection::vec(-5.0f64..5.0, 10..40),
    ) {
        let ab = ks_two_sample(&a, &b, 0.05).unwrap();
        let ba = ks_two_sample(&b, &a, 0.05).unwrap();
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert!((0.0..=1.0).contains(&ab.statistic));
    }

    #[test]
    fn quantiles_are_monotone(v in prop::collection::vec(-100.0f64..100.0, 1..50), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let d = EmpiricalDistribution::new(v).unwrap();
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(d.quantile(lo) <= d.quantile(hi));
    }
}
