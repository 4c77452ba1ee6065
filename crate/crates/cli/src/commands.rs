use std::io::Write;

use wignerlab::harness::{
    evaluate, run_experiment, EnsembleRef, ExperimentConfig, GSpec, RunOptions, Statistic, Thresholds,
};
use wignerlab::{eigen_full, eigenvalues, sample_matrix, EnsembleSpec, Error};

use crate::output::{emit, sink};
use crate::{Cli, Command, EnsembleArgs, Format, GlobalOpts, Scale, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::UnknownEnsemble(_)
            | Error::InvalidEnsemble(_)
            | Error::InvalidAtom(_)
            | Error::Contract(_) => CliError::usage(e.to_string()),
            _ => CliError::runtime(e.to_string()),
        }
    }
}

/// Accepts a builtin name, inline JSON, or a path to a JSON file.
fn ensemble_ref(text: &str) -> Result<EnsembleRef, CliError> {
    let path = std::path::Path::new(text);
    if !text.trim_start().starts_with('{') && path.is_file() {
        let body = std::fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{text}: {e}")))?;
        return Ok(EnsembleRef::Spec(EnsembleSpec::parse(&body)?));
    }
    let spec = EnsembleSpec::parse(text)?;
    Ok(if text.trim_start().starts_with('{') {
        EnsembleRef::Spec(spec)
    } else {
        EnsembleRef::Name(text.trim().to_string())
    })
}

fn ensemble_spec(text: &str) -> Result<EnsembleSpec, CliError> {
    Ok(ensemble_ref(text)?.resolve()?)
}

fn experiment(
    name: &str,
    ens: &EnsembleArgs,
    g: &GlobalOpts,
    statistic: Statistic,
    thresholds: Thresholds,
) -> Result<u8, CliError> {
    let ensembles = match (&ens.ensemble_a, &ens.ensemble_b) {
        (Some(a), Some(b)) => vec![ensemble_ref(a)?, ensemble_ref(b)?],
        _ => vec![ensemble_ref(&ens.ensemble)?],
    };
    let config = ExperimentConfig {
        name: name.to_string(),
        ensembles,
        n_values: ens.n.clone(),
        trials: ens.trials,
        master_seed: g.seed,
        statistic,
        thresholds: Thresholds {
            min_pass_fraction: ens.min_pass_fraction,
            ..thresholds
        },
    };
    run_config(&config, g)
}

fn run_config(config: &ExperimentConfig, g: &GlobalOpts) -> Result<u8, CliError> {
    config.validate()?;
    let opts = RunOptions {
        threads: g.threads,
        progress: g.progress,
    };
    let run = run_experiment(config, &opts)?;
    let summary = evaluate(&run)?;
    emit(&run, &summary, g)
}

fn parse_z(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("spectral parameter `{text}` is not re,im"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_g(text: &str) -> Result<GSpec, CliError> {
    match text.trim() {
        "edge" => Ok(GSpec::EdgeCoordinate { index: 0 }),
        "coordinate" => Ok(GSpec::Coordinate { index: 0 }),
        t => serde_json::from_str(t).map_err(|e| CliError::usage(format!("test function: {e}"))),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::runtime(e.to_string())
}

pub fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let g = &cli.global;
    if g.threads == Some(0) {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    match &cli.command {
        Command::Sample { ensemble, n, scale } => {
            if *n == 0 {
                return Err(CliError::usage("--n must be at least 1"));
            }
            let m = sample_matrix(&ensemble_spec(ensemble)?, *n, g.seed);
            let h = match scale {
                Scale::M => m,
                Scale::W => m.wigner_view(),
                Scale::A => m.amplified_view(),
            };
            let mut w = sink(g.out.as_deref())?;
            match g.format {
                Format::Csv => {
                    writeln!(w, "i,j,re,im").map_err(io_err)?;
                    for i in 0..*n {
                        for j in 0..*n {
                            let z = h.get(i, j);
                            writeln!(w, "{i},{j},{},{}", z.re, z.im).map_err(io_err)?;
                        }
                    }
                }
                Format::Json => {
                    let rows: Vec<Vec<[f64; 2]>> = (0..*n)
                        .map(|i| (0..*n).map(|j| [h.get(i, j).re, h.get(i, j).im]).collect())
                        .collect();
                    writeln!(w, "{}", serde_json::json!({ "n": n, "seed": g.seed, "entries": rows }))
                        .map_err(io_err)?;
                }
            }
            w.flush().map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { ensemble, n, vectors } => {
            if *n == 0 {
                return Err(CliError::usage("--n must be at least 1"));
            }
            let w_n = sample_matrix(&ensemble_spec(ensemble)?, *n, g.seed).wigner_view();
            let mut w = sink(g.out.as_deref())?;
            if *vectors {
                let d = eigen_full(&w_n)?;
                eprintln!("residual {:e} gram error {:e}", d.residual(), d.gram_error());
                match g.format {
                    Format::Csv => d.write_csv(&mut w).map_err(io_err)?,
                    Format::Json => {
                        let vecs: Vec<Vec<[f64; 2]>> = (0..*n)
                            .map(|j| d.vector(j).iter().map(|z| [z.re, z.im]).collect())
                            .collect();
                        let doc = serde_json::json!({
                            "eigenvalues": d.eigenvalues(),
                            "vectors": vecs,
                            "residual": d.residual(),
                        });
                        writeln!(w, "{doc}").map_err(io_err)?;
                    }
                }
            } else {
                let eigs = eigenvalues(&w_n)?;
                match g.format {
                    Format::Csv => {
                        writeln!(w, "index,eigenvalue").map_err(io_err)?;
                        for (i, l) in eigs.iter().enumerate() {
                            writeln!(w, "{},{l}", i + 1).map_err(io_err)?;
                        }
                    }
                    Format::Json => writeln!(w, "{}", serde_json::json!({ "eigenvalues": eigs })).map_err(io_err)?,
                }
            }
            w.flush().map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Esd {
            ens,
            interval,
            delta,
            max_fraction_error,
        } => experiment(
            "esd",
            ens,
            g,
            Statistic::Esd {
                interval: *interval,
                delta: *delta,
            },
            Thresholds {
                max_fraction_error: *max_fraction_error,
                ..Thresholds::default()
            },
        ),
        Command::Stieltjes {
            ens,
            grid,
            max_deviation,
        } => experiment(
            "stieltjes",
            ens,
            g,
            Statistic::StieltjesGrid { grid: grid.to_string() },
            Thresholds {
                max_deviation: *max_deviation,
                ..Thresholds::default()
            },
        ),
        Command::Deloc { ens, constant } => experiment(
            "deloc",
            ens,
            g,
            Statistic::DelocSup,
            Thresholds {
                constant: Some(*constant),
                ..Thresholds::default()
            },
        ),
        Command::Interlace { ens, max_ratio } => experiment(
            "interlace",
            ens,
            g,
            Statistic::InterlaceBias,
            Thresholds {
                max_ratio: Some(*max_ratio),
                ..Thresholds::default()
            },
        ),
        Command::Identities { ens, z, tolerance } => {
            let (z_re, z_im) = parse_z(z)?;
            experiment(
                "identities",
                ens,
                g,
                Statistic::Identities { z_re, z_im },
                Thresholds {
                    max_residual: Some(*tolerance),
                    ..Thresholds::default()
                },
            )
        }
        Command::Edge { ens, k, side, alpha } => {
            let statistic = match side {
                crate::SideArg::Top => Statistic::EdgeTopK { k: *k },
                crate::SideArg::Bottom => Statistic::EdgeBottomK { k: *k },
            };
            experiment(
                "edge",
                ens,
                g,
                statistic,
                Thresholds {
                    alpha: Some(*alpha),
                    ..Thresholds::default()
                },
            )
        }
        Command::Gaps {
            ens,
            index,
            c0,
            max_frequency,
        } => experiment(
            "gaps",
            ens,
            g,
            Statistic::GapAt { index: *index, c0: *c0 },
            Thresholds {
                max_frequency: Some(*max_frequency),
                ..Thresholds::default()
            },
        ),
        Command::Fourmoment {
            ens,
            g: gtext,
            indices,
            stderr_multiple,
        } => {
            if ens.ensemble_a.is_none() {
                return Err(CliError::usage("fourmoment needs --ensemble-a and --ensemble-b"));
            }
            experiment(
                "fourmoment",
                ens,
                g,
                Statistic::FourMoment {
                    g: parse_g(gtext)?,
                    indices: indices.clone(),
                },
                Thresholds {
                    stderr_multiple: Some(*stderr_multiple),
                    ..Thresholds::default()
                },
            )
        }
        Command::Run { config } => {
            let text = std::fs::read_to_string(config)
                .map_err(|e| CliError::usage(format!("{}: {e}", config.display())))?;
            run_config(&ExperimentConfig::from_json(&text)?, g)
        }
    }
}
