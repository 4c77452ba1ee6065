use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use wignerlab::harness::{format_value, write_records_csv, ExperimentRun, ExperimentSummary};

use crate::commands::CliError;
use crate::{Format, GlobalOpts, EXIT_OK, EXIT_THRESHOLD};

/// Where the primary output goes.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::runtime(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.json"))
}

/// Writes records and summary, reports verdicts on stderr and returns the
/// exit code.
pub fn emit(run: &ExperimentRun, summary: &ExperimentSummary, g: &GlobalOpts) -> Result<u8, CliError> {
    let io_err = |e: io::Error| CliError::runtime(e.to_string());
    let mut w = sink(g.out.as_deref())?;
    match g.format {
        Format::Csv => {
            write_records_csv(&mut w, &run.records, g.timing).map_err(io_err)?;
            if let Some(out) = &g.out {
                std::fs::write(summary_path(out), summary.to_json() + "\n").map_err(io_err)?;
            }
        }
        Format::Json => writeln!(w, "{}", summary.to_json()).map_err(io_err)?,
    }
    w.flush().map_err(io_err)?;
    for f in &summary.failures {
        eprintln!("trial failed: {} n={} trial={} seed={}: {}", f.ensemble, f.n, f.trial, f.seed, f.error);
    }
    for v in &summary.verdicts {
        eprintln!(
            "{} {}: observed {} threshold {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.criterion,
            format_value(v.observed),
            format_value(v.threshold)
        );
    }
    for r in &summary.four_moment {
        eprintln!(
            "four moment n={}: mean_a {} mean_b {} diff {} stderr {}",
            r.n,
            format_value(r.mean_a),
            format_value(r.mean_b),
            format_value(r.diff),
            format_value(r.mc_stderr)
        );
    }
    Ok(if summary.passed { EXIT_OK } else { EXIT_THRESHOLD })
}
