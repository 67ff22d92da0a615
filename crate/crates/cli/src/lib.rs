//! Experiment runner for `singlab-core`: manifests in, CSV/JSON reports out.

pub mod error;
pub mod experiments;
pub mod manifest;
pub mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use error::CliError;
pub use experiments::run_experiment;
pub use manifest::{experiment_from_flags, parse_manifest, read_manifest, Experiment, Manifest};
pub use report::{emit_plotdata, Report};

pub const DEFAULT_OUTPUT: &str = "singlab-reports";

/// Worker cap from `SINGLAB_WORKERS`, if set to a positive integer.
pub fn worker_cap() -> Option<usize> {
    std::env::var("SINGLAB_WORKERS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs every experiment, concurrently up to the worker cap. Results are in
/// manifest order.
pub fn run_all(manifest: &Manifest) -> Vec<Result<Report, CliError>> {
    let run = || manifest.experiments.par_iter().enumerate().map(|(i, e)| run_experiment(e, i)).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(worker_cap().unwrap_or(0)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

fn output_dir(e: &Experiment, manifest: &Manifest) -> PathBuf {
    e.output.clone().or_else(|| manifest.output.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

/// Exit code of a finished run: the first error's code, else 1 if any
/// assertion failed, else 0.
pub fn exit_code(results: &[Result<Report, CliError>]) -> i32 {
    if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
        return e.exit_code();
    }
    i32::from(results.iter().any(|r| matches!(r, Ok(rep) if !rep.pass)))
}

/// Runs a parsed manifest, writes reports and prints one line per experiment.
pub fn execute(manifest: &Manifest) -> i32 {
    let mut results = run_all(manifest);
    for (i, (e, res)) in manifest.experiments.iter().zip(results.iter_mut()).enumerate() {
        match res {
            Ok(rep) => {
                println!("{}", rep.summary_line());
                if let Err(err) = rep.write(&output_dir(e, manifest)) {
                    eprintln!("{}: {err}", rep.id);
                    *res = Err(err);
                }
            }
            Err(err) => eprintln!("{}: {err}", e.label(i)),
        }
    }
    exit_code(&results)
}

/// `singlab run <manifest>`.
pub fn run_manifest(path: &Path) -> i32 {
    match read_manifest(path) {
        Ok(m) => execute(&m),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
