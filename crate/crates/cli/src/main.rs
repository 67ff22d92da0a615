use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use singlab::{emit_plotdata, execute, experiment_from_flags, run_manifest, CliError, Manifest, Report};

#[derive(Parser)]
#[command(name = "singlab", version, about = "Deterministic experiments on singular spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment of a JSON manifest.
    Run { manifest: PathBuf },
    /// Print two-column plot data from a JSON report.
    Plot {
        report: PathBuf,
        /// One of osc, lambda, ratio, delta.
        #[arg(long)]
        kind: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `singlab <kind> [--key value ...]` runs one experiment.
    #[command(external_subcommand)]
    Kind(Vec<String>),
}

fn plot(report: &PathBuf, kind: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = emit_plotdata(&Report::read(report)?, kind)?;
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run { manifest } => run_manifest(&manifest),
        Command::Plot { report, kind, out } => match plot(&report, &kind, out.as_ref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Command::Kind(args) => match experiment_from_flags(&args[0], &args[1..]) {
            Ok(e) => execute(&Manifest { experiments: vec![e], output: None }),
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
