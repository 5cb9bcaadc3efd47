use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mipt_cli::{run_file, RunOptions};

#[derive(Parser)]
#[command(name = "mipt", version, about = "Run measurement-induced entanglement experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config. Exit codes: 0 ok, 2 invalid config, 3 some grid points failed.
    Run {
        config: PathBuf,
        /// Grid points evaluated concurrently (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Write a matplotlib script next to each CSV.
        #[arg(long)]
        emit_plot_script: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run { config, workers, emit_plot_script } = Cli::parse().command;
    match run_file(&config, &RunOptions { workers, emit_plot_script }) {
        Ok(report) => {
            for e in &report.manifest.point_errors {
                eprintln!("point failed: {}: {}", e.point, e.error);
            }
            println!(
                "{}: {} files in {} ({} point errors)",
                report.manifest.experiment,
                report.manifest.files.len(),
                report.output_dir.display(),
                report.manifest.point_errors.len()
            );
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
