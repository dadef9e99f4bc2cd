use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::Ordering;

use clap::{Parser, Subcommand};
use symdesign_cli::{catalogue, run, RunOptions, EXIT_INTERRUPTED, INTERRUPTED};

/// Projected-ensemble and state-design experiments.
#[derive(Parser)]
#[command(name = "symdesign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the CSV and JSON outputs.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads; defaults to the config value, then to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Validate the config and check budgets without computing.
        #[arg(long)]
        dry_run: bool,
    },
    /// Print the experiment catalogue as JSON.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            println!("{}", catalogue::to_json());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, threads, seed, dry_run } => {
            if let Err(e) = ctrlc::set_handler(|| INTERRUPTED.store(true, Ordering::SeqCst)) {
                eprintln!("warning: no interrupt handler: {e}");
            }
            let opts = RunOptions { config, out_dir: out, threads, seed, dry_run };
            match run(&opts) {
                Ok(summary) if dry_run => {
                    println!("config ok: {} scan points within budget", summary.points);
                    ExitCode::SUCCESS
                }
                Ok(summary) => {
                    if let Some(csv) = &summary.csv {
                        println!("wrote {} records to {}", summary.records, csv.display());
                    }
                    if summary.truncated {
                        eprintln!("interrupted: partial results written, sidecar marked truncated");
                        return ExitCode::from(EXIT_INTERRUPTED as u8);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
