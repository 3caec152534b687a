use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;
use issp::{load_config, run, Overrides};

/// Multi-frequency inverse source experiments.
#[derive(Debug, Parser)]
#[command(name = "issp", version)]
struct Cli {
    /// Subcommand to run.
    #[arg(value_parser = PossibleValuesParser::new(issp::commands::names()))]
    command: String,

    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,

    /// Master seed for all noise draws.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write a gnuplot script next to each sweep CSV.
    #[arg(long)]
    emit_plot_script: bool,

    /// Extra `key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { seed: cli.seed, out: cli.out, jobs: cli.jobs, set: cli.set };
    let result =
        load_config(cli.config.as_deref(), &overrides).and_then(|cfg| run(&cli.command, cfg, cli.emit_plot_script));
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("issp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
