use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use phibnorm_cli::config::parse_list;
use phibnorm_cli::report::{summary_table, write_jsonl, write_plot_data};
use phibnorm_cli::{run_command, CliError, Command, Overrides, RunConfig, Verdict};

// Clap reads a literal `Vec` as a repeated argument; the alias keeps the
// comma list a single value parsed whole by `parse_list`.
type Levels = Vec<f64>;

/// Numerical checks for fuzzy strong phi-b-normed spaces and their operators.
#[derive(Debug, Parser)]
#[command(name = "phibnorm", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// TOML configuration, merged over the built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write JSON-lines records here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated levels in (0, 1), e.g. `0.1,0.5,0.9`.
    #[arg(long, global = true, value_parser = parse_list)]
    alpha_grid: Option<Levels>,

    /// Tolerance for every check of the run.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Sample count for every sampled check of the run.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Dump two-column plot data (alpha vs M_alpha, alpha vs g, s vs N) here.
    #[arg(long, global = true)]
    plot_data: Option<PathBuf>,
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: cli.seed,
        alpha_grid: cli.alpha_grid.clone(),
        tol: cli.tol,
        samples: cli.samples,
    })?;
    let run = run_command(cli.command, &cfg)?;

    let io_err = |e: io::Error| CliError::Io(e.to_string());
    let table = summary_table(&run);
    match &cli.out {
        Some(path) => {
            write_jsonl(&run, create(path)?).map_err(io_err)?;
            print!("{table}");
        }
        None => {
            write_jsonl(&run, io::stdout().lock()).map_err(io_err)?;
            eprint!("{table}");
        }
    }
    if let Some(path) = &cli.plot_data {
        write_plot_data(&run.plots, create(path)?).map_err(io_err)?;
    }
    for r in run.records.iter().filter(|r| r.verdict == Verdict::PreconditionUnmet) {
        eprintln!("warning: {}: precondition unmet", r.check_name);
    }
    io::stdout().flush().map_err(io_err)?;
    Ok(run.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
