use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::debug;

use robust_fusion_cli::commands::{self, Table};
use robust_fusion_cli::error::CliError;
use robust_fusion_cli::scenario::Scenario;

/// Robust decentralized detection: LFDs, network evaluation, saddle checks.
#[derive(Parser)]
#[command(name = "robust-fusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Construction parameters and normalization residuals of each LFD pair.
    Lfd(Common),
    /// Error probabilities under the LFDs.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Adds a Monte Carlo row with this many trials.
        #[arg(long)]
        mc_samples: Option<usize>,
    },
    /// Boundedness and saddle-value inequalities over sampled class members.
    Saddle {
        #[command(flatten)]
        common: Common,
        /// Members per class and sensor; 1 probes the LFDs only.
        #[arg(long, default_value_t = 11)]
        members: usize,
    },
    /// Exact error of K identical copies of the first sensor.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
    },
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn write_table(t: &Table, out: Option<&Path>) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&t.header)?;
    for row in &t.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn configure_threads() {
    let Ok(v) = std::env::var("ROBUST_FUSION_THREADS") else { return };
    match v.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                debug!("thread pool already configured: {e}");
            }
        }
        _ => log::warn!("ignoring ROBUST_FUSION_THREADS={v:?}"),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Lfd(c) => {
            let s = load(&c.scenario)?;
            write_table(&commands::cmd_lfd(&s)?, c.out.as_deref())
        }
        Command::Evaluate { common: c, mc_samples } => {
            let s = load(&c.scenario)?;
            write_table(&commands::cmd_evaluate(&s, mc_samples, c.seed)?, c.out.as_deref())
        }
        Command::Saddle { common: c, members } => {
            let s = load(&c.scenario)?;
            let outcome = commands::cmd_saddle(&s, members, c.seed)?;
            write_table(&outcome.table, c.out.as_deref())?;
            println!("{}", outcome.summary);
            Ok(())
        }
        Command::Sweep { common: c, k_list } => {
            let s = load(&c.scenario)?;
            write_table(&commands::cmd_sweep(&s, &k_list)?, c.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
