//! Argument parsing and dispatch for the `backcast` binary.

use std::path::PathBuf;

use crate::commands::{self, Outcome};
use crate::config::{LawSpec, RunConfig, ScenarioChoice, TargetSpec};
use crate::error::{CliError, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "backcast", version, about = "Vehicle fleet renewal model with optimal EV purchase incentives")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    start_year: Option<i32>,
    #[arg(long, global = true)]
    end_year: Option<i32>,
    /// Do not print the summary or the list of written files.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit survival, emission factors, mileage, adoption and the initial fleet from history.
    Calibrate,
    /// Run one policy law: i0, ic, ic:<k€>, ip, bi or custom:<file.csv>.
    Simulate {
        #[arg(long, default_value = "ic")]
        law: String,
    },
    /// Cheapest incentive trajectory meeting a terminal emission target.
    Optimize {
        /// Target in Mt, or from-scenario:<i0|ic|ip|bi>.
        #[arg(long)]
        target: Option<String>,
        /// Upper bound on the incentive (k€).
        #[arg(long)]
        umax: Option<f64>,
        /// Initial guess CSV (year,u_keur).
        #[arg(long)]
        init: Option<PathBuf>,
    },
    /// Side-by-side terminal emissions and budgets.
    Compare {
        /// Comma-separated subset of i0,ic,ip,bi,optimal.
        #[arg(long, value_delimiter = ',')]
        scenarios: Option<Vec<String>>,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output {
        cfg.output_dir = dir.clone();
    }
    if let Some(y) = cli.start_year {
        cfg.start_year = y;
    }
    if let Some(y) = cli.end_year {
        cfg.end_year = y;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Calibrate => commands::calibrate(&cfg),
        Command::Simulate { law } => commands::simulate(&cfg, &law.parse::<LawSpec>()?),
        Command::Optimize { target, umax, init } => {
            let target = target.as_deref().map(str::parse::<TargetSpec>).transpose()?;
            commands::optimize(&cfg, target.as_ref(), *umax, init.as_deref())
        }
        Command::Compare { scenarios } => {
            let choices = match scenarios {
                Some(names) => names
                    .iter()
                    .map(|n| n.parse::<ScenarioChoice>())
                    .collect::<Result<Vec<_>>>()?,
                None => ScenarioChoice::DEFAULT_SET.to_vec(),
            };
            commands::compare(&cfg, &choices)
        }
    }
}

/// Runs one command line (including the program name) and returns the
/// process exit status.
pub fn run_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            if !cli.quiet {
                print!("{}", out.summary);
                for f in &out.files {
                    eprintln!("wrote {}", f.display());
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Model(inner) = &e {
                if let Some(src) = std::error::Error::source(inner) {
                    eprintln!("  caused by: {src}");
                }
            }
            e.exit_code()
        }
    }
}
