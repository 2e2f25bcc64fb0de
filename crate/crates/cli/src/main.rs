//! `deathchain`: exact tables, simulations, coalescent rates, limit-law
//! constants and the acceptance suite from the command line.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{write_output, Format, Output};
use settings::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] deathchain::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "deathchain", version, about = "Absorption times of death chains: exact laws, simulation, limits")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each can also come from `--config`.
#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` file; flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    reps: Option<u64>,
    /// A size or a strictly increasing comma-separated grid
    #[arg(long, global = true)]
    n: Option<String>,
    /// `bs`, `beta:a=1.5`, `geometric:q=0.5` or `table:0.5,0.3,0.2`
    #[arg(long, global = true)]
    law: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Size of the worker pool for replicate-level parallelism
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact laws and moment tables
    Exact {
        /// moments-x, moments-n, pmf-x, pmf-n, pmf-y, pmf-w or renewal
        #[arg(long)]
        table: Option<String>,
        #[arg(long)]
        k_max: Option<usize>,
    },
    /// Coupled random-walk simulation
    Simulate {
        /// Comma-separated subset of m, n, y, t, m0, decomposition
        #[arg(long)]
        stats: Option<String>,
        /// Also write every replicate (n, M, N, Y, T, M0) to this CSV file
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Beta-coalescent rates and collision counts
    Coalescent {
        /// rates, totals or collisions
        #[arg(long)]
        table: Option<String>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Limit-law constants and CDF grids
    Limits {
        /// phi, stable-cdf, moments or normalizers
        #[arg(long)]
        table: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// wlln, stable, exp-functional or stable1
        #[arg(long)]
        regime: Option<String>,
    },
    /// Run acceptance criteria; exit status 0 iff all pass
    Verify {
        /// Comma-separated ids (default: all)
        #[arg(long)]
        criteria: Option<String>,
        /// Acceptance setting override, e.g. `--set a3_reps=20000`
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Exact { .. } => "exact",
            Command::Simulate { .. } => "simulate",
            Command::Coalescent { .. } => "coalescent",
            Command::Limits { .. } => "limits",
            Command::Verify { .. } => "verify",
        }
    }
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let c = &cli.common;
    let mut s = Settings::load(c.config.as_deref())?;
    s.set_opt("seed", c.seed);
    s.set_opt("reps", c.reps);
    s.set_opt("n", c.n.as_ref());
    s.set_opt("law", c.law.as_ref());
    s.set_opt("out", c.out.as_ref().map(|p| p.display()));
    s.set_opt("format", c.format);
    s.set_opt("threads", c.threads);
    match &cli.command {
        Command::Exact { table, k_max } => {
            s.set_opt("table", table.as_ref());
            s.set_opt("k_max", *k_max);
        }
        Command::Simulate { stats, dump } => {
            s.set_opt("stats", stats.as_ref());
            s.set_opt("dump", dump.as_ref().map(|p| p.display()));
        }
        Command::Coalescent { table, a, b } => {
            s.set_opt("table", table.as_ref());
            s.set_opt("a", *a);
            s.set_opt("b", *b);
        }
        Command::Limits { table, alpha, c, lo, hi, points, k_max, regime } => {
            s.set_opt("table", table.as_ref());
            s.set_opt("alpha", *alpha);
            s.set_opt("c", *c);
            s.set_opt("lo", *lo);
            s.set_opt("hi", *hi);
            s.set_opt("points", *points);
            s.set_opt("k_max", *k_max);
            s.set_opt("regime", regime.as_ref());
        }
        Command::Verify { criteria, overrides } => {
            s.set_opt("criteria", criteria.as_ref());
            for kv in overrides {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
                s.set(k, v.trim());
            }
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let s = settings(cli)?;
    if let Some(threads) = s.get::<usize>("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let format = s.get_or("format", Format::Csv)?;
    let out = s.get::<PathBuf>("out")?;
    let (result, pass): (Output, bool) = match &cli.command {
        Command::Exact { .. } => (commands::exact(&s)?, true),
        Command::Simulate { .. } => (commands::simulate(&s)?, true),
        Command::Coalescent { .. } => (commands::coalescent(&s)?, true),
        Command::Limits { .. } => (commands::limits(&s)?, true),
        Command::Verify { .. } => commands::verify(&s)?,
    };
    commands::check_unread(&s)?;
    let mut echo = s.echo();
    // where the output went is not part of the experiment
    echo.remove("out");
    echo.remove("dump");
    echo.remove("threads");
    write_output(cli.command.name(), echo, result, format, out.as_deref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
