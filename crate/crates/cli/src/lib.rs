//! Command-line experiment runner.
//!
//! Every subcommand resolves an [`ExperimentConfig`] from an optional
//! `key = value` file overlaid with flags, then writes line-delimited JSON:
//! a header line with the timestamp and configuration, followed by result
//! records that carry the configuration hash.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on usage
//! or input errors.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "fqt", version, about = "Finite-scale experiments over F_q[t]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; defaults to `$FQT_OUT_DIR/<subcommand>-<hash>.jsonl`
    /// when that variable is set, else standard output.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_parser = ["fast", "oracle"])]
    pub verification: Option<String>,
    #[arg(long)]
    pub c_chang: Option<f64>,
    #[arg(long)]
    pub c_size: Option<f64>,
    #[arg(long)]
    pub c_increment: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier transform of a set indicator or a seeded random function.
    Transform {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Build a Bohr set, optionally dilated.
    Bohr {
        #[command(flatten)]
        common: Common,
        /// Frequencies as coefficient strings `b_1 b_2 ...`, comma separated.
        #[arg(long)]
        gamma: Option<String>,
        /// One width for all frequencies or one per frequency.
        #[arg(long)]
        widths: Option<String>,
        #[arg(long)]
        dilate: Option<String>,
    },
    /// Count solutions in a set.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eq: Option<String>,
        #[arg(long)]
        set: Option<String>,
    },
    /// Search for a large solution-free set.
    Search {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eq: Option<String>,
        #[arg(long, value_parser = ["exhaustive", "heuristic"])]
        method: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        /// Record store to append the result to.
        #[arg(long)]
        store: Option<String>,
    },
    /// Run the density increment iteration.
    Increment {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eq: Option<String>,
        /// The set `A`; found by heuristic search when absent.
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Bohr sets in Z/NZ: regular width and approximate identity.
    Znz {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        modulus: Option<u64>,
        /// Comma-separated residues.
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = ["parseval", "convolution", "counting", "store"])]
        suite: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        eq: Option<String>,
        #[arg(long)]
        store: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Transform { .. } => "transform",
            Command::Bohr { .. } => "bohr",
            Command::Count { .. } => "count",
            Command::Search { .. } => "search",
            Command::Increment { .. } => "increment",
            Command::Znz { .. } => "znz",
            Command::Verify { .. } => "verify",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Transform { common, .. }
            | Command::Bohr { common, .. }
            | Command::Count { common, .. }
            | Command::Search { common, .. }
            | Command::Increment { common, .. }
            | Command::Znz { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }

    /// The configuration given by flags alone.
    fn flags(&self) -> ExperimentConfig {
        let c = self.common();
        let mut cfg = ExperimentConfig {
            subcommand: self.name().to_string(),
            q: c.q,
            n: c.n,
            seed: c.seed,
            out: c.out.clone(),
            verification: c.verification.clone(),
            c_chang: c.c_chang,
            c_size: c.c_size,
            c_increment: c.c_increment,
            ..Default::default()
        };
        match self {
            Command::Transform { set, eta, .. } => {
                cfg.set = set.clone();
                cfg.eta = *eta;
            }
            Command::Bohr {
                gamma,
                widths,
                dilate,
                ..
            } => {
                cfg.gamma = gamma.clone();
                cfg.widths = widths.clone();
                cfg.dilate = dilate.clone();
            }
            Command::Count { eq, set, .. } => {
                cfg.eq = eq.clone();
                cfg.set = set.clone();
            }
            Command::Search {
                eq,
                method,
                budget,
                store,
                ..
            } => {
                cfg.eq = eq.clone();
                cfg.method = method.clone();
                cfg.budget = *budget;
                cfg.store = store.clone();
            }
            Command::Increment { eq, set, budget, .. } => {
                cfg.eq = eq.clone();
                cfg.set = set.clone();
                cfg.budget = *budget;
            }
            Command::Znz {
                modulus,
                gamma,
                rho,
                eps,
                trials,
                ..
            } => {
                cfg.modulus = *modulus;
                cfg.gamma = gamma.clone();
                cfg.rho = *rho;
                cfg.eps = *eps;
                cfg.trials = *trials;
            }
            Command::Verify {
                suite,
                trials,
                eq,
                store,
                ..
            } => {
                cfg.suite = suite.clone();
                cfg.trials = *trials;
                cfg.eq = eq.clone();
                cfg.store = store.clone();
            }
        }
        cfg
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input; exit 2.
    Usage(String),
    /// A verification check failed; exit 1.
    Failure(String),
}

impl From<fqt_core::Error> for CliError {
    fn from(e: fqt_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

/// Resolves the configuration: file values overlaid with flags.
pub fn resolve(cmd: &Command) -> Result<ExperimentConfig, CliError> {
    let flags = cmd.flags();
    match &cmd.common().config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
            let file = ExperimentConfig::parse_text(&text)
                .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
            if !file.subcommand.is_empty() && file.subcommand != flags.subcommand {
                return Err(CliError::Usage(format!(
                    "--config is for subcommand {:?}",
                    file.subcommand
                )));
            }
            Ok(file.merged(&flags))
        }
        None => Ok(flags),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = resolve(&cli.command).and_then(|cfg| commands::execute(&cfg));
    match result {
        Ok(()) => 0,
        Err(CliError::Failure(m)) => {
            eprintln!("verification failed: {m}");
            1
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}
