//! `subcrit`: constants, links, chain verification, the RCIS metric and
//! cores, as JSON or CSV reports.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subcrit::Error;

#[derive(Parser, Debug)]
#[command(name = "subcrit", version, about = "Local limits of random graphs from subcritical classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Singularity constants and leaf probabilities of a class.
    Constants {
        #[command(flatten)]
        #[serde(flatten)]
        class: ClassArgs,
    },
    /// Enumerate 2-ended links with their probabilities.
    Links {
        #[command(flatten)]
        #[serde(flatten)]
        class: ClassArgs,
        /// Largest link size.
        #[arg(long = "n", default_value_t = 4)]
        max_size: usize,
    },
    /// Compare a chain's limiting probability with exhaustive and sampled frequencies.
    VerifyChain {
        #[command(flatten)]
        #[serde(flatten)]
        class: ClassArgs,
        /// Comma-separated links: `leaf` or an index into the `links` listing.
        /// An empty string is the empty chain.
        #[arg(long, default_value = "leaf")]
        chain: String,
        /// Link size used to resolve link indices.
        #[arg(long, default_value_t = 4)]
        link_size: usize,
        /// Graph sizes: `N` or `A..B` (inclusive).
        #[arg(long = "n", default_value = "4..8", value_parser = parse_range)]
        n: (usize, usize),
        /// Samples per size beyond exhaustive reach; 0 disables sampling.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Rooting for unlabelled classes.
        #[arg(long, value_enum, default_value_t = Rooting::Rooted)]
        mode: Rooting,
        /// Also sample the limiting chain with this mass cutoff.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Radius of similarity and distance of two graph families.
    Metric {
        a: String,
        b: String,
        #[arg(long, default_value_t = subcrit::metric::DEFAULT_RMAX)]
        rmax: usize,
    },
    /// Ground floor, first floor and core of a graph with infinite-degree vertices.
    Core {
        /// JSON `{"base": {"n", "root", "edges"}, "marked": [...]}`.
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassArgs {
    /// Built-in class name.
    #[arg(long, default_value = "trees_labelled", conflicts_with = "class_file")]
    pub class: String,
    /// Custom class description (JSON).
    #[arg(long)]
    pub class_file: Option<PathBuf>,
    /// Truncation order; the class default when absent.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rooting {
    /// Uniform rooted graphs.
    Rooted,
    /// Uniform graphs with a uniform vertex.
    Bs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a size"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if a == 0 || a > b {
        return Err(format!("empty or invalid range `{s}`"));
    }
    Ok((a, b))
}

/// Failures with their exit codes.
pub enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSubcritical(_)
            | Error::AsymptoticsMismatch(_)
            | Error::OrderTooLow(_)
            | Error::MassCutoff(_)
            | Error::NonzeroConstantTerm => Failure::Numeric(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, &cli.output) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
