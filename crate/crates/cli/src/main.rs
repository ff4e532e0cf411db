use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use mdcensus::search::Variant;
use mdcensus_cli::{cmd_enumerate, cmd_gen_graphs, cmd_report, cmd_verify, EnumerateOptions};

#[derive(Parser)]
#[command(name = "mdcensus", about = "Census of one-vertex 3-manifold triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write all connected 4-regular multigraphs on N nodes.
    GenGraphs {
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Enumerate decompositions for every graph in a file.
    Enumerate {
        #[arg(short, long)]
        graphs: PathBuf,
        #[arg(long, default_value = "md")]
        variant: Variant,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        stats: PathBuf,
        #[arg(short = 'j', long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        min_walk: Option<usize>,
    },
    /// Compare the search against the brute-force gluing oracle.
    Verify {
        #[arg(short, long)]
        graphs: PathBuf,
        /// Largest number of gluing choices the oracle may try per graph.
        #[arg(long, default_value_t = 1_679_616)]
        budget: u128,
    },
    /// Summarise stats files.
    Report {
        #[arg(required = true)]
        stats: Vec<PathBuf>,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long, default_value_t = 1.0)]
        slowest_percent: f64,
    },
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::GenGraphs { n, out } => {
            let count = cmd_gen_graphs(n, &out)?;
            println!("{count} graphs written to {}", out.display());
        }
        Command::Enumerate { graphs, variant, out, stats, workers, min_walk } => {
            let summary = cmd_enumerate(&EnumerateOptions { graphs, variant, out, stats, workers, min_walk })?;
            for e in &summary.errors {
                eprintln!("skipped {e}");
            }
            println!("{} graphs, {} records", summary.graphs, summary.records);
        }
        Command::Verify { graphs, budget } => {
            let report = cmd_verify(&graphs, budget)?;
            for e in &report.errors {
                eprintln!("skipped {e}");
            }
            for (index, reason) in &report.refused {
                println!("graph {index} refused: {reason}");
            }
            for d in &report.diffs {
                println!("{d}");
            }
            println!("{} graphs checked, {} with differences", report.checked, report.diffs.len());
            return Ok(report.passed());
        }
        Command::Report { stats, top, slowest_percent } => {
            print!("{}", cmd_report(&stats, top, slowest_percent)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
