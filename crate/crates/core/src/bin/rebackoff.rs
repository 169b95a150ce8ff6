//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification criterion fails, 2 on
//! an invalid scenario or sweep file, 3 when a run hit its slot cap before
//! every packet finished, 4 on any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rebackoff::experiment::{
    cmd_compare, cmd_run, cmd_sweep, cmd_verify, default_jobs, ScenarioFile, Suite, SweepSpec, VerifyOptions,
};
use rebackoff::{Error, ProtocolKind};

#[derive(Parser)]
#[command(name = "rebackoff", version, about = "Robust backoff simulator and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the scenario (first seed for batteries).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(default_jobs).max(1)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes a trace and a metrics file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a parameter sweep; writes one CSV row per point.
    Sweep {
        /// Sweep specification file.
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite.
    Verify {
        /// One of bounds, sigma, sync, prefix, borrower, scaling, beb-contrast.
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Run one scenario under several protocols; writes a side-by-side CSV.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated protocol list.
        #[arg(long, value_delimiter = ',', default_value = "ReBackoff2,BEB")]
        protocols: Vec<ProtocolKind>,
        /// Seeds per protocol, starting at the scenario seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[command(flatten)]
        common: Common,
    },
}

const VERIFY_FAILED: u8 = 1;
const INVALID_INPUT: u8 = 2;
const INCOMPLETE: u8 = 3;
const OTHER: u8 = 4;

fn load_scenario(path: &Path, seed: Option<u64>) -> Result<ScenarioFile, Error> {
    let scenario = ScenarioFile::load(path)?;
    Ok(match seed {
        Some(seed) => scenario.with_seed(seed),
        None => scenario,
    })
}

fn show(value: Option<impl std::fmt::Display>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run { scenario, common } => {
            let scenario = load_scenario(&scenario, common.seed)?;
            let outcome = cmd_run(&scenario, &common.out)?;
            let s = &outcome.metrics.summary;
            println!(
                "{} seed {}: {} slots, {}/{} delivered, lambda {}, waste {}, makespan {}",
                s.protocol.name(),
                s.seed,
                s.slots,
                s.successes,
                s.arrivals,
                show(s.metrics.lambda.map(|v| format!("{v:.4}"))),
                show(s.metrics.waste.map(|v| format!("{v:.4}"))),
                show(s.metrics.makespan),
            );
            println!("trace: {}", outcome.trace_path.display());
            println!("metrics: {}", outcome.metrics_path.display());
            if !outcome.complete() {
                eprintln!("run stopped at its slot cap with {} packets left", s.backlog);
                return Ok(INCOMPLETE);
            }
            Ok(0)
        }
        Command::Sweep { scenario, common } => {
            let mut spec = SweepSpec::load(&scenario)?;
            if let Some(seed) = common.seed {
                spec.base.seed = seed;
            }
            let outcome = cmd_sweep(&spec, &common.out, common.jobs())?;
            println!(
                "{} rows written to {}",
                outcome.rows.len(),
                outcome.csv_path.as_deref().unwrap_or(Path::new("?")).display()
            );
            if outcome.incomplete > 0 {
                eprintln!("{} runs stopped at their slot cap", outcome.incomplete);
                return Ok(INCOMPLETE);
            }
            Ok(0)
        }
        Command::Verify { suite, common } => {
            let options = VerifyOptions {
                seed: common.seed.unwrap_or(VerifyOptions::default().seed),
                jobs: common.jobs(),
            };
            let report = cmd_verify(suite, &options, Some(&common.out))?;
            for criterion in &report.criteria {
                println!("{}", criterion.line());
            }
            println!("{}: {}", suite, if report.passed() { "PASS" } else { "FAIL" });
            Ok(if report.passed() { 0 } else { VERIFY_FAILED })
        }
        Command::Compare {
            scenario,
            protocols,
            seeds,
            common,
        } => {
            let scenario = load_scenario(&scenario, common.seed)?;
            let (comparison, path) = cmd_compare(&scenario, &protocols, seeds, &common.out, common.jobs())?;
            println!(
                "{} protocols x {} seeds written to {}",
                comparison.labels.len(),
                comparison.seeds.len(),
                path.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Config(_) => INVALID_INPUT,
                _ => OTHER,
            })
        }
    }
}
