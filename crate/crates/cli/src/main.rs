use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use coalition_core::harness::{
    emit_default_config, read_json, run_breadth_sweep, run_case_study, summarize_sweep, write_json, write_summary_csv,
    write_sweep_csv, ExperimentConfig,
};
use coalition_core::{brute_force_oracle, solve, Network, SearchConfig, SearchResult, TaskSpec};

/// Coalition formation over agent networks.
#[derive(Parser)]
#[command(name = "coalition", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the documented default experiment configuration.
    InitConfig { path: PathBuf },
    /// Generate a random network from a configuration.
    GenNetwork {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Capability breadth per agent; defaults to `case_study_max_caps`.
        #[arg(long)]
        max_caps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for a minimum-effort coalition.
    Solve {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        task: PathBuf,
        /// Experiment configuration whose `[search]` table is used.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Use exhaustive enumeration instead of the radius search.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate one network, solve the chain task and write all artifacts.
    CaseStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Monte-Carlo sweep over capability breadth.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

const EXIT_INFEASIBLE: u8 = 2;

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading config {}", path.display()))
}

fn outcome(result: &SearchResult) -> ExitCode {
    if result.is_found() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INFEASIBLE)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::InitConfig { path } => {
            emit_default_config(&path).with_context(|| format!("writing {}", path.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::GenNetwork {
            config,
            seed,
            max_caps,
            out,
        } => {
            let cfg = load_config(&config)?;
            let net = cfg.generate_network(max_caps.unwrap_or(cfg.case_study_max_caps), seed)?;
            write_json(&out, &net)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            network,
            task,
            config,
            k_max,
            oracle,
            out,
            trace,
        } => {
            let net: Network = read_json(&network).with_context(|| format!("reading {}", network.display()))?;
            let task: TaskSpec = read_json(&task).with_context(|| format!("reading {}", task.display()))?;
            let mut search = match &config {
                Some(p) => load_config(p)?.search,
                None => SearchConfig::default(),
            };
            if let Some(k) = k_max {
                search.k_max = k;
            }
            let result = if oracle {
                brute_force_oracle(&net, &task, &search)?
            } else {
                solve(&net, &task, &search)?
            };
            write_json(&out, &result)?;
            if let Some(path) = trace {
                result.write_trace_csv(BufWriter::new(File::create(path)?))?;
            }
            Ok(outcome(&result))
        }
        Command::CaseStudy { config, seed, out_dir } => {
            let cfg = load_config(&config)?;
            let study = run_case_study(&cfg, seed)?;
            study.write_to(&out_dir)?;
            let r = &study.result;
            match (&r.coalition, r.radius, r.surplus()) {
                (Some(c), Some(k), Some(s)) => {
                    eprintln!(
                        "FOUND coalition {c:?} at radius {k}, surplus {s:.4}, {} evaluations",
                        r.evaluations
                    )
                }
                _ => eprintln!("INFEASIBLE after {} evaluations", r.evaluations),
            }
            Ok(outcome(r))
        }
        Command::Sweep { config, out, summary } => {
            let cfg = load_config(&config)?;
            let records = run_breadth_sweep(&cfg)?;
            write_sweep_csv(&records, BufWriter::new(File::create(&out)?))?;
            if let Some(path) = summary {
                write_summary_csv(&summarize_sweep(&records), BufWriter::new(File::create(path)?))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
