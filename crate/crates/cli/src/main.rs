use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levylab::constants::{table_csv, Table};
use levylab::quadrature::QuadratureConfig;
use levylab::scenario::{self, ScenarioConfig, ScenarioId, ScenarioReport};

/// Monte Carlo scenarios for random walks in a one-dimensional Lévy random medium.
#[derive(Parser)]
#[command(name = "levylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write summary.json plus per-point CSVs.
    Run {
        /// Scenario id (thm1 … thm11, custom).
        #[arg(long)]
        scenario: String,
        /// JSON config; missing fields take the scenario defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory [default: $LEVYLAB_OUT/<scenario> or ./levylab-out/<scenario>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every violated hypothesis of a config.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Scenario id overriding the one in the config.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Dump a table of constants as CSV.
    Constants {
        #[arg(long, value_parser = ["mq", "f", "d", "F", "gamma"])]
        table: String,
        /// Mean gap used by the d and F tables.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
}

const USAGE_ERROR: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE_ERROR)
}

fn parse_id(s: &str) -> Result<ScenarioId, String> {
    s.parse::<ScenarioId>().map_err(|_| {
        let known: Vec<&str> = ScenarioId::ALL.iter().map(|id| id.as_str()).collect();
        format!("unknown scenario {s:?} (expected one of {})", known.join(", "))
    })
}

fn default_out(id: ScenarioId) -> PathBuf {
    let root = std::env::var_os("LEVYLAB_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("levylab-out"));
    root.join(id.as_str())
}

fn print_report(report: &ScenarioReport, dir: &std::path::Path) {
    for v in &report.verdicts {
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("{status} {} {}: {}", report.scenario, v.name, v.criterion);
        if let Some(note) = &v.note {
            println!("     note: {note}");
        }
    }
    let overall = if report.passed { "PASS" } else { "FAIL" };
    println!("{overall} {} ({} verdicts) -> {}", report.scenario, report.verdicts.len(), dir.display());
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            scenario,
            config,
            seed,
            replicas,
            workers,
            out,
        } => {
            let id = match parse_id(&scenario) {
                Ok(id) => id,
                Err(e) => return fail(e),
            };
            let mut cfg = match &config {
                Some(path) => match ScenarioConfig::from_file(path, Some(id)) {
                    Ok(cfg) => cfg,
                    Err(e) => return fail(e),
                },
                None => ScenarioConfig::defaults(id),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(replicas) = replicas {
                cfg.replicas = replicas;
            }
            if let Some(workers) = workers {
                cfg.workers = workers;
            }
            let dir = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| default_out(id));
            cfg.out_dir = Some(dir.clone());
            let violations = cfg.validate();
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return ExitCode::from(USAGE_ERROR);
            }
            match scenario::run(&cfg) {
                Ok(report) => {
                    print_report(&report, &dir);
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config, scenario } => {
            let id = match scenario.as_deref().map(parse_id).transpose() {
                Ok(id) => id,
                Err(e) => return fail(e),
            };
            let cfg = match ScenarioConfig::from_file(&config, id) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            let violations = cfg.validate();
            if violations.is_empty() {
                println!("{}: ok", cfg.scenario);
                ExitCode::SUCCESS
            } else {
                for v in &violations {
                    println!("{v}");
                }
                ExitCode::from(USAGE_ERROR)
            }
        }
        Command::Constants { table, mu } => {
            let table: Table = match table.parse() {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match table_csv(table, mu, &QuadratureConfig::default()) {
                Ok(csv) => {
                    print!("{csv}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
