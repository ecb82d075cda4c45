use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mapsel_cli::config_file::parse_override;
use mapsel_cli::{parse_config, run_experiment, ExperimentSpec, LOG_ENV};
use mapsel_core::{Ledger, Strategy};

/// Trust-gated multi-path MAP selection simulator.
#[derive(Parser)]
#[command(name = "mapsel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// key=value configuration file; unset keys keep their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy with one seed
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run every strategy with every seed and compare
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = Strategy::ALL.to_vec())]
        strategies: Vec<Strategy>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a ledger.json hash chain; exit status 0 iff it verifies
    VerifyLedger { ledger: PathBuf },
}

fn load(args: &ConfigArgs) -> Result<mapsel_core::SimConfig> {
    let overrides = args
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parse_config(args.config.as_deref(), &overrides)?)
}

fn experiment(spec: ExperimentSpec) -> Result<()> {
    let report = run_experiment(&spec)?;
    for r in &report.runs {
        if let Ok(s) = &r.result {
            println!(
                "{} seed {}: avg handovers {}, avg delay {} s -> {}",
                r.strategy,
                r.seed,
                fmt(s.aggregates.avg_handovers),
                fmt(s.aggregates.avg_delay),
                r.dir.display()
            );
        }
    }
    println!("{}", report.comparison_csv.display());
    println!("{}", report.comparison_svg.display());
    Ok(())
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

fn verify(path: &PathBuf) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ledger = Ledger::from_json(&text)?;
    let ok = ledger.verify_chain();
    match (ok, ledger.head_hash()) {
        (true, Some(head)) => println!("ok: {} blocks, head {head}", ledger.len()),
        (true, None) => println!("ok: empty ledger"),
        (false, _) => println!("invalid: hash chain does not verify"),
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate {
            cfg,
            seed,
            strategy,
            out,
        } => {
            let config = load(&cfg)?;
            experiment(ExperimentSpec {
                strategies: vec![strategy.unwrap_or(config.strategy)],
                seeds: vec![seed.unwrap_or(config.rng_seed)],
                config,
                out_dir: out,
                jobs: cfg.jobs,
            })?;
            Ok(true)
        }
        Command::Compare {
            cfg,
            seeds,
            strategies,
            out,
        } => {
            let config = load(&cfg)?;
            experiment(ExperimentSpec {
                config,
                strategies,
                seeds,
                out_dir: out,
                jobs: cfg.jobs,
            })?;
            Ok(true)
        }
        Command::VerifyLedger { ledger } => verify(&ledger),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
