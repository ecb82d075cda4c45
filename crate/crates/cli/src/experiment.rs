//! Runs every (strategy, seed) pair of an experiment and writes its outputs.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/<strategy>/seed-<seed>/{metrics.csv, summary.json, ledger.json}
//! <out>/comparison.csv
//! <out>/comparison.svg
//! ```
//!
//! A run that fails leaves a `FAILED` file with the diagnostic in its
//! directory (when the directory could be created), and the comparison pair is
//! only written when every run succeeded.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use log::{error, info};
use mapsel_core::{run_simulation, SimConfig, Strategy};
use thiserror::Error;

use crate::comparison::{comparison_csv, comparison_svg, summarize, COMPARISON_CSV, COMPARISON_SVG};
use crate::report::{write_run, RunSummary};

pub const FAILED_FILE: &str = "FAILED";

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub config: SimConfig,
    pub strategies: Vec<Strategy>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Worker threads; 0 picks the available parallelism.
    pub jobs: usize,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("experiment needs at least one strategy")]
    NoStrategies,
    #[error("experiment needs at least one seed")]
    NoSeeds,
    #[error("strategy `{0}` listed twice")]
    DuplicateStrategy(Strategy),
    #[error("seed {0} listed twice")]
    DuplicateSeed(u64),
    #[error(transparent)]
    Config(#[from] mapsel_core::ConfigError),
    #[error("output directory {path}: {source}")]
    OutputDir { path: PathBuf, source: io::Error },
    #[error("{failed} of {total} runs failed; comparison not written")]
    RunsFailed { failed: usize, total: usize },
    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
}

#[derive(Debug)]
pub struct RunRecord {
    pub strategy: Strategy,
    pub seed: u64,
    pub dir: PathBuf,
    pub result: Result<RunSummary, String>,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub runs: Vec<RunRecord>,
    pub comparison_csv: PathBuf,
    pub comparison_svg: PathBuf,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.strategies.is_empty() {
            return Err(ExperimentError::NoStrategies);
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::NoSeeds);
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return Err(ExperimentError::DuplicateStrategy(*s));
            }
        }
        for (i, s) in self.seeds.iter().enumerate() {
            if self.seeds[..i].contains(s) {
                return Err(ExperimentError::DuplicateSeed(*s));
            }
        }
        self.config.validate()?;
        Ok(())
    }

    pub fn run_dir(&self, strategy: Strategy, seed: u64) -> PathBuf {
        self.out_dir.join(strategy.name()).join(format!("seed-{seed}"))
    }

    fn pairs(&self) -> Vec<(Strategy, u64)> {
        self.strategies
            .iter()
            .flat_map(|&st| self.seeds.iter().map(move |&seed| (st, seed)))
            .collect()
    }
}

fn run_one(spec: &ExperimentSpec, strategy: Strategy, seed: u64) -> RunRecord {
    let dir = spec.run_dir(strategy, seed);
    let cfg = SimConfig {
        strategy,
        rng_seed: seed,
        ..spec.config.clone()
    };
    let result = (|| -> Result<RunSummary, String> {
        fs::create_dir_all(&dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
        let _ = fs::remove_file(dir.join(FAILED_FILE));
        let output = run_simulation(&cfg).map_err(|e| e.to_string())?;
        info!(
            "{strategy} seed {seed}: {} rounds, {} identities in {:.2?}",
            output.report.rounds_executed,
            output.report.sybil_truth.len(),
            output.report.wall_clock
        );
        write_run(&dir, &output).map_err(|e| format!("writing {}: {e}", dir.display()))
    })();
    if let Err(msg) = &result {
        error!("{strategy} seed {seed} failed: {msg}");
        let _ = fs::write(dir.join(FAILED_FILE), format!("{msg}\n"));
    }
    RunRecord {
        strategy,
        seed,
        dir,
        result,
    }
}

fn run_all(spec: &ExperimentSpec) -> Vec<RunRecord> {
    let pairs = spec.pairs();
    let workers = match spec.jobs {
        0 => thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(pairs.len())
    .max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<RunRecord>>> = Mutex::new((0..pairs.len()).map(|_| None).collect());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(strategy, seed)) = pairs.get(i) else {
                    break;
                };
                let record = run_one(spec, strategy, seed);
                slots.lock().unwrap()[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every run recorded"))
        .collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), ExperimentError> {
    fs::write(path, text).map_err(|source| ExperimentError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the whole grid. Returns the per-run records on success; on any
/// failed run returns [`ExperimentError::RunsFailed`] without comparison files.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, ExperimentError> {
    spec.validate()?;
    fs::create_dir_all(&spec.out_dir).map_err(|source| ExperimentError::OutputDir {
        path: spec.out_dir.clone(),
        source,
    })?;
    let comparison_csv_path = spec.out_dir.join(COMPARISON_CSV);
    let comparison_svg_path = spec.out_dir.join(COMPARISON_SVG);
    // stale comparison files from an earlier invocation would misdescribe this one
    for p in [&comparison_csv_path, &comparison_svg_path] {
        match fs::remove_file(p) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(source) => {
                return Err(ExperimentError::OutputDir {
                    path: p.clone(),
                    source,
                })
            }
        }
    }

    let runs = run_all(spec);
    let failed = runs.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        return Err(ExperimentError::RunsFailed {
            failed,
            total: runs.len(),
        });
    }

    let summaries: Vec<RunSummary> = runs
        .iter()
        .filter_map(|r| r.result.as_ref().ok().cloned())
        .collect();
    let rows = summarize(&summaries);
    let csv_text = comparison_csv(&rows).map_err(|e| ExperimentError::Write {
        path: comparison_csv_path.clone(),
        source: io::Error::other(e),
    })?;
    write_file(&comparison_csv_path, &csv_text)?;
    write_file(&comparison_svg_path, &comparison_svg(&rows))?;
    Ok(ExperimentReport {
        runs,
        comparison_csv: comparison_csv_path,
        comparison_svg: comparison_svg_path,
    })
}
