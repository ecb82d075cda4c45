//! Per-run output files: `metrics.csv`, `summary.json`, `ledger.json`.

use std::fs;
use std::io;
use std::path::Path;

use mapsel_core::{
    Aggregates, Hash256, Ledger, RoundMetrics, SimConfig, SimulationOutput, Strategy,
};
use serde::{Deserialize, Serialize};

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const LEDGER_FILE: &str = "ledger.json";

/// Column order of `metrics.csv`. Empty cells mean "no served vehicle" (for
/// handovers) or "no connected vehicle" (for delay) in that round.
pub const METRICS_HEADER: [&str; 9] = [
    "round",
    "vehicle_count",
    "elected_maps",
    "flagged_count",
    "avg_handover",
    "max_handover",
    "min_handover",
    "avg_delay_s",
    "disconnected",
];

/// One row of `metrics.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub round: u64,
    pub vehicle_count: usize,
    pub elected_maps: usize,
    pub flagged_count: usize,
    pub avg_handover: Option<f64>,
    pub max_handover: Option<u32>,
    pub min_handover: Option<u32>,
    pub avg_delay_s: Option<f64>,
    pub disconnected: usize,
}

impl MetricsRow {
    pub fn from_round(m: &RoundMetrics) -> MetricsRow {
        let s = m.summary();
        MetricsRow {
            round: m.round,
            vehicle_count: m.vehicle_count,
            elected_maps: m.elected_count(),
            flagged_count: m.flagged_count,
            avg_handover: s.avg_handover,
            max_handover: s.max_handover,
            min_handover: s.min_handover,
            avg_delay_s: s.avg_delay,
            disconnected: m.disconnected,
        }
    }
}

/// Run-level figures derived only from `metrics.csv` rows, so a reader can
/// recompute them from the CSV and compare exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundAggregates {
    pub rounds: usize,
    pub mean_elected_maps: Option<f64>,
    pub final_flagged_count: Option<usize>,
    /// Mean of the per-round `avg_handover` over rounds that have one.
    pub mean_avg_handover: Option<f64>,
    pub max_max_handover: Option<u32>,
    pub min_min_handover: Option<u32>,
    pub mean_avg_delay_s: Option<f64>,
    pub total_disconnected: usize,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn round_aggregates(rows: &[MetricsRow]) -> RoundAggregates {
    RoundAggregates {
        rounds: rows.len(),
        mean_elected_maps: mean_of(rows.iter().map(|r| r.elected_maps as f64)),
        final_flagged_count: rows.last().map(|r| r.flagged_count),
        mean_avg_handover: mean_of(rows.iter().filter_map(|r| r.avg_handover)),
        max_max_handover: rows.iter().filter_map(|r| r.max_handover).max(),
        min_min_handover: rows.iter().filter_map(|r| r.min_handover).min(),
        mean_avg_delay_s: mean_of(rows.iter().filter_map(|r| r.avg_delay_s)),
        total_disconnected: rows.iter().map(|r| r.disconnected).sum(),
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: Strategy,
    pub seed: u64,
    pub config: SimConfig,
    pub rounds_executed: u64,
    pub identities: usize,
    pub sybil_identities: usize,
    pub aggregates: Aggregates,
    pub round_aggregates: RoundAggregates,
    pub ledger_blocks: usize,
    pub ledger_head: Option<Hash256>,
}

impl RunSummary {
    pub fn new(output: &SimulationOutput, rows: &[MetricsRow]) -> RunSummary {
        let r = &output.report;
        RunSummary {
            strategy: r.strategy,
            seed: r.seed,
            config: r.config.clone(),
            rounds_executed: r.rounds_executed,
            identities: r.sybil_truth.len(),
            sybil_identities: r.sybil_truth.iter().filter(|s| **s).count(),
            aggregates: r.aggregates.clone(),
            round_aggregates: round_aggregates(rows),
            ledger_blocks: r.ledger_blocks,
            ledger_head: r.ledger_head,
        }
    }
}

pub fn metrics_rows(rounds: &[RoundMetrics]) -> Vec<MetricsRow> {
    rounds.iter().map(MetricsRow::from_round).collect()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_metrics_csv(text: &str) -> Result<Vec<MetricsRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != METRICS_HEADER {
        return Err(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected metrics header {header:?}"),
        )));
    }
    r.deserialize().collect()
}

/// Writes the three per-run files into `dir`, which must exist.
pub fn write_run(dir: &Path, output: &SimulationOutput) -> io::Result<RunSummary> {
    let rows = metrics_rows(&output.report.rounds);
    let csv_text = metrics_csv(&rows).map_err(io::Error::other)?;
    fs::write(dir.join(METRICS_FILE), csv_text)?;
    let summary = RunSummary::new(output, &rows);
    fs::write(dir.join(SUMMARY_FILE), to_json(&summary))?;
    fs::write(dir.join(LEDGER_FILE), ledger_json(&output.ledger))?;
    Ok(summary)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn ledger_json(ledger: &Ledger) -> String {
    ledger.to_json() + "\n"
}
