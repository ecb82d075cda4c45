//! Cross-strategy comparison table (`comparison.csv`) and chart (`comparison.svg`).

use std::fmt::Write as _;

use mapsel_core::Strategy;

use crate::report::RunSummary;

pub const COMPARISON_CSV: &str = "comparison.csv";
pub const COMPARISON_SVG: &str = "comparison.svg";

/// The four per-run metrics of the comparison figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    AvgHandovers,
    MaxHandovers,
    MinHandovers,
    AvgDelay,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::AvgHandovers,
        Metric::MaxHandovers,
        Metric::MinHandovers,
        Metric::AvgDelay,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::AvgHandovers => "avg_handovers",
            Metric::MaxHandovers => "max_handovers",
            Metric::MinHandovers => "min_handovers",
            Metric::AvgDelay => "avg_delay_s",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Metric::AvgHandovers => "Average handovers",
            Metric::MaxHandovers => "Maximum handovers",
            Metric::MinHandovers => "Minimum handovers",
            Metric::AvgDelay => "Average delay (s)",
        }
    }

    pub fn of(self, s: &RunSummary) -> Option<f64> {
        let a = &s.aggregates;
        match self {
            Metric::AvgHandovers => a.avg_handovers,
            Metric::MaxHandovers => a.max_handovers.map(|v| v as f64),
            Metric::MinHandovers => a.min_handovers.map(|v| v as f64),
            Metric::AvgDelay => a.avg_delay,
        }
    }
}

/// Mean and sample standard deviation over the runs that report a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub n: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len();
        if n == 0 {
            return Stat {
                n,
                mean: None,
                std: None,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Stat {
            n,
            mean: Some(mean),
            std: Some(std),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRow {
    pub strategy: Strategy,
    pub runs: usize,
    /// In [`Metric::ALL`] order.
    pub metrics: Vec<Stat>,
    pub tpr: Stat,
    pub fpr: Stat,
}

/// One row per strategy, in the order strategies first appear in `runs`.
pub fn summarize(runs: &[RunSummary]) -> Vec<StrategyRow> {
    let mut order: Vec<Strategy> = Vec::new();
    for r in runs {
        if !order.contains(&r.strategy) {
            order.push(r.strategy);
        }
    }
    order
        .into_iter()
        .map(|strategy| {
            let mine: Vec<&RunSummary> = runs.iter().filter(|r| r.strategy == strategy).collect();
            let collect = |f: &dyn Fn(&RunSummary) -> Option<f64>| -> Stat {
                Stat::of(&mine.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            StrategyRow {
                strategy,
                runs: mine.len(),
                metrics: Metric::ALL.iter().map(|m| collect(&|r| m.of(r))).collect(),
                tpr: collect(&|r| r.aggregates.detection.true_positive_rate),
                fpr: collect(&|r| r.aggregates.detection.false_positive_rate),
            }
        })
        .collect()
}

/// Number formatting shared by the CSV and the chart's `data-*` attributes;
/// shortest text that parses back to the same `f64`.
pub fn fmt_value(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn comparison_header() -> Vec<String> {
    let mut h = vec!["strategy".to_string(), "runs".to_string()];
    for m in Metric::ALL {
        h.push(format!("{}_mean", m.key()));
        h.push(format!("{}_std", m.key()));
    }
    for k in ["sybil_tpr", "sybil_fpr"] {
        h.push(format!("{k}_mean"));
        h.push(format!("{k}_std"));
    }
    h
}

pub fn comparison_csv(rows: &[StrategyRow]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(comparison_header())?;
    for row in rows {
        let mut rec = vec![row.strategy.to_string(), row.runs.to_string()];
        for s in row.metrics.iter().chain([&row.tpr, &row.fpr]) {
            rec.push(fmt_value(s.mean));
            rec.push(fmt_value(s.std));
        }
        w.write_record(rec)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const COLORS: [&str; 6] = ["#2b6cb0", "#c05621", "#2f855a", "#805ad5", "#b83280", "#4a5568"];

/// Bar label: compact, readable for values spanning many magnitudes.
fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// 960x540 chart, one panel per metric, one bar per strategy with its mean.
/// Each bar carries `data-strategy`, `data-metric`, `data-value` and
/// `data-std` attributes holding the exact `comparison.csv` values.
pub fn comparison_svg(rows: &[StrategyRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let (pw, ph) = (WIDTH / 2.0, (HEIGHT - 40.0) / 2.0);
    for (mi, metric) in Metric::ALL.iter().enumerate() {
        let (px, py) = ((mi % 2) as f64 * pw, 40.0 + (mi / 2) as f64 * ph);
        let (left, right, top, bottom) = (px + 50.0, px + pw - 20.0, py + 30.0, py + ph - 30.0);
        let _ = writeln!(s, r#"<g class="panel" data-metric="{}">"#, metric.key());
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            py + 18.0,
            metric.title()
        );
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#333"/>"##
        );
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#333"/>"##
        );

        let stats: Vec<Stat> = rows.iter().map(|r| r.metrics[mi]).collect();
        let peak = stats
            .iter()
            .filter_map(|st| st.mean.map(|m| m + st.std.unwrap_or(0.0)))
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        let scale = if peak > 0.0 { (bottom - top) / peak } else { 0.0 };
        let slot = (right - left) / rows.len().max(1) as f64;
        let bar_w = slot * 0.6;

        for (ri, (row, st)) in rows.iter().zip(&stats).enumerate() {
            let x = left + slot * ri as f64 + (slot - bar_w) / 2.0;
            let cx = x + bar_w / 2.0;
            let color = COLORS[ri % COLORS.len()];
            let mean = st.mean.unwrap_or(0.0);
            let h = (mean.max(0.0) * scale).min(bottom - top);
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-strategy="{}" data-metric="{}" data-value="{}" data-std="{}" x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{color}"/>"#,
                row.strategy,
                metric.key(),
                fmt_value(st.mean),
                fmt_value(st.std),
                bottom - h
            );
            if let (Some(m), Some(sd)) = (st.mean, st.std) {
                if sd > 0.0 && scale > 0.0 {
                    let y1 = bottom - ((m - sd).max(0.0) * scale).min(bottom - top);
                    let y2 = bottom - ((m + sd) * scale).min(bottom - top);
                    let _ = writeln!(
                        s,
                        r##"<line class="err" x1="{cx:.2}" y1="{y1:.2}" x2="{cx:.2}" y2="{y2:.2}" stroke="#111"/>"##
                    );
                }
            }
            let text = st.mean.map(label).unwrap_or_else(|| "n/a".into());
            let _ = writeln!(
                s,
                r#"<text class="label" x="{cx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                bottom - h - 4.0,
                escape(&text)
            );
            let _ = writeln!(
                s,
                r#"<text x="{cx:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
                bottom + 14.0,
                escape(row.strategy.name())
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
