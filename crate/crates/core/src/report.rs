//! Batch execution and metrics export.
//!
//! Scenario results render to a fixed column set in three formats:
//! plain-text table, CSV, and JSON. Identical inputs always produce
//! byte-identical documents.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scenario::ScenarioConfig;
use crate::simulator::{run_scenario, ScenarioReport, SimError};

pub const COLUMNS: [&str; 8] = [
    "scenario_id",
    "baseline_response",
    "recovered_response",
    "improvement_ratio",
    "passes",
    "transfers",
    "messages",
    "detection_latency",
];

/// One batch entry: a scenario name plus its result or error.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSlot {
    pub scenario_id: String,
    pub outcome: Result<ScenarioReport, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Tabular,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported format {0:?} (expected \"tabular\", \"csv\" or \"json\")")]
pub struct UnsupportedFormat(String);

impl FromStr for ExportFormat {
    type Err = UnsupportedFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tabular" => Ok(Self::Tabular),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tabular => "tabular",
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Run a batch of named scenarios, up to `parallelism` at a time. Results
/// come back in input order no matter how execution interleaves.
pub fn run_batch(configs: &[(String, ScenarioConfig)], parallelism: usize) -> Vec<BatchSlot> {
    let run_one = |(id, config): &(String, ScenarioConfig)| BatchSlot {
        scenario_id: id.clone(),
        outcome: run_scenario(config).map_err(|e: SimError| e.to_string()),
    };

    if parallelism <= 1 {
        return configs.iter().map(run_one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool construction");
    pool.install(|| configs.par_iter().map(run_one).collect())
}

struct Row {
    scenario_id: String,
    cells: Option<[String; 7]>,
    error: Option<String>,
}

fn rows(slots: &[BatchSlot]) -> Vec<Row> {
    slots
        .iter()
        .map(|slot| match &slot.outcome {
            Ok(report) => Row {
                scenario_id: slot.scenario_id.clone(),
                cells: Some([
                    match report.response_time_baseline {
                        Some(t) => t.to_string(),
                        None => "inf".to_string(),
                    },
                    report.response_time_recovered.to_string(),
                    match report.improvement_ratio {
                        Some(r) => format!("{r:.4}"),
                        None => "inf".to_string(),
                    },
                    report.redistribution.passes.to_string(),
                    report.redistribution.transfers.len().to_string(),
                    report.redistribution.messages.to_string(),
                    report.detection_latency.to_string(),
                ]),
                error: None,
            },
            Err(message) => Row {
                scenario_id: slot.scenario_id.clone(),
                cells: None,
                error: Some(message.clone()),
            },
        })
        .collect()
}

/// Render batch results in the requested format, stable column order.
pub fn export(slots: &[BatchSlot], format: ExportFormat) -> String {
    match format {
        ExportFormat::Tabular => export_tabular(slots),
        ExportFormat::Csv => export_csv(slots),
        ExportFormat::Json => export_json(slots),
    }
}

fn export_tabular(slots: &[BatchSlot]) -> String {
    let rows = rows(slots);
    let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for row in &rows {
        widths[0] = widths[0].max(row.scenario_id.len());
        if let Some(cells) = &row.cells {
            for (i, cell) in cells.iter().enumerate() {
                widths[i + 1] = widths[i + 1].max(cell.len());
            }
        }
    }

    let mut out = String::new();
    for (i, column) in COLUMNS.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        out.push_str(&format!("{column:<width$}", width = widths[i]));
    }
    out.push('\n');
    for row in rows {
        match (&row.cells, &row.error) {
            (Some(cells), _) => {
                out.push_str(&format!("{:<width$}", row.scenario_id, width = widths[0]));
                for (i, cell) in cells.iter().enumerate() {
                    out.push_str("  ");
                    out.push_str(&format!("{cell:<width$}", width = widths[i + 1]));
                }
                // Padding never trails past the last cell.
                while out.ends_with(' ') {
                    out.pop();
                }
                out.push('\n');
            }
            (None, Some(error)) => {
                out.push_str(&format!("{}  error: {error}\n", row.scenario_id));
            }
            (None, None) => unreachable!("a row is either a report or an error"),
        }
    }
    out
}

fn export_csv(slots: &[BatchSlot]) -> String {
    let mut out = String::new();
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for row in rows(slots) {
        let Some(cells) = row.cells else {
            continue; // error slots are not representable as metric rows
        };
        out.push_str(&csv_escape(&row.scenario_id));
        for cell in &cells {
            out.push(',');
            out.push_str(cell);
        }
        out.push('\n');
    }
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn export_json(slots: &[BatchSlot]) -> String {
    #[derive(Serialize)]
    struct JsonRow<'a> {
        scenario_id: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<&'a str>,
        #[serde(skip_serializing_if = "Option::is_none")]
        report: Option<&'a ScenarioReport>,
    }

    let rows: Vec<JsonRow> = slots
        .iter()
        .map(|slot| match &slot.outcome {
            Ok(report) => JsonRow {
                scenario_id: &slot.scenario_id,
                error: None,
                report: Some(report),
            },
            Err(message) => JsonRow {
                scenario_id: &slot.scenario_id,
                error: Some(message),
                report: None,
            },
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&rows).expect("reports serialize");
    out.push('\n');
    out
}
