//! Command-line front end: run, batch, compare and validate scenarios.
//!
//! Exit codes: 0 success, 1 a scenario failed at runtime, 2 a file failed
//! to parse or validate (validation outranks runtime failures).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use loadshift::report::{export, run_batch, BatchSlot, ExportFormat};
use loadshift::scenario::{load_config, ConfigError, ScenarioConfig};
use loadshift::simulator::run_scenario;

const EXIT_SCENARIO_FAILURE: u8 = 1;
const EXIT_VALIDATION_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "loadshift",
    version,
    about = "Rank-based recovery and load redistribution simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its metrics.
    Run {
        file: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Output format: tabular, csv or json.
        #[arg(long, default_value = "tabular")]
        format: String,
    },
    /// Run every .toml scenario in a directory, in file-name order.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Output format: tabular, csv or json.
        #[arg(long, default_value = "tabular")]
        format: String,
        /// How many scenarios to run concurrently.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
    },
    /// Summarize recovered vs baseline response times.
    Compare {
        files: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse a scenario file and report every problem found.
    Validate { file: PathBuf },
}

/// Command-line overrides always win over scenario-file values.
#[derive(Args)]
struct Overrides {
    /// Replace the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace the redistribution target spread.
    #[arg(long)]
    epsilon: Option<u64>,
    /// Replace the per-episode pass budget.
    #[arg(long)]
    max_passes: Option<u32>,
}

impl Overrides {
    fn apply(&self, config: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(epsilon) = self.epsilon {
            config.epsilon = epsilon;
        }
        if let Some(max_passes) = self.max_passes {
            config.max_passes = Some(max_passes);
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            file,
            overrides,
            format,
        } => cmd_run(&file, &overrides, &format),
        Command::Batch {
            dir,
            overrides,
            format,
            parallelism,
        } => cmd_batch(&dir, &overrides, &format, parallelism),
        Command::Compare { files, overrides } => cmd_compare(&files, &overrides),
        Command::Validate { file } => cmd_validate(&file),
    }
}

fn scenario_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn parse_format(format: &str) -> Result<ExportFormat, ExitCode> {
    format.parse().map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(EXIT_VALIDATION_FAILURE)
    })
}

fn load(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let mut config = load_config(path)?;
    overrides.apply(&mut config);
    Ok(config)
}

fn cmd_run(file: &Path, overrides: &Overrides, format: &str) -> ExitCode {
    let format = match parse_format(format) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let config = match load(file, overrides) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(EXIT_VALIDATION_FAILURE);
        }
    };
    let outcome = run_scenario(&config).map_err(|e| e.to_string());
    let failed = outcome.is_err();
    let slot = BatchSlot {
        scenario_id: scenario_id(file),
        outcome,
    };
    print!("{}", export(&[slot], format));
    if failed {
        ExitCode::from(EXIT_SCENARIO_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_batch(dir: &Path, overrides: &Overrides, format: &str, parallelism: usize) -> ExitCode {
    let format = match parse_format(format) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
            .collect(),
        Err(e) => {
            eprintln!("{}: {e}", dir.display());
            return ExitCode::from(EXIT_VALIDATION_FAILURE);
        }
    };
    files.sort();

    let loaded: Vec<(String, Result<ScenarioConfig, ConfigError>)> = files
        .iter()
        .map(|path| (scenario_id(path), load(path, overrides)))
        .collect();
    let runnable: Vec<(String, ScenarioConfig)> = loaded
        .iter()
        .filter_map(|(id, result)| result.as_ref().ok().map(|c| (id.clone(), c.clone())))
        .collect();
    let mut reports = run_batch(&runnable, parallelism.max(1)).into_iter();

    let slots: Vec<BatchSlot> = loaded
        .iter()
        .map(|(id, result)| match result {
            Ok(_) => reports.next().expect("one report per runnable scenario"),
            Err(e) => BatchSlot {
                scenario_id: id.clone(),
                outcome: Err(e.to_string()),
            },
        })
        .collect();

    print!("{}", export(&slots, format));
    for slot in &slots {
        if let Err(e) = &slot.outcome {
            eprintln!("{}: {e}", slot.scenario_id);
        }
    }

    if loaded.iter().any(|(_, r)| r.is_err()) {
        ExitCode::from(EXIT_VALIDATION_FAILURE)
    } else if slots.iter().any(|s| s.outcome.is_err()) {
        ExitCode::from(EXIT_SCENARIO_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_compare(files: &[PathBuf], overrides: &Overrides) -> ExitCode {
    let mut rows: Vec<(String, String, String, String, &'static str)> = Vec::new();
    let mut improved = 0usize;
    let mut config_failures = 0usize;
    let mut run_failures = 0usize;

    for file in files {
        let id = scenario_id(file);
        let config = match load(file, overrides) {
            Ok(config) => config,
            Err(e) => {
                eprintln!("{}: {e}", file.display());
                config_failures += 1;
                continue;
            }
        };
        match run_scenario(&config) {
            Ok(report) => {
                let baseline = report
                    .response_time_baseline
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| "inf".to_string());
                let ratio = report
                    .improvement_ratio
                    .map(|r| format!("{r:.4}"))
                    .unwrap_or_else(|| "inf".to_string());
                let verdict = match report.improvement_ratio {
                    Some(r) if r > 1.0 => "improved",
                    Some(r) if r < 1.0 => "regressed",
                    Some(_) => "equal",
                    None => "improved", // finite recovered vs stalled baseline
                };
                if verdict == "improved" {
                    improved += 1;
                }
                rows.push((
                    id,
                    baseline,
                    report.response_time_recovered.to_string(),
                    ratio,
                    verdict,
                ));
            }
            Err(e) => {
                eprintln!("{id}: {e}");
                run_failures += 1;
            }
        }
    }

    println!(
        "{:<24} {:>10} {:>10} {:>8}  verdict",
        "scenario", "baseline", "recovered", "ratio"
    );
    for (id, baseline, recovered, ratio, verdict) in &rows {
        println!("{id:<24} {baseline:>10} {recovered:>10} {ratio:>8}  {verdict}");
    }
    println!("improved {improved}/{} scenarios", rows.len());

    if config_failures > 0 {
        ExitCode::from(EXIT_VALIDATION_FAILURE)
    } else if run_failures > 0 {
        ExitCode::from(EXIT_SCENARIO_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_validate(file: &Path) -> ExitCode {
    match load_config(file) {
        Ok(config) => {
            println!(
                "{}: ok ({} nodes, {} failures, {} arrivals)",
                file.display(),
                config.initial_loads.len(),
                config.failures.len(),
                config.arrivals.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            ExitCode::from(EXIT_VALIDATION_FAILURE)
        }
    }
}
