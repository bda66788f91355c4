//! Scenario files: parsing, exhaustive validation, and the validated
//! configuration a simulation runs from.
//!
//! Scenarios are TOML with an explicit `schema_version`. Unknown fields are
//! rejected outright; value problems are collected and reported all at
//! once, not one at a time.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cluster::{ClusterState, ComputeNode, NodeId, Tick};
use crate::reassignment::QueuePolicy;
use crate::simulator::ResponseModel;

/// Scenario schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// How the static baseline handles a node failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum BaselinePolicy {
    /// The failed node's work is lost in place; the baseline response time
    /// is reported as unbounded.
    Stall,
    /// The failed node's work moves wholesale to one designated peer.
    Successor { node: NodeId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEvent {
    pub tick: Tick,
    pub node: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalEvent {
    pub tick: Tick,
    pub size: u64,
}

/// A fully validated scenario. Every invariant the simulator relies on has
/// been checked before a value of this type exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub initial_loads: Vec<u64>,
    /// Declared job sizes per node; an empty list means the node's load has
    /// no known structure.
    pub declared_jobs: Vec<Vec<u64>>,
    pub heartbeat_period: Tick,
    pub heartbeat_miss_threshold: u64,
    pub response: ResponseModel,
    /// Spread at which redistribution stops.
    pub epsilon: u64,
    /// Pass budget per recovery episode; defaults to the alive-node count
    /// at the time the episode starts.
    pub max_passes: Option<u32>,
    pub queue_policy: QueuePolicy,
    pub baseline_policy: BaselinePolicy,
    pub failures: Vec<FailureEvent>,
    pub arrivals: Vec<ArrivalEvent>,
}

impl ScenarioConfig {
    /// Scenario with the given allocation and all defaults: heartbeat 10/3,
    /// unit processing rate, zero overhead, epsilon 1, stall baseline.
    pub fn from_loads(initial_loads: &[u64]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            initial_loads: initial_loads.to_vec(),
            declared_jobs: vec![Vec::new(); initial_loads.len()],
            heartbeat_period: 10,
            heartbeat_miss_threshold: 3,
            response: ResponseModel {
                rate: 1,
                fixed_overhead: 0,
            },
            epsilon: 1,
            max_passes: None,
            queue_policy: QueuePolicy::FailureFirst,
            baseline_policy: BaselinePolicy::Stall,
            failures: Vec::new(),
            arrivals: Vec::new(),
        }
    }

    /// Initial cluster state for this scenario.
    pub fn build_cluster(&self) -> ClusterState {
        let nodes = self
            .initial_loads
            .iter()
            .zip(&self.declared_jobs)
            .enumerate()
            .map(|(i, (&load, jobs))| {
                let id = NodeId(i as u32);
                if jobs.is_empty() {
                    ComputeNode::new(id, load)
                } else {
                    ComputeNode::with_declared_jobs(id, load, jobs.clone())
                }
            })
            .collect();
        ClusterState::with_nodes(nodes).expect("node ids are unique by construction")
    }

    /// Effective pass budget for a recovery episode over `alive` nodes.
    pub fn pass_budget(&self, alive: usize) -> u32 {
        self.max_passes.unwrap_or_else(|| alive.max(1) as u32)
    }
}

/// Content hash of a validated config, as lowercase hex. Event logs carry
/// it so a log can never be replayed against a different configuration.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("config always serializes");
    Sha256::digest(&canonical)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One field-level problem found during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid scenario ({} issue{}):\n{}",
        .0.len(),
        if .0.len() == 1 { "" } else { "s" },
        .0.iter().map(|i| format!("  - {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<ValidationIssue>),
}

/// Parse and validate a scenario from TOML text. Validation reports every
/// problem it finds, not just the first.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    validate(raw).map_err(ConfigError::Validation)
}

/// Read, parse and validate a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: i64,
    seed: Option<i64>,
    cluster: Option<RawCluster>,
    heartbeat: Option<RawHeartbeat>,
    response: Option<RawResponse>,
    recovery: Option<RawRecovery>,
    baseline: Option<RawBaseline>,
    #[serde(default)]
    failures: Vec<RawFailure>,
    #[serde(default)]
    arrivals: Vec<RawArrival>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    initial_loads: Option<Vec<i64>>,
    jobs: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeartbeat {
    period: Option<i64>,
    miss_threshold: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResponse {
    rate: Option<i64>,
    fixed_overhead: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecovery {
    epsilon: Option<i64>,
    max_passes: Option<i64>,
    queue_policy: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaseline {
    policy: Option<String>,
    successor: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFailure {
    tick: i64,
    node: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArrival {
    tick: i64,
    size: i64,
}

fn push_issue(issues: &mut Vec<ValidationIssue>, field: impl Into<String>, message: String) {
    issues.push(ValidationIssue {
        field: field.into(),
        message,
    });
}

fn positive_or(
    issues: &mut Vec<ValidationIssue>,
    field: &str,
    value: Option<i64>,
    default: u64,
) -> u64 {
    match value {
        None => default,
        Some(v) if v >= 1 => v as u64,
        Some(v) => {
            push_issue(issues, field, format!("must be at least 1, got {v}"));
            default
        }
    }
}

fn validate(raw: RawConfig) -> Result<ScenarioConfig, Vec<ValidationIssue>> {
    let mut issues: Vec<ValidationIssue> = Vec::new();

    if raw.schema_version != SCHEMA_VERSION as i64 {
        push_issue(
            &mut issues,
            "schema_version",
            format!(
                "unsupported version {} (this build understands {})",
                raw.schema_version, SCHEMA_VERSION
            ),
        );
    }

    let seed = match raw.seed {
        None => 0,
        Some(s) if s >= 0 => s as u64,
        Some(s) => {
            push_issue(
                &mut issues,
                "seed",
                format!("must be non-negative, got {s}"),
            );
            0
        }
    };

    let mut initial_loads: Vec<u64> = Vec::new();
    let mut declared_jobs: Vec<Vec<u64>> = Vec::new();
    match &raw.cluster {
        None => push_issue(&mut issues, "cluster", "section is required".to_string()),
        Some(cluster) => {
            match &cluster.initial_loads {
                None => push_issue(
                    &mut issues,
                    "cluster.initial_loads",
                    "field is required".to_string(),
                ),
                Some(loads) => {
                    if loads.is_empty() {
                        push_issue(
                            &mut issues,
                            "cluster.initial_loads",
                            "at least one node is required".to_string(),
                        );
                    }
                    for (i, &load) in loads.iter().enumerate() {
                        if load < 0 {
                            push_issue(
                                &mut issues,
                                format!("cluster.initial_loads[{i}]"),
                                format!("load must be non-negative, got {load}"),
                            );
                        }
                    }
                    initial_loads = loads.iter().map(|&l| l.max(0) as u64).collect();
                }
            }
            declared_jobs = vec![Vec::new(); initial_loads.len()];
            if let Some(jobs) = &cluster.jobs {
                if !initial_loads.is_empty() && jobs.len() != initial_loads.len() {
                    issues.push(ValidationIssue {
                        field: "cluster.jobs".to_string(),
                        message: format!(
                            "must list one entry per node ({} entries for {} nodes)",
                            jobs.len(),
                            initial_loads.len()
                        ),
                    });
                } else {
                    for (i, list) in jobs.iter().enumerate() {
                        let mut ok = true;
                        for (j, &size) in list.iter().enumerate() {
                            if size < 1 {
                                issues.push(ValidationIssue {
                                    field: format!("cluster.jobs[{i}][{j}]"),
                                    message: format!("job size must be at least 1, got {size}"),
                                });
                                ok = false;
                            }
                        }
                        let sizes: Vec<u64> = list.iter().map(|&s| s.max(0) as u64).collect();
                        let sum: u64 = sizes.iter().sum();
                        if ok && !sizes.is_empty() && sum != initial_loads[i] {
                            issues.push(ValidationIssue {
                                field: format!("cluster.jobs[{i}]"),
                                message: format!(
                                    "sizes sum to {sum} but the node load is {}",
                                    initial_loads[i]
                                ),
                            });
                        }
                        declared_jobs[i] = sizes;
                    }
                }
            }
        }
    }
    let node_count = initial_loads.len();

    let heartbeat_period = positive_or(
        &mut issues,
        "heartbeat.period",
        raw.heartbeat.as_ref().and_then(|h| h.period),
        10,
    );
    let heartbeat_miss_threshold = positive_or(
        &mut issues,
        "heartbeat.miss_threshold",
        raw.heartbeat.as_ref().and_then(|h| h.miss_threshold),
        3,
    );

    let rate = positive_or(
        &mut issues,
        "response.rate",
        raw.response.as_ref().and_then(|r| r.rate),
        1,
    );
    let fixed_overhead = match raw.response.as_ref().and_then(|r| r.fixed_overhead) {
        None => 0,
        Some(v) if v >= 0 => v as u64,
        Some(v) => {
            issues.push(ValidationIssue {
                field: "response.fixed_overhead".to_string(),
                message: format!("must be non-negative, got {v}"),
            });
            0
        }
    };

    let epsilon = positive_or(
        &mut issues,
        "recovery.epsilon",
        raw.recovery.as_ref().and_then(|r| r.epsilon),
        1,
    );
    let max_passes = match raw.recovery.as_ref().and_then(|r| r.max_passes) {
        None => None,
        Some(v) if v >= 1 => Some(v as u32),
        Some(v) => {
            issues.push(ValidationIssue {
                field: "recovery.max_passes".to_string(),
                message: format!("must be at least 1, got {v}"),
            });
            None
        }
    };
    let queue_policy = match raw
        .recovery
        .as_ref()
        .and_then(|r| r.queue_policy.as_deref())
    {
        None | Some("failure_first") => QueuePolicy::FailureFirst,
        Some("fifo") => QueuePolicy::Fifo,
        Some(other) => {
            issues.push(ValidationIssue {
                field: "recovery.queue_policy".to_string(),
                message: format!(
                    "unknown policy {other:?} (expected \"failure_first\" or \"fifo\")"
                ),
            });
            QueuePolicy::FailureFirst
        }
    };

    let baseline_policy = match raw.baseline.as_ref() {
        None => BaselinePolicy::Stall,
        Some(b) => match b.policy.as_deref() {
            None | Some("stall") => {
                if b.successor.is_some() {
                    issues.push(ValidationIssue {
                        field: "baseline.successor".to_string(),
                        message: "only meaningful with policy = \"successor\"".to_string(),
                    });
                }
                BaselinePolicy::Stall
            }
            Some("successor") => match b.successor {
                None => {
                    issues.push(ValidationIssue {
                        field: "baseline.successor".to_string(),
                        message: "required when policy = \"successor\"".to_string(),
                    });
                    BaselinePolicy::Stall
                }
                Some(node) => {
                    if node < 0 || (node_count > 0 && node as usize >= node_count) {
                        issues.push(ValidationIssue {
                            field: "baseline.successor".to_string(),
                            message: format!("node {node} does not exist"),
                        });
                    }
                    BaselinePolicy::Successor {
                        node: NodeId(node.max(0) as u32),
                    }
                }
            },
            Some(other) => {
                issues.push(ValidationIssue {
                    field: "baseline.policy".to_string(),
                    message: format!(
                        "unknown policy {other:?} (expected \"stall\" or \"successor\")"
                    ),
                });
                BaselinePolicy::Stall
            }
        },
    };

    let mut failures = Vec::with_capacity(raw.failures.len());
    for (i, f) in raw.failures.iter().enumerate() {
        if f.tick < 0 {
            issues.push(ValidationIssue {
                field: format!("failures[{i}].tick"),
                message: format!("must be non-negative, got {}", f.tick),
            });
        }
        if f.node < 0 || (node_count > 0 && f.node as usize >= node_count) {
            issues.push(ValidationIssue {
                field: format!("failures[{i}].node"),
                message: format!("node {} does not exist", f.node),
            });
        }
        if raw.failures[..i].iter().any(|prev| prev.node == f.node) {
            issues.push(ValidationIssue {
                field: format!("failures[{i}].node"),
                message: format!("node {} fails more than once", f.node),
            });
        }
        failures.push(FailureEvent {
            tick: f.tick.max(0) as u64,
            node: NodeId(f.node.max(0) as u32),
        });
    }

    let mut arrivals = Vec::with_capacity(raw.arrivals.len());
    for (i, a) in raw.arrivals.iter().enumerate() {
        if a.tick < 0 {
            issues.push(ValidationIssue {
                field: format!("arrivals[{i}].tick"),
                message: format!("must be non-negative, got {}", a.tick),
            });
        }
        if a.size < 1 {
            issues.push(ValidationIssue {
                field: format!("arrivals[{i}].size"),
                message: format!("must be at least 1, got {}", a.size),
            });
        }
        arrivals.push(ArrivalEvent {
            tick: a.tick.max(0) as u64,
            size: a.size.max(1) as u64,
        });
    }

    if !issues.is_empty() {
        return Err(issues);
    }

    Ok(ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        seed,
        initial_loads,
        declared_jobs,
        heartbeat_period,
        heartbeat_miss_threshold,
        response: ResponseModel {
            rate,
            fixed_overhead,
        },
        epsilon,
        max_passes,
        queue_policy,
        baseline_policy,
        failures,
        arrivals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
schema_version = 1

[cluster]
initial_loads = [4, 9, 32, 40]
";

    #[test]
    fn minimal_scenario_gets_defaults() {
        let config = parse_config(MINIMAL).unwrap();
        assert_eq!(config.initial_loads, vec![4, 9, 32, 40]);
        assert_eq!(config.seed, 0);
        assert_eq!(config.heartbeat_period, 10);
        assert_eq!(config.heartbeat_miss_threshold, 3);
        assert_eq!(config.response.rate, 1);
        assert_eq!(config.epsilon, 1);
        assert_eq!(config.max_passes, None);
        assert_eq!(config.queue_policy, QueuePolicy::FailureFirst);
        assert_eq!(config.baseline_policy, BaselinePolicy::Stall);
        assert_eq!(config.pass_budget(4), 4);
    }

    #[test]
    fn negative_load_is_reported_with_its_field() {
        let text = "\
schema_version = 1

[cluster]
initial_loads = [4, -9, 32]
";
        let err = parse_config(text).unwrap_err();
        let ConfigError::Validation(issues) = err else {
            panic!("expected validation error, got {err}")
        };
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].field, "cluster.initial_loads[1]");
    }

    #[test]
    fn unknown_failure_node_is_rejected() {
        let text = "\
schema_version = 1

[cluster]
initial_loads = [1, 2]

[[failures]]
tick = 3
node = 9
";
        let err = parse_config(text).unwrap_err();
        let ConfigError::Validation(issues) = err else {
            panic!("expected validation error")
        };
        assert!(issues.iter().any(|i| i.field == "failures[0].node"));
    }

    #[test]
    fn all_problems_are_reported_at_once() {
        let text = "\
schema_version = 3
seed = -1

[cluster]
initial_loads = [-1]

[heartbeat]
period = 0

[[arrivals]]
tick = -2
size = 0
";
        let err = parse_config(text).unwrap_err();
        let ConfigError::Validation(issues) = err else {
            panic!("expected validation error")
        };
        let fields: Vec<&str> = issues.iter().map(|i| i.field.as_str()).collect();
        assert!(fields.contains(&"schema_version"));
        assert!(fields.contains(&"seed"));
        assert!(fields.contains(&"cluster.initial_loads[0]"));
        assert!(fields.contains(&"heartbeat.period"));
        assert!(fields.contains(&"arrivals[0].tick"));
        assert!(fields.contains(&"arrivals[0].size"));
        assert_eq!(issues.len(), 6);
    }

    #[test]
    fn unknown_fields_are_rejected_at_parse_time() {
        let text = "\
schema_version = 1
epsilonn = 2

[cluster]
initial_loads = [1]
";
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn declared_jobs_must_sum_to_the_node_load() {
        let text = "\
schema_version = 1

[cluster]
initial_loads = [10, 5]
jobs = [[4, 4], []]
";
        let err = parse_config(text).unwrap_err();
        let ConfigError::Validation(issues) = err else {
            panic!("expected validation error")
        };
        assert_eq!(issues[0].field, "cluster.jobs[0]");

        let good = "\
schema_version = 1

[cluster]
initial_loads = [10, 5]
jobs = [[4, 6], []]
";
        let config = parse_config(good).unwrap();
        assert_eq!(config.declared_jobs, vec![vec![4, 6], vec![]]);
    }

    #[test]
    fn successor_baseline_requires_a_valid_node() {
        let text = "\
schema_version = 1

[cluster]
initial_loads = [1, 2]

[baseline]
policy = \"successor\"
successor = 1
";
        let config = parse_config(text).unwrap();
        assert_eq!(
            config.baseline_policy,
            BaselinePolicy::Successor { node: NodeId(1) }
        );

        let missing = "\
schema_version = 1

[cluster]
initial_loads = [1, 2]

[baseline]
policy = \"successor\"
";
        assert!(matches!(
            parse_config(missing),
            Err(ConfigError::Validation(_))
        ));
    }

    #[test]
    fn load_config_reads_files_and_surfaces_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.toml");
        std::fs::write(&path, MINIMAL).unwrap();
        let config = load_config(&path).unwrap();
        assert_eq!(config.initial_loads, vec![4, 9, 32, 40]);

        let missing = load_config(&dir.path().join("absent.toml"));
        assert!(matches!(missing, Err(ConfigError::Io(_))));
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = parse_config(MINIMAL).unwrap();
        let b = parse_config(MINIMAL).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));

        let mut c = a.clone();
        c.response.rate = 2;
        assert_ne!(config_hash(&a), config_hash(&c));
    }
}
