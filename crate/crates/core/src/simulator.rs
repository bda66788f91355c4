//! Deterministic tick-driven scenario engine.
//!
//! A recovered-mode run walks the control timeline tick by tick with a
//! fixed in-tick order: node failures, heartbeats, job arrivals, any due
//! recovery trigger, then detection. A recovery trigger marks the detected
//! nodes failed, levels the surviving loads (phase 1), and only then drains
//! the pending queues greedily (phase 2). One trigger always fires at tick
//! zero to recover the initial allocation; later ones fire one tick after
//! the heartbeat ledger first suspects a node. Arrivals that show up while
//! no recovery is in flight are placed greedily at their own tick.
//!
//! Load processing is modeled after allocation settles: every alive node
//! completes `rate` units per tick, so the response time is the makespan of
//! the final allocation plus the configured fixed overhead. The baseline
//! never rebalances: it is computed directly from the static allocation,
//! with round-robin arrival placement and the configured policy for
//! failures.
//!
//! Every recovered-mode run emits a line-delimited event log headed by the
//! full effective config and its content hash; [`replay`] re-executes that
//! config and accepts the log only if it reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{JobId, NodeId, Tick};
use crate::error::ClusterError;
use crate::heartbeat::HeartbeatLedger;
use crate::ranking::RankTable;
use crate::reassignment::{allocate_pending_jobs, enqueue_arrival, Assignment};
use crate::redistribution::{redistribute, RedistributionReport};
use crate::scenario::{config_hash, BaselinePolicy, ScenarioConfig};

/// Version of the event-log wire format.
pub const LOG_SCHEMA_VERSION: u32 = 1;

/// Equal-power processing model shared by both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseModel {
    /// Work units each node completes per tick.
    pub rate: u64,
    /// Ticks added to every response time.
    pub fixed_overhead: u64,
}

impl ResponseModel {
    /// Ticks a node needs to finish `load` units.
    pub fn completion_ticks(&self, load: u64) -> Tick {
        load.div_ceil(self.rate)
    }

    /// Response time for a final allocation: the slowest node's completion
    /// time plus the fixed overhead.
    pub fn response_time(&self, loads: impl IntoIterator<Item = u64>) -> Tick {
        let makespan = loads
            .into_iter()
            .map(|l| self.completion_ticks(l))
            .max()
            .unwrap_or(0);
        makespan + self.fixed_overhead
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: Tick,
    pub seq: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    JobArrival {
        size: u64,
        job: JobId,
    },
    NodeFailure {
        node: NodeId,
    },
    Heartbeat {
        node: NodeId,
    },
    /// One recovery episode: the nodes recovered in it and the rank table
    /// after phase 2 finished.
    RecoveryTrigger {
        detected: Vec<NodeId>,
        rank_table: Vec<(u32, NodeId, u64)>,
    },
    UnitProcessed {
        node: NodeId,
        units: u64,
    },
}

/// Everything one scenario run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub response_time_recovered: Tick,
    /// `None` when the baseline stalled (a failure under the stall policy):
    /// its response time is unbounded.
    pub response_time_baseline: Option<Tick>,
    pub baseline_stalled: bool,
    /// baseline / recovered; `None` when the baseline stalled.
    pub improvement_ratio: Option<f64>,
    /// All recovery episodes merged: passes, messages and moved units are
    /// summed, transfers concatenated with continuing pass indices.
    pub redistribution: RedistributionReport,
    pub assignments: Vec<Assignment>,
    /// Worst gap between a failure and its suspicion, in ticks.
    pub detection_latency: Tick,
    /// Line-delimited recovered-mode trace, header first.
    pub event_log: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("corrupt event log: {0}")]
    CorruptLog(String),
    #[error("config hash mismatch: the log header does not match its embedded config")]
    ConfigHashMismatch,
    #[error("embedded config failed to run: {0}")]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LogHeader {
    log_schema: u32,
    config_hash: String,
    config: ScenarioConfig,
}

/// Run a scenario in both modes and report the comparison.
///
/// Identical configs always produce byte-identical reports and event logs.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport, SimError> {
    sanity_check(config)?;
    let recovered = run_recovered(config)?;
    let baseline = run_baseline(config);

    let improvement_ratio = match (baseline.response, recovered.response) {
        (Some(b), r) if r > 0 => Some(b as f64 / r as f64),
        (Some(0), 0) => Some(1.0),
        _ => None,
    };

    Ok(ScenarioReport {
        response_time_recovered: recovered.response,
        response_time_baseline: baseline.response,
        baseline_stalled: baseline.stalled,
        improvement_ratio,
        redistribution: recovered.redistribution,
        assignments: recovered.assignments,
        detection_latency: recovered.detection_latency,
        event_log: recovered.event_log,
    })
}

/// Validate and replay an event log.
///
/// The embedded config is re-executed and must reproduce the log byte for
/// byte; the returned report is therefore identical to the original run's.
pub fn replay(log: &str) -> Result<ScenarioReport, ReplayError> {
    let mut lines = log.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| ReplayError::CorruptLog("log is empty".to_string()))?;
    let header: LogHeader = serde_json::from_str(header_line)
        .map_err(|e| ReplayError::CorruptLog(format!("malformed header: {e}")))?;
    if header.log_schema != LOG_SCHEMA_VERSION {
        return Err(ReplayError::CorruptLog(format!(
            "unsupported log schema {}",
            header.log_schema
        )));
    }
    if config_hash(&header.config) != header.config_hash {
        return Err(ReplayError::ConfigHashMismatch);
    }

    let mut last_time: Tick = 0;
    for (i, line) in lines.enumerate() {
        let event: Event = serde_json::from_str(line)
            .map_err(|e| ReplayError::CorruptLog(format!("line {}: {e}", i + 2)))?;
        if event.seq != i as u64 {
            return Err(ReplayError::CorruptLog(format!(
                "line {}: sequence {} where {} was expected",
                i + 2,
                event.seq,
                i
            )));
        }
        if event.time < last_time {
            return Err(ReplayError::CorruptLog(format!(
                "line {}: time went backwards",
                i + 2
            )));
        }
        last_time = event.time;
    }

    let report = run_scenario(&header.config)?;
    if report.event_log != log {
        return Err(ReplayError::CorruptLog(
            "log does not match a deterministic re-execution of its config".to_string(),
        ));
    }
    Ok(report)
}

fn sanity_check(config: &ScenarioConfig) -> Result<(), SimError> {
    let n = config.initial_loads.len();
    if n == 0 {
        return Err(SimError::InvalidConfig("scenario has no nodes".to_string()));
    }
    if config.response.rate == 0 {
        return Err(SimError::InvalidConfig(
            "processing rate is zero".to_string(),
        ));
    }
    if config.heartbeat_period == 0 || config.heartbeat_miss_threshold == 0 {
        return Err(SimError::InvalidConfig(
            "heartbeat period and miss threshold must be positive".to_string(),
        ));
    }
    for f in &config.failures {
        if f.node.0 as usize >= n {
            return Err(SimError::InvalidConfig(format!(
                "failure references unknown node {}",
                f.node
            )));
        }
    }
    if let BaselinePolicy::Successor { node } = config.baseline_policy {
        if node.0 as usize >= n {
            return Err(SimError::InvalidConfig(format!(
                "baseline successor references unknown node {node}"
            )));
        }
    }
    Ok(())
}

struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    fn push(&mut self, time: Tick, kind: EventKind) {
        let seq = self.events.len() as u64;
        self.events.push(Event { time, seq, kind });
    }
}

struct RecoveredRun {
    response: Tick,
    redistribution: RedistributionReport,
    assignments: Vec<Assignment>,
    detection_latency: Tick,
    event_log: String,
}

fn run_recovered(config: &ScenarioConfig) -> Result<RecoveredRun, SimError> {
    let mut state = config.build_cluster();
    let node_ids: Vec<NodeId> = state.nodes().iter().map(|n| n.id).collect();
    let mut ledger = HeartbeatLedger::new(
        node_ids.iter().copied(),
        config.heartbeat_period,
        config.heartbeat_miss_threshold,
        0,
    );

    let mut failures_by_tick: BTreeMap<Tick, Vec<NodeId>> = BTreeMap::new();
    for f in &config.failures {
        failures_by_tick.entry(f.tick).or_default().push(f.node);
    }
    let mut arrivals_by_tick: BTreeMap<Tick, Vec<u64>> = BTreeMap::new();
    for a in &config.arrivals {
        arrivals_by_tick.entry(a.tick).or_default().push(a.size);
    }

    let mut log = EventLog { events: Vec::new() };
    // The initial allocation is recovered unconditionally at tick zero.
    let mut pending_trigger: BTreeMap<Tick, BTreeSet<NodeId>> = BTreeMap::new();
    pending_trigger.insert(0, BTreeSet::new());

    let mut actually_failed: BTreeMap<NodeId, Tick> = BTreeMap::new();
    let mut marked: BTreeSet<NodeId> = BTreeSet::new();
    let mut scheduled_for_recovery: BTreeSet<NodeId> = BTreeSet::new();
    let mut episodes: Vec<RedistributionReport> = Vec::new();
    let mut assignments: Vec<Assignment> = Vec::new();
    let mut detection_latency: Tick = 0;

    let mut tick: Tick = 0;
    loop {
        state.set_clock(tick);

        if let Some(nodes) = failures_by_tick.remove(&tick) {
            for node in nodes {
                actually_failed.insert(node, tick);
                log.push(tick, EventKind::NodeFailure { node });
            }
        }

        if tick.is_multiple_of(config.heartbeat_period) {
            for &node in &node_ids {
                let beating = state.node(node).is_some_and(|n| n.is_alive())
                    && !actually_failed.contains_key(&node);
                if beating {
                    ledger
                        .record_heartbeat(node, tick)
                        .expect("every node is registered");
                    log.push(tick, EventKind::Heartbeat { node });
                }
            }
        }

        if let Some(sizes) = arrivals_by_tick.remove(&tick) {
            for size in sizes {
                let job = enqueue_arrival(&mut state, size, tick)?;
                log.push(tick, EventKind::JobArrival { size, job });
            }
        }

        if let Some(detected) = pending_trigger.remove(&tick) {
            for &node in &detected {
                if !marked.contains(&node) {
                    state.mark_failed(node)?;
                    marked.insert(node);
                }
            }
            let alive = state.alive_count();
            if alive == 0 {
                return Err(SimError::Cluster(ClusterError::NoAliveNodes));
            }
            let episode = redistribute(&mut state, config.epsilon, config.pass_budget(alive))?;
            let mut table = RankTable::build(&state)?;
            let placed = allocate_pending_jobs(&mut state, &mut table, config.queue_policy)?;
            log.push(
                tick,
                EventKind::RecoveryTrigger {
                    detected: detected.iter().copied().collect(),
                    rank_table: table.triples(),
                },
            );
            episodes.push(episode);
            assignments.extend(placed);
        }

        for node in ledger.detect_failures(tick) {
            if !marked.contains(&node) && !scheduled_for_recovery.contains(&node) {
                scheduled_for_recovery.insert(node);
                pending_trigger.entry(tick + 1).or_default().insert(node);
                let failed_at = actually_failed.get(&node).copied().unwrap_or(tick);
                detection_latency = detection_latency.max(tick - failed_at);
            }
        }

        // Arrivals while no recovery is in flight are placed right away.
        let queues_pending = !state.failure_queue().is_empty() || !state.arrival_queue().is_empty();
        if queues_pending && pending_trigger.is_empty() {
            let mut table = RankTable::build(&state)?;
            let placed = allocate_pending_jobs(&mut state, &mut table, config.queue_policy)?;
            assignments.extend(placed);
        }

        let quiesced = failures_by_tick.is_empty()
            && arrivals_by_tick.is_empty()
            && pending_trigger.is_empty()
            && actually_failed.keys().all(|n| marked.contains(n))
            && state.failure_queue().is_empty()
            && state.arrival_queue().is_empty();
        if quiesced {
            break;
        }
        tick += 1;
    }

    // Allocation has settled; process everything at the configured rate.
    let quiesce_tick = tick;
    let rate = config.response.rate;
    let mut remaining: Vec<(NodeId, u64)> = state.alive().map(|n| (n.id, n.load)).collect();
    remaining.sort_by_key(|&(id, _)| id);
    let mut processed: u64 = 0;
    let mut step: Tick = 0;
    while remaining.iter().any(|&(_, load)| load > 0) {
        step += 1;
        for (node, load) in remaining.iter_mut() {
            if *load > 0 {
                let units = (*load).min(rate);
                *load -= units;
                processed += units;
                log.push(
                    quiesce_tick + step,
                    EventKind::UnitProcessed { node: *node, units },
                );
            }
        }
    }
    debug_assert_eq!(
        step,
        state
            .alive()
            .map(|n| config.response.completion_ticks(n.load))
            .max()
            .unwrap_or(0),
        "processing walk disagrees with the closed-form makespan"
    );
    debug_assert_eq!(
        processed,
        config.initial_loads.iter().sum::<u64>()
            + config.arrivals.iter().map(|a| a.size).sum::<u64>(),
        "recovered mode lost or duplicated work units"
    );
    let response = step + config.response.fixed_overhead;

    let final_spread = episodes.last().map(|e| e.final_spread).unwrap_or(0);
    Ok(RecoveredRun {
        response,
        redistribution: merge_episodes(episodes, final_spread),
        assignments,
        detection_latency,
        event_log: render_log(config, &log.events),
    })
}

fn merge_episodes(episodes: Vec<RedistributionReport>, final_spread: u64) -> RedistributionReport {
    let mut merged = RedistributionReport {
        passes: 0,
        transfers: Vec::new(),
        messages: 0,
        final_spread,
        total_moved: 0,
        converged: true,
    };
    for episode in episodes {
        let offset = merged.passes;
        merged
            .transfers
            .extend(episode.transfers.into_iter().map(|mut t| {
                t.pass_index += offset;
                t
            }));
        merged.passes += episode.passes;
        merged.messages += episode.messages;
        merged.total_moved += episode.total_moved;
        merged.converged &= episode.converged;
    }
    merged
}

fn render_log(config: &ScenarioConfig, events: &[Event]) -> String {
    let header = LogHeader {
        log_schema: LOG_SCHEMA_VERSION,
        config_hash: config_hash(config),
        config: config.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for event in events {
        out.push_str(&serde_json::to_string(event).expect("event serializes"));
        out.push('\n');
    }
    out
}

struct BaselineRun {
    response: Option<Tick>,
    stalled: bool,
}

/// The static allocation, untouched: arrivals go round-robin by arrival
/// index (the dispatcher knows nothing about loads or failures), and a
/// failure is handled only by the configured policy.
fn run_baseline(config: &ScenarioConfig) -> BaselineRun {
    let n = config.initial_loads.len();
    let mut loads = config.initial_loads.clone();
    let mut failed = vec![false; n];
    let mut stalled_units: u64 = 0;

    enum Step {
        Fail(usize),
        Arrive(u64),
    }
    // Failures precede arrivals within a tick, matching the recovered mode.
    let mut steps: Vec<(Tick, u8, usize, Step)> = Vec::new();
    for (i, f) in config.failures.iter().enumerate() {
        steps.push((f.tick, 0, i, Step::Fail(f.node.0 as usize)));
    }
    for (i, a) in config.arrivals.iter().enumerate() {
        steps.push((a.tick, 1, i, Step::Arrive(a.size)));
    }
    steps.sort_by_key(|&(tick, kind, idx, _)| (tick, kind, idx));

    fn deliver(
        policy: BaselinePolicy,
        target: usize,
        units: u64,
        loads: &mut [u64],
        failed: &[bool],
        stalled_units: &mut u64,
    ) {
        if !failed[target] {
            loads[target] += units;
            return;
        }
        match policy {
            BaselinePolicy::Stall => *stalled_units += units,
            BaselinePolicy::Successor { node } => {
                let successor = node.0 as usize;
                if failed[successor] {
                    *stalled_units += units;
                } else {
                    loads[successor] += units;
                }
            }
        }
    }

    let mut arrival_index = 0usize;
    for (_, _, _, step) in steps {
        match step {
            Step::Fail(node) => {
                let carried = loads[node];
                loads[node] = 0;
                failed[node] = true;
                deliver(
                    config.baseline_policy,
                    node,
                    carried,
                    &mut loads,
                    &failed,
                    &mut stalled_units,
                );
            }
            Step::Arrive(size) => {
                let target = arrival_index % n;
                arrival_index += 1;
                deliver(
                    config.baseline_policy,
                    target,
                    size,
                    &mut loads,
                    &failed,
                    &mut stalled_units,
                );
            }
        }
    }

    if stalled_units > 0 {
        return BaselineRun {
            response: None,
            stalled: true,
        };
    }
    let response = config.response.response_time(
        loads
            .iter()
            .zip(&failed)
            .filter(|&(_, &f)| !f)
            .map(|(&l, _)| l),
    );
    BaselineRun {
        response: Some(response),
        stalled: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ArrivalEvent, FailureEvent};

    #[test]
    fn skewed_quad_halves_the_response_time() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[0, 0, 69, 70])).unwrap();
        assert_eq!(report.response_time_baseline, Some(70));
        assert_eq!(report.response_time_recovered, 35);
        assert_eq!(report.improvement_ratio, Some(2.0));
        assert!(!report.baseline_stalled);
        assert!(report.redistribution.converged);
        assert_eq!(report.redistribution.passes, 1);
        assert_eq!(report.redistribution.final_spread, 1);
    }

    #[test]
    fn moderately_skewed_quad_improves() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[4, 9, 32, 40])).unwrap();
        assert_eq!(report.response_time_baseline, Some(40));
        assert_eq!(report.response_time_recovered, 22);
        assert_eq!(report.improvement_ratio, Some(40.0 / 22.0));
    }

    #[test]
    fn balanced_allocation_gains_nothing() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[25, 25, 25, 25])).unwrap();
        assert_eq!(report.response_time_baseline, Some(25));
        assert_eq!(report.response_time_recovered, 25);
        assert_eq!(report.improvement_ratio, Some(1.0));
        assert_eq!(report.redistribution.passes, 0);
        assert!(report.redistribution.transfers.is_empty());
    }

    #[test]
    fn arrivals_place_only_after_the_initial_rebalance() {
        let mut config = ScenarioConfig::from_loads(&[100, 0]);
        config.arrivals.push(ArrivalEvent { tick: 0, size: 1 });
        let report = run_scenario(&config).unwrap();
        // The tick-0 episode levels to {50, 50} before the job lands, so the
        // id tie-break gives it to node 0.
        assert_eq!(report.assignments.len(), 1);
        assert_eq!(report.assignments[0].node, NodeId(0));
        assert_eq!(report.assignments[0].node_load_before, 50);
        assert_eq!(report.assignments[0].node_load_after, 51);
        assert_eq!(report.response_time_recovered, 51);
    }

    #[test]
    fn late_arrival_is_placed_at_its_own_tick() {
        let mut config = ScenarioConfig::from_loads(&[10, 30]);
        config.arrivals.push(ArrivalEvent { tick: 7, size: 5 });
        let report = run_scenario(&config).unwrap();
        // Leveled to {20, 20} at tick 0; the arrival lands on node 0.
        assert_eq!(report.assignments[0].node, NodeId(0));
        assert_eq!(report.assignments[0].node_load_after, 25);
        assert_eq!(report.response_time_recovered, 25);
    }

    #[test]
    fn mid_run_failure_is_detected_and_absorbed() {
        let mut config = ScenarioConfig::from_loads(&[30, 10, 50, 20]);
        config.failures.push(FailureEvent {
            tick: 12,
            node: NodeId(2),
        });
        let report = run_scenario(&config).unwrap();

        // Failed at 12 with the last heartbeat at 10; suspicion is strict,
        // so detection happens at tick 41.
        assert_eq!(report.detection_latency, 29);
        // The tick-0 episode levels 110 units to {27,27,28,28}; node 2
        // carries 27 into its failure, and that job lands on the least
        // loaded survivor.
        assert_eq!(report.response_time_recovered, 54);
        // Stall policy: the baseline never finishes.
        assert_eq!(report.response_time_baseline, None);
        assert!(report.baseline_stalled);
        assert_eq!(report.improvement_ratio, None);

        let failure_event = report
            .event_log
            .lines()
            .filter(|l| l.contains("\"node_failure\""))
            .count();
        assert_eq!(failure_event, 1);
        // Two recovery episodes: tick 0 and the post-detection one.
        let triggers = report
            .event_log
            .lines()
            .filter(|l| l.contains("\"recovery_trigger\""))
            .count();
        assert_eq!(triggers, 2);
    }

    #[test]
    fn successor_baseline_keeps_a_finite_response() {
        let mut config = ScenarioConfig::from_loads(&[30, 10, 50, 20]);
        config.failures.push(FailureEvent {
            tick: 12,
            node: NodeId(2),
        });
        config.baseline_policy = BaselinePolicy::Successor { node: NodeId(0) };
        let report = run_scenario(&config).unwrap();
        // Node 0 takes over node 2's 50 units: 80 ticks at rate 1.
        assert_eq!(report.response_time_baseline, Some(80));
        assert!(!report.baseline_stalled);
        assert_eq!(report.response_time_recovered, 54);
        let ratio = report.improvement_ratio.unwrap();
        assert!(ratio > 1.0, "expected improvement, got {ratio}");
    }

    #[test]
    fn baseline_arrivals_go_round_robin() {
        let mut config = ScenarioConfig::from_loads(&[0, 0]);
        config.arrivals.push(ArrivalEvent { tick: 0, size: 8 });
        config.arrivals.push(ArrivalEvent { tick: 1, size: 2 });
        let report = run_scenario(&config).unwrap();
        // Baseline: 8 on node 0, 2 on node 1. Recovered places the same way
        // here, so the ratio is exactly one.
        assert_eq!(report.response_time_baseline, Some(8));
        assert_eq!(report.response_time_recovered, 8);
        assert_eq!(report.improvement_ratio, Some(1.0));
    }

    #[test]
    fn fixed_overhead_is_added_to_both_modes() {
        let mut config = ScenarioConfig::from_loads(&[0, 0, 69, 70]);
        config.response.fixed_overhead = 5;
        let report = run_scenario(&config).unwrap();
        assert_eq!(report.response_time_baseline, Some(75));
        assert_eq!(report.response_time_recovered, 40);
    }

    #[test]
    fn identical_configs_reproduce_identical_bytes() {
        let mut config = ScenarioConfig::from_loads(&[30, 10, 50, 20]);
        config.failures.push(FailureEvent {
            tick: 12,
            node: NodeId(2),
        });
        config.arrivals.push(ArrivalEvent { tick: 3, size: 4 });
        config.baseline_policy = BaselinePolicy::Successor { node: NodeId(1) };
        let a = run_scenario(&config).unwrap();
        let b = run_scenario(&config).unwrap();
        assert_eq!(a.event_log, b.event_log);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn replay_reproduces_the_report() {
        let mut config = ScenarioConfig::from_loads(&[5, 40, 12, 3]);
        config.arrivals.push(ArrivalEvent { tick: 2, size: 9 });
        let report = run_scenario(&config).unwrap();
        let replayed = replay(&report.event_log).unwrap();
        assert_eq!(replayed, report);
    }

    #[test]
    fn replay_rejects_truncated_logs() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[0, 0, 69, 70])).unwrap();
        let mut lines: Vec<&str> = report.event_log.lines().collect();
        lines.pop();
        let truncated = lines.join("\n") + "\n";
        assert!(matches!(
            replay(&truncated),
            Err(ReplayError::CorruptLog(_))
        ));
    }

    #[test]
    fn replay_rejects_a_tampered_config() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[0, 0, 69, 70])).unwrap();
        let mut lines = report.event_log.lines();
        let mut header: LogHeader = serde_json::from_str(lines.next().unwrap()).unwrap();
        header.config.response.rate = 2; // hash no longer matches
        let mut tampered = serde_json::to_string(&header).unwrap();
        tampered.push('\n');
        for line in lines {
            tampered.push_str(line);
            tampered.push('\n');
        }
        assert!(matches!(
            replay(&tampered),
            Err(ReplayError::ConfigHashMismatch)
        ));
    }

    #[test]
    fn replay_rejects_edited_events() {
        let report = run_scenario(&ScenarioConfig::from_loads(&[0, 0, 69, 70])).unwrap();
        let edited = report.event_log.replace("\"units\":1", "\"units\":2");
        assert_ne!(edited, report.event_log);
        assert!(matches!(replay(&edited), Err(ReplayError::CorruptLog(_))));
    }

    #[test]
    fn empty_scenarios_are_rejected() {
        let config = ScenarioConfig::from_loads(&[]);
        assert!(matches!(
            run_scenario(&config),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn failing_every_node_is_an_error() {
        let mut config = ScenarioConfig::from_loads(&[5, 5]);
        config.failures.push(FailureEvent {
            tick: 1,
            node: NodeId(0),
        });
        config.failures.push(FailureEvent {
            tick: 2,
            node: NodeId(1),
        });
        assert_eq!(
            run_scenario(&config),
            Err(SimError::Cluster(ClusterError::NoAliveNodes))
        );
    }
}
