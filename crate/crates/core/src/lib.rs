//! Two-phase recovery from multiple node failures in a cluster, plus a
//! deterministic simulator for measuring what it buys.
//!
//! Phase 1 ([`redistribution`]) levels the surviving nodes' loads by
//! pairing the most loaded node with the least loaded, the second most with
//! the second least, and so on, leveling each pair to its integer average
//! and re-ranking between passes. Phase 2 ([`reassignment`]) then drains
//! the failed nodes' recovered jobs and any new arrivals onto whichever
//! node currently holds the least load.
//!
//! The [`simulator`] replays declarative scenarios ([`scenario`]) tick by
//! tick — heartbeats, failures, detection, recovery, arrivals — and
//! compares the recovered allocation's response time against a static
//! baseline that never rebalances. [`report`] runs batches and exports the
//! comparison; [`oracle`] holds the independent reference computations the
//! test suites check everything against.
//!
//! ```
//! use loadshift::{redistribute, run_scenario, ClusterState, ScenarioConfig};
//!
//! let mut cluster = ClusterState::new(&[0, 0, 69, 70]);
//! let leveling = redistribute(&mut cluster, 1, 8).unwrap();
//! assert!(leveling.converged);
//! assert_eq!(cluster.imbalance().unwrap().spread, 1);
//!
//! let report = run_scenario(&ScenarioConfig::from_loads(&[0, 0, 69, 70])).unwrap();
//! assert_eq!(report.improvement_ratio, Some(2.0));
//! ```

pub mod cluster;
pub mod error;
pub mod heartbeat;
pub mod oracle;
pub mod ranking;
pub mod reassignment;
pub mod redistribution;
pub mod report;
pub mod scenario;
pub mod simulator;

pub use cluster::{
    ClusterState, ComputeNode, Imbalance, Job, JobId, JobOrigin, NodeId, NodeStatus, Tick,
};
pub use error::ClusterError;
pub use heartbeat::HeartbeatLedger;
pub use ranking::{RankEntry, RankTable};
pub use reassignment::{allocate_pending_jobs, enqueue_arrival, Assignment, QueuePolicy};
pub use redistribution::{
    message_count, pairing_pass, redistribute, RedistributionReport, Transfer,
};
pub use report::{export, run_batch, BatchSlot, ExportFormat};
pub use scenario::{load_config, parse_config, BaselinePolicy, ConfigError, ScenarioConfig};
pub use simulator::{replay, run_scenario, ResponseModel, ScenarioReport, SimError};
