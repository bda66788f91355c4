//! Minimal heartbeat bookkeeping used to trigger recovery.
//!
//! A node is suspected once the time since its last recorded heartbeat
//! strictly exceeds `miss_threshold * period` ticks.

use std::collections::{BTreeMap, BTreeSet};

use crate::cluster::{NodeId, Tick};
use crate::error::ClusterError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeartbeatLedger {
    last_seen: BTreeMap<NodeId, Tick>,
    period: Tick,
    miss_threshold: u64,
}

impl HeartbeatLedger {
    /// Register `nodes` as last seen at `now`.
    pub fn new(
        nodes: impl IntoIterator<Item = NodeId>,
        period: Tick,
        miss_threshold: u64,
        now: Tick,
    ) -> Self {
        assert!(period >= 1, "heartbeat period must be at least one tick");
        assert!(miss_threshold >= 1, "miss threshold must be at least one");
        Self {
            last_seen: nodes.into_iter().map(|n| (n, now)).collect(),
            period,
            miss_threshold,
        }
    }

    /// Ticks of silence after which a node is suspected.
    pub fn timeout(&self) -> Tick {
        self.period * self.miss_threshold
    }

    pub fn period(&self) -> Tick {
        self.period
    }

    /// Record a heartbeat. Out-of-order heartbeats never move `last_seen`
    /// backwards.
    pub fn record_heartbeat(&mut self, node: NodeId, now: Tick) -> Result<(), ClusterError> {
        let seen = self
            .last_seen
            .get_mut(&node)
            .ok_or(ClusterError::UnknownNode(node))?;
        *seen = (*seen).max(now);
        Ok(())
    }

    /// Every node whose silence exceeds the timeout at `now`. Deterministic
    /// and idempotent for a fixed ledger and time; the caller is in charge
    /// of acting on a suspicion only once.
    pub fn detect_failures(&self, now: Tick) -> BTreeSet<NodeId> {
        let timeout = self.timeout();
        self.last_seen
            .iter()
            .filter(|(_, &seen)| now.saturating_sub(seen) > timeout)
            .map(|(&node, _)| node)
            .collect()
    }
}
