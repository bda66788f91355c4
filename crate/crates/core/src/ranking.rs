//! Load-ordered ranking of alive nodes.
//!
//! Rank 1 always holds the least-loaded alive node and rank N the most
//! loaded. Ties are broken by ascending node id so that every ranking is a
//! deterministic function of the loads alone.

use crate::cluster::{ClusterState, NodeId};
use crate::error::ClusterError;

/// One row of a rank table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankEntry {
    /// 1-based rank; 1 = least loaded.
    pub rank: u32,
    pub node: NodeId,
    pub load: u64,
}

/// Bijective ranking of the alive nodes by load.
///
/// Invariants: ranks are exactly `1..=N`, loads are non-decreasing with
/// rank, and equal loads are ordered by ascending node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    entries: Vec<RankEntry>,
}

impl RankTable {
    /// Rank the alive nodes of `state`, least loaded first.
    pub fn build(state: &ClusterState) -> Result<Self, ClusterError> {
        let mut entries: Vec<RankEntry> = state
            .alive()
            .map(|n| RankEntry {
                rank: 0,
                node: n.id,
                load: n.load,
            })
            .collect();
        if entries.is_empty() {
            return Err(ClusterError::NoAliveNodes);
        }
        entries.sort_by_key(|e| (e.load, e.node));
        renumber(&mut entries);
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Node at rank 1.
    pub fn least_loaded(&self) -> Result<NodeId, ClusterError> {
        self.entries
            .first()
            .map(|e| e.node)
            .ok_or(ClusterError::EmptyTable)
    }

    pub fn load_of(&self, node: NodeId) -> Option<u64> {
        self.entries.iter().find(|e| e.node == node).map(|e| e.load)
    }

    /// Add `delta` to a node's load and restore the sort, without a full
    /// rebuild. The result is always identical to rebuilding from the
    /// mutated state.
    pub fn update_after_assignment(
        &mut self,
        node: NodeId,
        delta: u64,
    ) -> Result<(), ClusterError> {
        let idx = self
            .entries
            .iter()
            .position(|e| e.node == node)
            .ok_or(ClusterError::UnknownNode(node))?;
        let mut entry = self.entries.remove(idx);
        entry.load += delta;
        let pos = self
            .entries
            .partition_point(|e| (e.load, e.node) < (entry.load, entry.node));
        self.entries.insert(pos, entry);
        renumber(&mut self.entries);
        Ok(())
    }

    /// `(rank, node, load)` triples in rank order, the serialized form used
    /// in reports.
    pub fn triples(&self) -> Vec<(u32, NodeId, u64)> {
        self.entries
            .iter()
            .map(|e| (e.rank, e.node, e.load))
            .collect()
    }
}

fn renumber(entries: &mut [RankEntry]) {
    for (i, entry) in entries.iter_mut().enumerate() {
        entry.rank = (i + 1) as u32;
    }
}
