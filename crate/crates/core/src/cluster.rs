//! Cluster domain model: nodes, jobs, the two pending-work queues, and the
//! legal state transitions everything else builds on.
//!
//! All loads are non-negative integer work units so conservation can be
//! checked with exact equality. State transitions are deterministic
//! functions of their inputs; there is no hidden clock or randomness.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ClusterError;

/// Simulation time in integer ticks.
pub type Tick = u64;

/// Unique job identifier, monotone within one cluster.
pub type JobId = u64;

/// Identifier of a node within one cluster. Stable for the lifetime of a
/// scenario and never reused.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Alive,
    Failed,
}

/// One compute node: identity, current load in work units, liveness.
///
/// A failed node's load is always zero; whatever it held at failure time has
/// been converted into queued jobs by [`ClusterState::mark_failed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputeNode {
    pub id: NodeId,
    pub load: u64,
    pub status: NodeStatus,
    declared_jobs: Vec<u64>,
}

impl ComputeNode {
    pub fn new(id: NodeId, load: u64) -> Self {
        Self {
            id,
            load,
            status: NodeStatus::Alive,
            declared_jobs: Vec::new(),
        }
    }

    /// Node whose load is known to consist of discrete jobs of the given
    /// sizes. The declared structure is honored by `mark_failed` as long as
    /// the load still sums to it.
    pub fn with_declared_jobs(id: NodeId, load: u64, jobs: Vec<u64>) -> Self {
        debug_assert!(jobs.iter().all(|&s| s >= 1));
        Self {
            id,
            load,
            status: NodeStatus::Alive,
            declared_jobs: jobs,
        }
    }

    pub fn declared_jobs(&self) -> &[u64] {
        &self.declared_jobs
    }

    pub fn is_alive(&self) -> bool {
        self.status == NodeStatus::Alive
    }
}

/// Where a unit of reassignable work came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobOrigin {
    Initial,
    FailureRecovered(NodeId),
    NewArrival,
}

/// An indivisible piece of work waiting in one of the pending queues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub id: JobId,
    pub size: u64,
    pub origin: JobOrigin,
    pub enqueued_at: Tick,
}

/// Max minus min over alive loads, plus the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imbalance {
    pub spread: u64,
    pub stddev: f64,
}

/// Full cluster state: the node set plus the two FIFO queues of reassignable
/// work (jobs recovered from failed nodes, and new arrivals).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterState {
    pub(crate) nodes: Vec<ComputeNode>,
    pub(crate) failure_queue: VecDeque<Job>,
    pub(crate) arrival_queue: VecDeque<Job>,
    pub(crate) clock: Tick,
    next_job_id: JobId,
    next_assignment_seq: u64,
}

impl ClusterState {
    /// Cluster of `initial_loads.len()` alive nodes with ids `0..n`.
    pub fn new(initial_loads: &[u64]) -> Self {
        let nodes = initial_loads
            .iter()
            .enumerate()
            .map(|(i, &load)| ComputeNode::new(NodeId(i as u32), load))
            .collect();
        Self::from_vec(nodes)
    }

    /// Cluster from explicit nodes. Node ids must be unique; the given order
    /// is preserved internally but never affects ranking or assignment.
    pub fn with_nodes(nodes: Vec<ComputeNode>) -> Result<Self, ClusterError> {
        for (i, node) in nodes.iter().enumerate() {
            if nodes[..i].iter().any(|other| other.id == node.id) {
                return Err(ClusterError::DuplicateNode(node.id));
            }
        }
        Ok(Self::from_vec(nodes))
    }

    fn from_vec(nodes: Vec<ComputeNode>) -> Self {
        Self {
            nodes,
            failure_queue: VecDeque::new(),
            arrival_queue: VecDeque::new(),
            clock: 0,
            next_job_id: 0,
            next_assignment_seq: 0,
        }
    }

    pub fn nodes(&self) -> &[ComputeNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&ComputeNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> Option<&mut ComputeNode> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    pub fn alive(&self) -> impl Iterator<Item = &ComputeNode> {
        self.nodes.iter().filter(|n| n.is_alive())
    }

    pub fn alive_count(&self) -> usize {
        self.alive().count()
    }

    /// Loads of alive nodes in the stored node order.
    pub fn alive_loads(&self) -> Vec<u64> {
        self.alive().map(|n| n.load).collect()
    }

    pub fn clock(&self) -> Tick {
        self.clock
    }

    pub(crate) fn set_clock(&mut self, tick: Tick) {
        self.clock = tick;
    }

    pub fn failure_queue(&self) -> &VecDeque<Job> {
        &self.failure_queue
    }

    pub fn arrival_queue(&self) -> &VecDeque<Job> {
        &self.arrival_queue
    }

    /// Total size of all queued jobs, both queues.
    pub fn queued_load(&self) -> u64 {
        self.failure_queue
            .iter()
            .chain(self.arrival_queue.iter())
            .map(|j| j.size)
            .sum()
    }

    pub(crate) fn take_job_id(&mut self) -> JobId {
        let id = self.next_job_id;
        self.next_job_id += 1;
        id
    }

    pub(crate) fn take_assignment_seq(&mut self) -> u64 {
        let seq = self.next_assignment_seq;
        self.next_assignment_seq += 1;
        seq
    }

    /// Fail a node: its current load is converted into pending jobs and the
    /// node is excluded from every later ranking.
    ///
    /// If the node carried a declared job structure and its load still sums
    /// to it, one job per declared size is enqueued; otherwise the whole
    /// load becomes a single job. Returns the ids of the enqueued jobs.
    pub fn mark_failed(&mut self, id: NodeId) -> Result<Vec<JobId>, ClusterError> {
        let node = self.node(id).ok_or(ClusterError::UnknownNode(id))?;
        if node.status == NodeStatus::Failed {
            return Err(ClusterError::AlreadyFailed(id));
        }
        let load = node.load;
        let declared = node.declared_jobs.clone();
        let sizes = if load == 0 {
            Vec::new()
        } else if !declared.is_empty() && declared.iter().sum::<u64>() == load {
            declared
        } else {
            vec![load]
        };

        let enqueued_at = self.clock;
        let mut job_ids = Vec::with_capacity(sizes.len());
        for size in sizes {
            let job_id = self.take_job_id();
            self.failure_queue.push_back(Job {
                id: job_id,
                size,
                origin: JobOrigin::FailureRecovered(id),
                enqueued_at,
            });
            job_ids.push(job_id);
        }

        let node = self.node_mut(id).expect("node existence checked above");
        node.load = 0;
        node.status = NodeStatus::Failed;
        Ok(job_ids)
    }

    /// Sum of loads over alive nodes. Failed nodes are excluded by
    /// construction (their load is zero and their status filtered out).
    pub fn total_alive_load(&self) -> u64 {
        self.alive().map(|n| n.load).sum()
    }

    /// Spread (max - min) and population standard deviation of alive loads.
    pub fn imbalance(&self) -> Result<Imbalance, ClusterError> {
        let loads = self.alive_loads();
        if loads.is_empty() {
            return Err(ClusterError::NoAliveNodes);
        }
        let min = *loads.iter().min().expect("non-empty");
        let max = *loads.iter().max().expect("non-empty");
        let n = loads.len() as f64;
        let mean = loads.iter().sum::<u64>() as f64 / n;
        let variance = loads
            .iter()
            .map(|&l| {
                let d = l as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / n;
        Ok(Imbalance {
            spread: max - min,
            stddev: variance.sqrt(),
        })
    }
}
