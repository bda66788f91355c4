//! Phase 2 of recovery: drain the pending-job queues onto the least-loaded
//! node, one job at a time, keeping the rank table current between
//! assignments.

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterState, Job, JobId, JobOrigin, NodeId, Tick};
use crate::error::ClusterError;
use crate::ranking::RankTable;

/// Order in which the two pending queues drain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QueuePolicy {
    /// Jobs recovered from failed nodes first, then new arrivals. Recovery
    /// work is never starved by fresh load.
    #[default]
    FailureFirst,
    /// Strict FIFO over both queues by enqueue time (job id breaks ties).
    Fifo,
}

/// One greedy placement decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub job: JobId,
    /// The node that held the minimum load (lowest id among ties) when this
    /// assignment was made.
    pub node: NodeId,
    pub node_load_before: u64,
    pub node_load_after: u64,
    /// Monotone per-cluster sequence number.
    pub seq: u64,
}

/// Append a new-arrival job of `size` work units to the arrival queue.
///
/// The job is only placed later, by [`allocate_pending_jobs`].
pub fn enqueue_arrival(
    state: &mut ClusterState,
    size: u64,
    time: Tick,
) -> Result<JobId, ClusterError> {
    if size == 0 {
        return Err(ClusterError::InvalidJobSize);
    }
    let id = state.take_job_id();
    state.arrival_queue.push_back(Job {
        id,
        size,
        origin: JobOrigin::NewArrival,
        enqueued_at: time,
    });
    Ok(id)
}

/// Drain both pending queues, assigning each job to the node at rank 1 and
/// updating the table after every placement.
///
/// `table` must reflect the alive loads of `state`. On success both queues
/// are empty; if there are no alive nodes the queues are left untouched.
pub fn allocate_pending_jobs(
    state: &mut ClusterState,
    table: &mut RankTable,
    policy: QueuePolicy,
) -> Result<Vec<Assignment>, ClusterError> {
    if state.failure_queue.is_empty() && state.arrival_queue.is_empty() {
        return Ok(Vec::new());
    }
    if table.is_empty() || state.alive_count() == 0 {
        return Err(ClusterError::NoAliveNodes);
    }
    debug_assert!(
        table
            .entries()
            .iter()
            .all(|e| state.node(e.node).map(|n| n.load) == Some(e.load)),
        "rank table out of sync with cluster loads"
    );

    let mut jobs: Vec<Job> = state
        .failure_queue
        .drain(..)
        .chain(state.arrival_queue.drain(..))
        .collect();
    if policy == QueuePolicy::Fifo {
        jobs.sort_by_key(|j| (j.enqueued_at, j.id));
    }

    let mut assignments = Vec::with_capacity(jobs.len());
    for job in jobs {
        let node = table.least_loaded()?;
        let node_load_before = table.load_of(node).expect("rank 1 node is in the table");
        state
            .node_mut(node)
            .expect("ranked nodes exist in the cluster")
            .load += job.size;
        table.update_after_assignment(node, job.size)?;
        assignments.push(Assignment {
            job: job.id,
            node,
            node_load_before,
            node_load_after: node_load_before + job.size,
            seq: state.take_assignment_seq(),
        });
    }
    Ok(assignments)
}
