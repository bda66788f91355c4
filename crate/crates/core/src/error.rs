use thiserror::Error;

use crate::cluster::NodeId;

/// Errors raised by cluster state transitions, ranking, redistribution and
/// reassignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is already failed")]
    AlreadyFailed(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("no alive nodes")]
    NoAliveNodes,
    #[error("rank table is empty")]
    EmptyTable,
    #[error("job size must be at least one work unit")]
    InvalidJobSize,
}
