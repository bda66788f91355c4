//! Phase 1 of recovery: pairwise load leveling across alive nodes.
//!
//! One pass ranks the alive nodes and pairs the extremes inward: rank 1
//! with rank N, rank 2 with rank N-1, and so on (the middle node of an
//! odd-sized table sits a pass out). Each pair is leveled to its own
//! integer average: the donor keeps `floor((donor + receiver) / 2)` and the
//! receiver takes the rest, so the pair ends within one unit and the total
//! is conserved exactly. [`redistribute`] repeats passes, re-ranking each
//! time, until the spread drops to `epsilon` or the pass budget runs out.

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterState, NodeId};
use crate::error::ClusterError;
use crate::ranking::RankTable;

/// One donor-to-receiver load movement within a pairing pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    /// Higher-loaded endpoint; ends the transfer at `avg_load`.
    pub donor: NodeId,
    /// Lower-loaded endpoint; receives `load_to_transfer`.
    pub receiver: NodeId,
    /// Floor of the pair's mean load before the transfer.
    pub avg_load: u64,
    /// `donor_load_before - avg_load`.
    pub load_to_transfer: u64,
    /// 1-based index of the pass that emitted this transfer.
    pub pass_index: u32,
}

/// Outcome of one [`redistribute`] call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedistributionReport {
    /// Pairing passes executed (0 when the input was already level).
    pub passes: u32,
    /// Every nonzero transfer, in emission order.
    pub transfers: Vec<Transfer>,
    /// Message estimate: two per transfer plus one load report per alive
    /// node per pass.
    pub messages: u64,
    /// Spread of the alive loads after the final pass.
    pub final_spread: u64,
    /// Sum of all transferred units.
    pub total_moved: u64,
    /// Whether `final_spread <= epsilon` was reached within the budget.
    pub converged: bool,
}

/// Run one pairing pass over the current alive loads.
///
/// Pairs that are already level are skipped: no transfer is emitted for
/// them. Returns the transfers applied, tagged with `pass_index`.
pub fn pairing_pass(
    state: &mut ClusterState,
    pass_index: u32,
) -> Result<Vec<Transfer>, ClusterError> {
    let table = RankTable::build(state)?;
    let entries = table.entries();
    let mut transfers = Vec::new();
    let mut lo = 0usize;
    let mut hi = entries.len() - 1;
    while lo < hi {
        let receiver = entries[lo];
        let donor = entries[hi];
        let avg_load = (donor.load + receiver.load) / 2;
        let load_to_transfer = donor.load - avg_load;
        if load_to_transfer > 0 {
            state
                .node_mut(donor.node)
                .expect("donor is an alive node")
                .load = avg_load;
            state
                .node_mut(receiver.node)
                .expect("receiver is an alive node")
                .load += load_to_transfer;
            transfers.push(Transfer {
                donor: donor.node,
                receiver: receiver.node,
                avg_load,
                load_to_transfer,
                pass_index,
            });
        }
        lo += 1;
        hi -= 1;
    }
    Ok(transfers)
}

/// Level the alive loads by repeated pairing passes.
///
/// Stops as soon as the spread is at most `epsilon`, or after `max_passes`
/// passes. Running out of passes is not an error: the report comes back
/// with `converged = false` and the state reflects every pass that ran.
pub fn redistribute(
    state: &mut ClusterState,
    epsilon: u64,
    max_passes: u32,
) -> Result<RedistributionReport, ClusterError> {
    let n_alive = state.alive_count();
    if n_alive == 0 {
        return Err(ClusterError::NoAliveNodes);
    }

    let mut transfers: Vec<Transfer> = Vec::new();
    let mut passes = 0u32;
    let converged = loop {
        let spread = state.imbalance()?.spread;
        if spread <= epsilon {
            break true;
        }
        if passes == max_passes {
            break false;
        }
        passes += 1;
        transfers.extend(pairing_pass(state, passes)?);
    };

    let final_spread = state.imbalance()?.spread;
    let total_moved = transfers.iter().map(|t| t.load_to_transfer).sum();
    let messages = message_count(transfers.len(), passes, n_alive);
    Ok(RedistributionReport {
        passes,
        transfers,
        messages,
        final_spread,
        total_moved,
        converged,
    })
}

/// Message estimate for one redistribution: two messages per nonzero
/// transfer plus one per-pass load report from every alive node to the
/// rank generator. Applied uniformly so algorithm comparisons stay fair.
pub fn message_count(nonzero_transfers: usize, passes: u32, n_alive: usize) -> u64 {
    2 * nonzero_transfers as u64 + n_alive as u64 * passes as u64
}
