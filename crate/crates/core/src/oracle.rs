//! Independent reference computations used to validate the main algorithms.
//!
//! Everything here works on plain slices and shares no code with the
//! modules it checks: the redistribution reference re-sorts from scratch
//! every pass, the greedy reference does a full linear scan per job, and
//! the optimal makespan comes from exhaustive search.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance exceeds exhaustive-search limits ({jobs} jobs, {machines} machines)")]
    InstanceTooLarge { jobs: usize, machines: usize },
    #[error("a partition instance needs at least one machine")]
    NoMachines,
}

/// A makespan instance small enough for exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInstance {
    pub job_sizes: Vec<u64>,
    pub machines: usize,
}

/// Largest instance the exhaustive search accepts.
pub const MAX_EXHAUSTIVE_JOBS: usize = 12;
pub const MAX_EXHAUSTIVE_MACHINES: usize = 4;

/// Minimal possible maximum machine load over all ways of partitioning the
/// jobs onto `machines` identical machines.
pub fn brute_force_optimal_makespan(instance: &PartitionInstance) -> Result<u64, OracleError> {
    if instance.machines == 0 {
        return Err(OracleError::NoMachines);
    }
    if instance.job_sizes.len() > MAX_EXHAUSTIVE_JOBS || instance.machines > MAX_EXHAUSTIVE_MACHINES
    {
        return Err(OracleError::InstanceTooLarge {
            jobs: instance.job_sizes.len(),
            machines: instance.machines,
        });
    }

    let mut jobs = instance.job_sizes.clone();
    jobs.sort_unstable_by(|a, b| b.cmp(a));
    let mut loads = vec![0u64; instance.machines];
    let mut best: u64 = jobs.iter().sum();
    explore(&jobs, &mut loads, &mut best);
    Ok(best)
}

fn explore(jobs: &[u64], loads: &mut [u64], best: &mut u64) {
    let Some((&job, rest)) = jobs.split_first() else {
        let max = loads.iter().copied().max().unwrap_or(0);
        if max < *best {
            *best = max;
        }
        return;
    };
    let mut tried_empty = false;
    for i in 0..loads.len() {
        if loads[i] == 0 {
            // All empty machines are interchangeable.
            if tried_empty {
                continue;
            }
            tried_empty = true;
        }
        if loads[i] + job >= *best {
            continue;
        }
        loads[i] += job;
        explore(rest, loads, best);
        loads[i] -= job;
    }
}

/// One pairing pass, naive edition: sort indices by (load, index), pair the
/// extremes inward, level each pair to floor/ceil of its mean.
pub fn reference_pairing_pass(loads: &[u64]) -> Vec<u64> {
    let mut out = loads.to_vec();
    if out.len() < 2 {
        return out;
    }
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by_key(|&i| (loads[i], i));
    let mut lo = 0;
    let mut hi = out.len() - 1;
    while lo < hi {
        let donor = order[hi];
        let receiver = order[lo];
        let pair_avg = (out[donor] + out[receiver]) / 2;
        let moved = out[donor] - pair_avg;
        out[donor] -= moved;
        out[receiver] += moved;
        lo += 1;
        hi -= 1;
    }
    out
}

/// Pairing passes to a spread of at most one, naive edition.
pub fn reference_redistribute(loads: &[u64]) -> Vec<u64> {
    let mut current = loads.to_vec();
    let mut passes = 0u32;
    while spread(&current) > 1 {
        current = reference_pairing_pass(&current);
        passes += 1;
        assert!(
            passes <= 512,
            "reference redistribution did not converge within 512 passes"
        );
    }
    current
}

fn spread(loads: &[u64]) -> u64 {
    match (loads.iter().max(), loads.iter().min()) {
        (Some(max), Some(min)) => max - min,
        _ => 0,
    }
}

/// The only multiset a leveled state can have: `remainder` nodes one unit
/// above `floor_avg`, the rest exactly at it. Returns `(floor_avg,
/// remainder)`.
pub fn uniform_target(loads: &[u64]) -> (u64, u64) {
    assert!(!loads.is_empty(), "uniform target needs at least one load");
    let sum: u64 = loads.iter().sum();
    let n = loads.len() as u64;
    (sum / n, sum % n)
}

/// Sorted multiset a converged redistribution must equal.
pub fn uniform_multiset(loads: &[u64]) -> Vec<u64> {
    let (floor_avg, remainder) = uniform_target(loads);
    let n = loads.len() as u64;
    let mut expected = vec![floor_avg; (n - remainder) as usize];
    expected.extend(std::iter::repeat_n(floor_avg + 1, remainder as usize));
    expected
}

/// Least-loaded greedy placement, naive edition: full scan per job, ties to
/// the lowest index.
pub fn reference_greedy_assign(initial_loads: &[u64], jobs: &[u64]) -> Vec<u64> {
    let mut loads = initial_loads.to_vec();
    assert!(!loads.is_empty(), "greedy assignment needs a machine");
    for &job in jobs {
        let idx = (0..loads.len())
            .min_by_key(|&i| (loads[i], i))
            .expect("non-empty");
        loads[idx] += job;
    }
    loads
}
