//! Exact optimisation for small instances.
//!
//! [`brute_force`] enumerates every permutation and is the reference oracle;
//! [`branch_and_bound`] searches prefixes depth first and prunes on the
//! tardiness already incurred by the prefix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Instance, JobId, Sequence, Time};
use crate::schedule::{advance, total_tardiness};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 10;
pub const DEFAULT_NODE_LIMIT: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalResult {
    pub best_value: Time,
    pub best_sequence: Sequence,
    /// Number of optimal sequences; only brute force counts them.
    pub optimal_set_size: Option<u64>,
    /// Nodes evaluated below the root; only branch and bound reports it.
    pub nodes_explored: Option<u64>,
    /// False when the node limit stopped the search early.
    pub proven: bool,
}

/// Rearranges `v` into the next lexicographic permutation and returns the
/// first index that changed, or `None` after the last permutation.
fn next_permutation(v: &mut [JobId]) -> Option<usize> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return None;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    Some(i - 1)
}

#[derive(Debug, Clone)]
struct Enumeration {
    best_value: Time,
    best_order: Vec<JobId>,
    count: u64,
}

/// Enumerates, in lexicographic order, every permutation starting with `first`.
fn enumerate_branch(instance: &Instance, first: JobId) -> Enumeration {
    let n = instance.n();
    let mut order: Vec<JobId> = std::iter::once(first)
        .chain((1..=n).filter(|&id| id != first))
        .collect();

    // prefix caches: clock[k], tardy[k] after the first k jobs
    let mut clock = vec![0; n + 1];
    let mut tardy = vec![0; n + 1];
    let refresh = |order: &[JobId], from: usize, clock: &mut [Time], tardy: &mut [Time]| {
        for k in from..order.len() {
            let job = instance.job(order[k]);
            let c = clock[k] + job.processing_time_at(clock[k]);
            clock[k + 1] = c;
            tardy[k + 1] = tardy[k] + (c - job.d).max(0);
        }
    };
    refresh(&order, 0, &mut clock, &mut tardy);

    let mut best = Enumeration {
        best_value: tardy[n],
        best_order: order.clone(),
        count: 1,
    };
    // position 0 is fixed; permute the tail only
    while let Some(changed) = next_permutation(&mut order[1..]) {
        let from = changed + 1;
        refresh(&order, from, &mut clock, &mut tardy);
        let value = tardy[n];
        if value < best.best_value {
            best.best_value = value;
            best.best_order.copy_from_slice(&order);
            best.count = 1;
        } else if value == best.best_value {
            best.count += 1;
        }
    }
    best
}

/// Enumerates all `n!` sequences.
///
/// Returns the minimum total tardiness, the lexicographically smallest
/// sequence attaining it and the number of sequences that do.
pub fn brute_force(instance: &Instance, n_cap: usize) -> Result<OptimalResult> {
    brute_force_with(instance, n_cap, Execution::default())
}

/// [`brute_force`] with an explicit execution mode. Work is split by the
/// first job in the sequence.
pub fn brute_force_with(
    instance: &Instance,
    n_cap: usize,
    exec: Execution,
) -> Result<OptimalResult> {
    let n = instance.n();
    if n > n_cap {
        return Err(Error::SizeCap {
            method: "brute force",
            n,
            cap: n_cap,
        });
    }
    let branches = exec.map_range(1..n + 1, |first| enumerate_branch(instance, first));

    // branches come back ordered by first job, so the first minimum is the
    // lexicographically smallest optimum
    let mut best: Option<Enumeration> = None;
    let mut count = 0;
    let best_value = branches.iter().map(|b| b.best_value).min().expect("n >= 1");
    for branch in branches {
        if branch.best_value == best_value {
            count += branch.count;
            if best.is_none() {
                best = Some(branch);
            }
        }
    }
    let best = best.expect("a branch attains the minimum");
    Ok(OptimalResult {
        best_value,
        best_sequence: Sequence::from_vec_unchecked(best.best_order),
        optimal_set_size: Some(count),
        nodes_explored: None,
        proven: true,
    })
}

/// Total tardiness of the scheduled prefix.
///
/// Tardiness is non-negative and non-decreasing in completion times, so no
/// completion of the prefix can score lower.
pub fn prefix_lower_bound(instance: &Instance, prefix: &[JobId]) -> Time {
    total_tardiness(instance, prefix)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchAndBoundOptions {
    pub node_limit: u64,
    /// Prune prefixes whose last two jobs can be interchanged without loss.
    pub interchange_pruning: bool,
}

impl Default for BranchAndBoundOptions {
    fn default() -> Self {
        BranchAndBoundOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            interchange_pruning: true,
        }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    options: BranchAndBoundOptions,
    /// Unscheduled candidates, kept in EDD order.
    edd: Vec<JobId>,
    used: Vec<bool>,
    prefix: Vec<JobId>,
    clock: Vec<Time>,
    tardy: Vec<Time>,
    incumbent: Time,
    best: Vec<JobId>,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Adjacent interchange dominance on the last two jobs of a prefix of
    /// length `len` (`len >= 2`).
    ///
    /// Let the prefix end with `k, j`. It is dropped when running `j, k`
    /// instead finishes no later with no more tardiness, and either strictly
    /// less tardiness or the same finish time with `j < k`. A strict gain
    /// contradicts optimality, and the tie rule can never remove the
    /// lexicographically smallest optimum, so some optimum always survives.
    fn interchange_dominated(&self, len: usize) -> bool {
        let k = self.prefix[len - 2];
        let j = self.prefix[len - 1];
        let base_clock = self.clock[len - 2];
        let base_tardy = self.tardy[len - 2];
        let (swapped_clock, swapped_tardy) =
            advance(self.instance, &[j, k], base_clock, base_tardy);
        let (clock, tardy) = (self.clock[len], self.tardy[len]);
        swapped_clock <= clock
            && swapped_tardy <= tardy
            && (swapped_tardy < tardy || (swapped_clock == clock && j < k))
    }

    fn descend(&mut self, depth: usize) {
        let n = self.instance.n();
        if depth == n {
            if self.tardy[n] < self.incumbent {
                self.incumbent = self.tardy[n];
                self.best.copy_from_slice(&self.prefix);
            }
            return;
        }
        for idx in 0..self.edd.len() {
            let id = self.edd[idx];
            if self.used[id] {
                continue;
            }
            if self.nodes >= self.options.node_limit {
                self.aborted = true;
                return;
            }
            self.nodes += 1;

            let job = self.instance.job(id);
            let c = self.clock[depth] + job.processing_time_at(self.clock[depth]);
            let t = self.tardy[depth] + (c - job.d).max(0);
            if t >= self.incumbent {
                continue;
            }
            self.prefix[depth] = id;
            self.clock[depth + 1] = c;
            self.tardy[depth + 1] = t;
            if self.options.interchange_pruning
                && depth >= 1
                && self.interchange_dominated(depth + 1)
            {
                continue;
            }

            self.used[id] = true;
            self.descend(depth + 1);
            self.used[id] = false;
            if self.aborted {
                return;
            }
        }
    }
}

/// Depth-first branch and bound with the prefix tardiness as lower bound.
///
/// Children are expanded in EDD order. If the node limit is hit, the best
/// sequence found so far is returned with `proven == false`; if no complete
/// sequence was reached at all, the EDD sequence stands in.
pub fn branch_and_bound(instance: &Instance, options: BranchAndBoundOptions) -> OptimalResult {
    let n = instance.n();
    let mut edd: Vec<JobId> = (1..=n).collect();
    edd.sort_by_key(|&id| (instance.job(id).d, id));

    let mut search = Search {
        instance,
        options,
        edd,
        used: vec![false; n + 1],
        prefix: vec![0; n],
        clock: vec![0; n + 1],
        tardy: vec![0; n + 1],
        incumbent: Time::MAX,
        best: vec![0; n],
        nodes: 0,
        aborted: false,
    };
    search.descend(0);

    if search.incumbent == Time::MAX {
        search.best = search.edd.clone();
        search.incumbent = total_tardiness(instance, &search.best);
    }
    OptimalResult {
        best_value: search.incumbent,
        best_sequence: Sequence::from_vec_unchecked(search.best),
        optimal_set_size: None,
        nodes_explored: Some(search.nodes),
        proven: !search.aborted,
    }
}
