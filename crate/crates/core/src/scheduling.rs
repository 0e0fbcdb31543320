//! Makespan scheduling of immersions over `k` agents.
//!
//! `dp_makespan_partition` finds the exact minimum of the largest per-agent
//! cost sum by a dynamic program over canonical (sorted) load vectors: jobs
//! are processed in decreasing cost order, each reachable load multiset is
//! kept once, and states above a greedy upper bound are dropped. Being
//! pseudo-polynomial in the cost sum, it is exact at the instance sizes this
//! crate targets. `brute_force_makespan` checks it by trying all `k^m`
//! assignments.
//!
//! `min_time_heuristic` is the full suboptimal pipeline for covering with
//! `k` agents: take the `dftn` immersion set, then split it optimally with
//! the scheduling DP. `brute_force_min_time` solves the covering problem
//! exactly at small leaf counts by enumerating leaf partitions.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::exact::ExactError;
use crate::heuristics::dftn;
use crate::immersion::{immersion_cost, Immersion};
use crate::partitions::{blocks_of, for_each_partition};
use crate::solution::CoverSolution;
use crate::tree::{validate_autonomy, InstanceError, NodeId, RootedTree};

/// Default cap on the `k^m` assignment space of [`brute_force_makespan`].
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 10_000_000;

/// Default leaf cap for [`brute_force_min_time`] (Bell number B_9 = 21,147
/// partitions, each scheduled by the DP).
pub const DEFAULT_MIN_TIME_LEAF_CAP: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedError {
    #[error("agent count must be at least 1")]
    NoAgents,
    #[error("assignment space k^m = {combinations} exceeds the cap of {cap}")]
    CapExceeded { combinations: u128, cap: u128 },
}

/// An optimal split of jobs over `k` agents: the minimum possible maximum
/// block sum, with one block of job indices per agent (possibly empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub makespan: u64,
    pub blocks: Vec<Vec<usize>>,
}

/// Exact minimum makespan partition of `costs` into at most `k` blocks.
///
/// Among all optimal assignments, returns the one whose job-to-agent index
/// vector (in input order) is lexicographically smallest, so the result is
/// deterministic and stable across runs.
pub fn dp_makespan_partition(costs: &[u64], k: usize) -> Result<Schedule, SchedError> {
    if k < 1 {
        return Err(SchedError::NoAgents);
    }
    if costs.is_empty() {
        return Ok(Schedule {
            makespan: 0,
            blocks: vec![Vec::new(); k],
        });
    }
    let makespan = optimal_makespan(costs, k);

    // Recover the lexicographically smallest witness: assign each job in
    // input order to the lowest agent that still leaves the rest completable
    // within the optimal makespan.
    let mut completion = CompletionCheck {
        costs,
        bound: makespan,
        memo: HashMap::new(),
    };
    let mut loads = vec![0u64; k];
    let mut blocks = vec![Vec::new(); k];
    'jobs: for (j, &c) in costs.iter().enumerate() {
        for agent in 0..k {
            if agent > 0 && loads[agent] == loads[agent - 1] {
                continue; // same residual capacity, same outcome
            }
            if loads[agent] + c > makespan {
                continue;
            }
            loads[agent] += c;
            let mut sorted = loads.clone();
            sorted.sort_unstable();
            if completion.feasible(j + 1, sorted) {
                blocks[agent].push(j);
                continue 'jobs;
            }
            loads[agent] -= c;
        }
        unreachable!("the optimal makespan admits a completion");
    }
    Ok(Schedule { makespan, blocks })
}

/// Minimum max-load over all partitions of `costs` into `k` blocks, via the
/// sorted-load-vector DP.
fn optimal_makespan(costs: &[u64], k: usize) -> u64 {
    let mut desc: Vec<u64> = costs.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let upper = lpt_makespan(&desc, k);
    let lower = {
        let sum: u64 = desc.iter().sum();
        desc[0].max(sum.div_ceil(k as u64))
    };
    if upper == lower {
        return upper;
    }

    let mut states: HashSet<Vec<u64>> = HashSet::new();
    states.insert(vec![0; k]);
    for &c in &desc {
        let mut next: HashSet<Vec<u64>> = HashSet::with_capacity(states.len() * 2);
        for state in &states {
            for i in 0..k {
                if i > 0 && state[i] == state[i - 1] {
                    continue;
                }
                if state[i] + c > upper {
                    continue;
                }
                let mut succ = state.clone();
                succ[i] += c;
                succ.sort_unstable();
                next.insert(succ);
            }
        }
        states = next;
    }
    states
        .iter()
        .map(|s| *s.last().unwrap())
        .min()
        .expect("the greedy upper bound is reachable")
}

/// Longest-processing-time greedy: seeds the DP's upper bound only.
fn lpt_makespan(desc: &[u64], k: usize) -> u64 {
    let mut loads = vec![0u64; k];
    for &c in desc {
        let min = loads
            .iter()
            .enumerate()
            .min_by_key(|&(i, &l)| (l, i))
            .map(|(i, _)| i)
            .unwrap();
        loads[min] += c;
    }
    loads.into_iter().max().unwrap()
}

/// Memoized "can jobs `j..` be placed on these residual loads within the
/// bound" decision, keyed on the sorted load vector.
struct CompletionCheck<'a> {
    costs: &'a [u64],
    bound: u64,
    memo: HashMap<(usize, Vec<u64>), bool>,
}

impl CompletionCheck<'_> {
    fn feasible(&mut self, j: usize, sorted_loads: Vec<u64>) -> bool {
        if j == self.costs.len() {
            return true;
        }
        let key = (j, sorted_loads);
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let (_, loads) = &key;
        let c = self.costs[j];
        let mut ok = false;
        for i in 0..loads.len() {
            if i > 0 && loads[i] == loads[i - 1] {
                continue;
            }
            if loads[i] + c > self.bound {
                continue;
            }
            let mut succ = loads.clone();
            succ[i] += c;
            succ.sort_unstable();
            if self.feasible(j + 1, succ) {
                ok = true;
                break;
            }
        }
        self.memo.insert(key, ok);
        ok
    }
}

/// Exhaustive minimum makespan over all `k^m` assignments, with the default
/// cap. Testing oracle for [`dp_makespan_partition`].
pub fn brute_force_makespan(costs: &[u64], k: usize) -> Result<u64, SchedError> {
    brute_force_makespan_capped(costs, k, DEFAULT_ASSIGNMENT_CAP)
}

pub fn brute_force_makespan_capped(costs: &[u64], k: usize, cap: u128) -> Result<u64, SchedError> {
    if k < 1 {
        return Err(SchedError::NoAgents);
    }
    if costs.is_empty() {
        return Ok(0);
    }
    let combinations = (k as u128).saturating_pow(costs.len() as u32);
    if combinations > cap {
        return Err(SchedError::CapExceeded { combinations, cap });
    }
    let mut loads = vec![0u64; k];
    let mut best = costs.iter().sum::<u64>();
    assign_rest(costs, 0, &mut loads, 0, &mut best);
    Ok(best)
}

fn assign_rest(costs: &[u64], j: usize, loads: &mut [u64], current_max: u64, best: &mut u64) {
    if current_max >= *best {
        return; // loads only grow
    }
    if j == costs.len() {
        *best = current_max;
        return;
    }
    for i in 0..loads.len() {
        loads[i] += costs[j];
        assign_rest(costs, j + 1, loads, current_max.max(loads[i]), best);
        loads[i] -= costs[j];
    }
}

/// Suboptimal k-agent covering pipeline: immersions from [`dftn`], split
/// over the agents by [`dp_makespan_partition`]. The result carries the
/// assignment and its makespan.
pub fn min_time_heuristic(
    tree: &RootedTree,
    p: u64,
    k: usize,
) -> Result<CoverSolution, InstanceError> {
    validate_autonomy(tree, p)?;
    if k < 1 {
        return Err(InstanceError::NoAgents);
    }
    let cover = dftn(tree, p)?;
    let costs: Vec<u64> = cover.immersions().iter().map(Immersion::cost).collect();
    let schedule = dp_makespan_partition(&costs, k).expect("k >= 1");
    Ok(CoverSolution::with_assignment(
        cover.immersions().to_vec(),
        schedule.blocks,
    ))
}

/// Exact k-agent minimum-makespan cover at small leaf counts: enumerates
/// every leaf partition whose blocks fit the budget and schedules each with
/// the DP. Default leaf cap applies.
pub fn brute_force_min_time(
    tree: &RootedTree,
    p: u64,
    k: usize,
) -> Result<CoverSolution, ExactError> {
    brute_force_min_time_capped(tree, p, k, DEFAULT_MIN_TIME_LEAF_CAP)
}

pub fn brute_force_min_time_capped(
    tree: &RootedTree,
    p: u64,
    k: usize,
    leaf_cap: usize,
) -> Result<CoverSolution, ExactError> {
    validate_autonomy(tree, p)?;
    if k < 1 {
        return Err(ExactError::Instance(InstanceError::NoAgents));
    }
    let leaves = tree.leaves();
    if leaves.len() > leaf_cap {
        return Err(ExactError::LeafCapExceeded {
            leaves: leaves.len(),
            cap: leaf_cap,
        });
    }
    if leaves.is_empty() {
        return Ok(CoverSolution::with_assignment(
            Vec::new(),
            vec![Vec::new(); k],
        ));
    }

    let mut best: Option<(u64, Vec<Vec<NodeId>>, Schedule)> = None;
    for_each_partition(leaves.len(), |code| {
        let blocks = blocks_of(code);
        let mut costs = Vec::with_capacity(blocks.len());
        let mut sets: Vec<Vec<NodeId>> = Vec::with_capacity(blocks.len());
        for block in &blocks {
            let members: Vec<NodeId> = block.iter().map(|&i| leaves[i]).collect();
            let cost = immersion_cost(tree, &members).expect("members are leaves");
            if cost > p {
                return;
            }
            costs.push(cost);
            sets.push(members);
        }
        let schedule = dp_makespan_partition(&costs, k).expect("k >= 1");
        if best
            .as_ref()
            .is_none_or(|(m, _, _)| schedule.makespan < *m)
        {
            best = Some((schedule.makespan, sets, schedule));
        }
    });
    let (_, sets, schedule) = best.expect("the all-singletons partition is feasible");
    let immersions = sets
        .into_iter()
        .map(|members| Immersion::new(tree, members).expect("members are leaves"))
        .collect();
    Ok(CoverSolution::with_assignment(immersions, schedule.blocks))
}
