//! Suboptimal covering heuristics.
//!
//! `sweeping_leaves` packs the depth-first leaf order greedily into maximal
//! budget-feasible runs and is linear in the tree size. `dftn` (deepest
//! first, then nearest) repeatedly opens an immersion at the deepest
//! uncovered leaf and grows it with the uncovered leaf closest to the
//! immersion's current path union, closing the immersion as soon as the
//! nearest candidate no longer fits the budget.

use crate::immersion::{Immersion, PathMarker};
use crate::solution::CoverSolution;
use crate::tree::{validate_autonomy, InstanceError, NodeId, RootedTree};

/// Greedy sweep over the depth-first leaf order: extend the current
/// immersion while the budget allows, otherwise emit it and start a new one
/// at the current leaf. Every emitted immersion except possibly the last is
/// maximal, and each covers a contiguous run of the leaf order.
pub fn sweeping_leaves(tree: &RootedTree, p: u64) -> Result<CoverSolution, InstanceError> {
    validate_autonomy(tree, p)?;
    let mut immersions = Vec::new();
    let mut marker = PathMarker::new(tree);
    let mut run: Vec<NodeId> = Vec::new();
    for &leaf in tree.leaves() {
        if marker.cost() + marker.added_cost(leaf) <= p {
            marker.add(leaf);
            run.push(leaf);
        } else {
            immersions.push(Immersion::from_raw(std::mem::take(&mut run), marker.cost()));
            marker.reset();
            marker.add(leaf);
            run.push(leaf);
            debug_assert!(marker.cost() <= p, "single leaf infeasible despite p >= 2h");
        }
    }
    if !run.is_empty() {
        immersions.push(Immersion::from_raw(run, marker.cost()));
    }
    Ok(CoverSolution::from_immersions(immersions))
}

/// Deepest-first-then-nearest: start each immersion at the deepest
/// uncovered leaf, then repeatedly add the uncovered leaf nearest to the
/// immersion's path union until the next nearest leaf would exceed the
/// budget. Ties (equal depth, equal distance) resolve to the smallest
/// depth-first leaf index.
pub fn dftn(tree: &RootedTree, p: u64) -> Result<CoverSolution, InstanceError> {
    validate_autonomy(tree, p)?;
    let order = tree.leaves();
    let mut covered = vec![false; order.len()];
    let mut remaining = order.len();
    let mut immersions = Vec::new();
    let mut marker = PathMarker::new(tree);

    while remaining > 0 {
        let (start, _) = order
            .iter()
            .enumerate()
            .filter(|&(i, _)| !covered[i])
            .max_by_key(|&(i, &l)| (tree.depth(l), std::cmp::Reverse(i)))
            .expect("uncovered leaf exists");
        marker.reset();
        marker.add(order[start]);
        covered[start] = true;
        remaining -= 1;
        let mut members = vec![order[start]];
        debug_assert!(marker.cost() <= p, "single leaf infeasible despite p >= 2h");

        while remaining > 0 {
            let (next, added) = order
                .iter()
                .enumerate()
                .filter(|&(i, _)| !covered[i])
                .map(|(i, &l)| (i, marker.added_cost(l)))
                .min_by_key(|&(i, a)| (a, i))
                .expect("uncovered leaf exists");
            if marker.cost() + added > p {
                break;
            }
            marker.add(order[next]);
            covered[next] = true;
            remaining -= 1;
            members.push(order[next]);
        }
        immersions.push(Immersion::from_raw(members, marker.cost()));
    }
    Ok(CoverSolution::from_immersions(immersions))
}
