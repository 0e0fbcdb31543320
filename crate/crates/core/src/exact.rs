//! Exact covering solvers.
//!
//! `bc_min_distance` and `bc_min_immersions` run a depth-first
//! branch-and-bound over leaf partitions: immersions are opened one at a
//! time, each anchored at the first uncovered leaf in a fixed
//! depth-decreasing order, and the remaining leaves in that order are
//! branched on (include if the budget allows / exclude). Anchoring gives
//! every partition exactly one search path. Branches are cut by an
//! admissible lower bound on the remaining work, and the incumbent starts
//! from the better of the two heuristics, so the search only has to prove
//! optimality or beat it.
//!
//! `brute_force_min_distance` and `brute_force_min_immersions` enumerate
//! every set partition of the leaves instead. They are exponential in the
//! leaf count (Bell numbers) and capped accordingly, and serve as the
//! independent oracle the branch-and-bound is tested against.

use thiserror::Error;

use crate::heuristics::{dftn, sweeping_leaves};
use crate::immersion::{immersion_cost, Immersion, PathMarker};
use crate::partitions::{blocks_of, for_each_partition};
use crate::solution::CoverSolution;
use crate::tree::{validate_autonomy, InstanceError, NodeId, RootedTree};

/// Largest leaf count the brute-force partition solvers accept by default
/// (Bell number B_10 = 115,975 partitions).
pub const DEFAULT_BRUTE_FORCE_LEAF_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{leaves} leaves exceed the brute-force cap of {cap}")]
    LeafCapExceeded { leaves: usize, cap: usize },
}

/// Knobs for the branch-and-bound search. With no node budget the search is
/// exhaustive and the result is proven optimal.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    /// Abort after exploring this many search nodes, keeping the incumbent.
    pub node_budget: Option<u64>,
    /// Abort once this much wall time has elapsed (checked periodically).
    pub wall_limit: Option<std::time::Duration>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_explored: u64,
    /// False when the search aborted on a budget; the solution is then the
    /// best incumbent found, not a proven optimum.
    pub proven_optimal: bool,
}

/// Minimum-total-distance cover. Independent of the agent count.
pub fn bc_min_distance(tree: &RootedTree, p: u64) -> Result<CoverSolution, InstanceError> {
    bc_min_distance_with(tree, p, SearchOptions::default()).map(|(sol, _)| sol)
}

pub fn bc_min_distance_with(
    tree: &RootedTree,
    p: u64,
    options: SearchOptions,
) -> Result<(CoverSolution, SearchStats), InstanceError> {
    branch_and_bound(tree, p, Objective::Distance, options)
}

/// Minimum-cardinality cover; ties in the immersion count resolve to the
/// smaller total distance.
pub fn bc_min_immersions(tree: &RootedTree, p: u64) -> Result<CoverSolution, InstanceError> {
    bc_min_immersions_with(tree, p, SearchOptions::default()).map(|(sol, _)| sol)
}

pub fn bc_min_immersions_with(
    tree: &RootedTree,
    p: u64,
    options: SearchOptions,
) -> Result<(CoverSolution, SearchStats), InstanceError> {
    branch_and_bound(tree, p, Objective::Immersions, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Distance,
    Immersions,
}

/// Objective keys are `(primary, secondary)` pairs compared
/// lexicographically: `(distance, 0)` for Min-Distance and
/// `(count, distance)` for Min-Immersions.
type Key = (u64, u64);

fn branch_and_bound(
    tree: &RootedTree,
    p: u64,
    objective: Objective,
    options: SearchOptions,
) -> Result<(CoverSolution, SearchStats), InstanceError> {
    validate_autonomy(tree, p)?;
    if tree.leaves().is_empty() {
        return Ok((
            CoverSolution::from_immersions(Vec::new()),
            SearchStats {
                nodes_explored: 0,
                proven_optimal: true,
            },
        ));
    }

    // Seed the incumbent with the better heuristic cover; the search then
    // starts with a tight bound and can only improve on it.
    let seed = [sweeping_leaves(tree, p), dftn(tree, p)]
        .into_iter()
        .map(|sol| sol.expect("autonomy already validated"))
        .min_by_key(|sol| solution_key(objective, sol))
        .unwrap();

    let mut order: Vec<NodeId> = tree.leaves().to_vec();
    order.sort_by_key(|&l| (std::cmp::Reverse(tree.depth(l)), tree.leaf_rank(l)));

    let incumbent_key = solution_key(objective, &seed);
    let mut search = Search {
        tree,
        p,
        objective,
        covered: vec![false; order.len()],
        order,
        markers: Vec::new(),
        level_leaves: Vec::new(),
        committed_costs: Vec::new(),
        committed_cost: 0,
        stamp: vec![0; tree.node_count()],
        epoch: 0,
        incumbent: seed.immersions().to_vec(),
        incumbent_key,
        nodes: 0,
        options,
        started: std::time::Instant::now(),
        aborted: false,
    };
    search.new_tree();

    let stats = SearchStats {
        nodes_explored: search.nodes,
        proven_optimal: !search.aborted,
    };
    Ok((CoverSolution::from_immersions(search.incumbent), stats))
}

fn solution_key(objective: Objective, sol: &CoverSolution) -> Key {
    match objective {
        Objective::Distance => (sol.total_distance(), 0),
        Objective::Immersions => (sol.immersion_count() as u64, sol.total_distance()),
    }
}

struct Search<'a> {
    tree: &'a RootedTree,
    p: u64,
    objective: Objective,
    /// Leaves in depth-decreasing order (ties by leaf rank); `covered` is
    /// indexed by position in this order.
    order: Vec<NodeId>,
    covered: Vec<bool>,
    /// One path marker and one member list per immersion nesting level,
    /// reused across the whole search. Level `committed_costs.len()` is the
    /// open immersion; everything below it is committed and frozen.
    markers: Vec<PathMarker<'a>>,
    level_leaves: Vec<Vec<NodeId>>,
    committed_costs: Vec<u64>,
    committed_cost: u64,
    /// Epoch-stamped scratch for Steiner-weight accumulation in the bound.
    stamp: Vec<u32>,
    epoch: u32,
    incumbent: Vec<Immersion>,
    incumbent_key: Key,
    nodes: u64,
    options: SearchOptions,
    started: std::time::Instant,
    aborted: bool,
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> bool {
        if self.aborted {
            return false;
        }
        self.nodes += 1;
        if let Some(budget) = self.options.node_budget {
            if self.nodes > budget {
                self.aborted = true;
                return false;
            }
        }
        if let Some(limit) = self.options.wall_limit {
            if self.nodes % 65_536 == 0 && self.started.elapsed() > limit {
                self.aborted = true;
                return false;
            }
        }
        true
    }

    /// Opens the next immersion at the first uncovered leaf, or records a
    /// complete cover.
    fn new_tree(&mut self) {
        if !self.tick() {
            return;
        }
        let anchor = match self.covered.iter().position(|&c| !c) {
            Some(pos) => pos,
            None => {
                let count = self.committed_costs.len();
                let key = match self.objective {
                    Objective::Distance => (self.committed_cost, 0),
                    Objective::Immersions => (count as u64, self.committed_cost),
                };
                if key < self.incumbent_key {
                    self.incumbent_key = key;
                    self.incumbent = (0..count)
                        .map(|i| {
                            Immersion::from_raw(self.level_leaves[i].clone(), self.committed_costs[i])
                        })
                        .collect();
                }
                return;
            }
        };

        let level = self.committed_costs.len();
        if self.markers.len() == level {
            self.markers.push(PathMarker::new(self.tree));
            self.level_leaves.push(Vec::new());
        }
        self.markers[level].reset();
        self.markers[level].add(self.order[anchor]);
        debug_assert!(self.markers[level].cost() <= self.p);
        self.covered[anchor] = true;
        self.level_leaves[level].clear();
        self.level_leaves[level].push(self.order[anchor]);

        self.new_node(anchor + 1);

        self.covered[anchor] = false;
    }

    /// Branches on including/excluding the leaf at `cursor` in the open
    /// immersion; at the end of the order, commits the immersion and starts
    /// the next one.
    fn new_node(&mut self, cursor: usize) {
        if !self.tick() {
            return;
        }
        if self.lower_bound(cursor) >= self.incumbent_key {
            return;
        }
        if cursor == self.order.len() {
            let level = self.committed_costs.len();
            let cost = self.markers[level].cost();
            self.committed_costs.push(cost);
            self.committed_cost += cost;

            self.new_tree();

            self.committed_costs.pop();
            self.committed_cost -= cost;
            return;
        }

        if !self.covered[cursor] {
            let leaf = self.order[cursor];
            let level = self.committed_costs.len();
            let added = self.markers[level].added_cost(leaf);
            if self.markers[level].cost() + added <= self.p {
                let mark = self.markers[level].trail_len();
                self.markers[level].add(leaf);
                self.covered[cursor] = true;
                self.level_leaves[level].push(leaf);

                self.new_node(cursor + 1);

                self.level_leaves[level].pop();
                self.covered[cursor] = false;
                self.markers[level].undo_to(mark);
            }
        }
        self.new_node(cursor + 1);
    }

    /// Admissible lower bound on the best completion of this search node.
    ///
    /// Every uncovered leaf that can no longer join the open immersion
    /// (already passed by the cursor, or over budget even alone with the
    /// current union) must be covered by future immersions, which together
    /// traverse at least twice the weight of the Steiner union of those
    /// leaves' root paths. Every other uncovered leaf still costs at least
    /// twice its own terminal edge wherever it ends up; terminal edges are
    /// disjoint from each other and from that Steiner union. For the
    /// immersion-count objective, the future Steiner weight forces at least
    /// `ceil(2 * steiner / p)` additional immersions.
    fn lower_bound(&mut self, cursor: usize) -> Key {
        let marker = &self.markers[self.committed_costs.len()];
        let open_cost = marker.cost();
        self.epoch += 1;
        let mut steiner: u64 = 0;
        let mut terminal: u64 = 0;
        for pos in 0..self.order.len() {
            if self.covered[pos] {
                continue;
            }
            let leaf = self.order[pos];
            let must_defer =
                pos < cursor || open_cost + 2 * marker.distance_to_marked(leaf) > self.p;
            if must_defer {
                // Accumulate unseen path weight up to the root.
                let mut v = leaf;
                while v != self.tree.root() && self.stamp[v.idx()] != self.epoch {
                    self.stamp[v.idx()] = self.epoch;
                    steiner += self.tree.up_len(v);
                    v = self.tree.parent(v).expect("non-root node has a parent");
                }
            } else {
                terminal += self.tree.up_len(leaf);
            }
        }
        let dist = self.committed_cost + open_cost + 2 * steiner + 2 * terminal;
        match self.objective {
            Objective::Distance => (dist, 0),
            Objective::Immersions => {
                let future = (2 * steiner).div_ceil(self.p.max(1));
                (self.committed_costs.len() as u64 + 1 + future, dist)
            }
        }
    }
}

/// Minimum-total-distance cover by exhaustive partition enumeration, with
/// the default leaf cap.
pub fn brute_force_min_distance(tree: &RootedTree, p: u64) -> Result<CoverSolution, ExactError> {
    brute_force_min_distance_capped(tree, p, DEFAULT_BRUTE_FORCE_LEAF_CAP)
}

pub fn brute_force_min_distance_capped(
    tree: &RootedTree,
    p: u64,
    leaf_cap: usize,
) -> Result<CoverSolution, ExactError> {
    brute_force_best(tree, p, leaf_cap, Objective::Distance)
}

/// Minimum-cardinality cover by exhaustive partition enumeration (distance
/// breaks ties), with the default leaf cap.
pub fn brute_force_min_immersions(tree: &RootedTree, p: u64) -> Result<CoverSolution, ExactError> {
    brute_force_min_immersions_capped(tree, p, DEFAULT_BRUTE_FORCE_LEAF_CAP)
}

pub fn brute_force_min_immersions_capped(
    tree: &RootedTree,
    p: u64,
    leaf_cap: usize,
) -> Result<CoverSolution, ExactError> {
    brute_force_best(tree, p, leaf_cap, Objective::Immersions)
}

fn brute_force_best(
    tree: &RootedTree,
    p: u64,
    leaf_cap: usize,
    objective: Objective,
) -> Result<CoverSolution, ExactError> {
    validate_autonomy(tree, p)?;
    let leaves = tree.leaves();
    if leaves.len() > leaf_cap {
        return Err(ExactError::LeafCapExceeded {
            leaves: leaves.len(),
            cap: leaf_cap,
        });
    }
    let mut best: Option<(Key, Vec<Vec<NodeId>>)> = None;
    for_each_partition(leaves.len(), |code| {
        let blocks = blocks_of(code);
        let mut total = 0u64;
        for block in &blocks {
            let members: Vec<NodeId> = block.iter().map(|&i| leaves[i]).collect();
            let cost = immersion_cost(tree, &members).expect("members are leaves");
            if cost > p {
                return;
            }
            total += cost;
        }
        let key = match objective {
            Objective::Distance => (total, 0),
            Objective::Immersions => (blocks.len() as u64, total),
        };
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            let sets = blocks
                .iter()
                .map(|block| block.iter().map(|&i| leaves[i]).collect())
                .collect();
            best = Some((key, sets));
        }
    });
    // p >= 2h makes every singleton feasible, so the all-singletons
    // partition always qualifies.
    let (_, sets) = best.expect("at least one feasible partition exists");
    let immersions = sets
        .into_iter()
        .map(|members: Vec<NodeId>| Immersion::new(tree, members).expect("members are leaves"))
        .collect();
    Ok(CoverSolution::from_immersions(immersions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::InstanceParams;

    fn fig_tree() -> RootedTree {
        RootedTree::parse("4 1\n1 2 1\n2 3 1\n2 4 1").unwrap()
    }

    fn star(leaves: usize) -> RootedTree {
        let mut text = format!("{} 1\n", leaves + 1);
        for i in 0..leaves {
            text.push_str(&format!("1 {} 1\n", i + 2));
        }
        RootedTree::parse(&text).unwrap()
    }

    #[test]
    fn min_distance_on_sample_tree() {
        let t = fig_tree();
        let sol = bc_min_distance(&t, 6).unwrap();
        assert_eq!(sol.total_distance(), 6);
        assert_eq!(sol.immersion_count(), 1);
        let sol = bc_min_distance(&t, 4).unwrap();
        assert_eq!(sol.total_distance(), 8);
        assert_eq!(sol.immersion_count(), 2);
    }

    #[test]
    fn min_immersions_on_sample_and_stars() {
        let t = fig_tree();
        assert_eq!(bc_min_immersions(&t, 6).unwrap().immersion_count(), 1);
        assert_eq!(bc_min_immersions(&star(3), 4).unwrap().immersion_count(), 2);
        assert_eq!(bc_min_immersions(&star(5), 4).unwrap().immersion_count(), 3);
    }

    #[test]
    fn brute_force_on_sample_tree() {
        let t = fig_tree();
        assert_eq!(brute_force_min_distance(&t, 6).unwrap().total_distance(), 6);
        assert_eq!(brute_force_min_distance(&t, 4).unwrap().total_distance(), 8);
        assert_eq!(
            brute_force_min_immersions(&t, 6).unwrap().immersion_count(),
            1
        );
    }

    #[test]
    fn brute_force_star_cases() {
        assert_eq!(
            brute_force_min_distance(&star(3), 4).unwrap().total_distance(),
            6
        );
        assert_eq!(
            brute_force_min_immersions(&star(5), 4)
                .unwrap()
                .immersion_count(),
            3
        );
        let single = RootedTree::parse("2 1\n1 2 1").unwrap();
        assert_eq!(
            brute_force_min_immersions(&single, 2)
                .unwrap()
                .immersion_count(),
            1
        );
    }

    #[test]
    fn single_block_optimal_when_budget_is_loose() {
        // With every leaf in one walk each needed edge is traversed twice;
        // any split repeats shared prefixes.
        for seed in 0..10 {
            let t = RootedTree::random(12, seed).unwrap();
            let all = immersion_cost(&t, t.leaves()).unwrap();
            let sol = brute_force_min_distance(&t, all.max(2 * t.height())).unwrap();
            assert_eq!(sol.total_distance(), all, "seed {seed}");
        }
    }

    #[test]
    fn leaf_cap_is_enforced() {
        let t = star(11);
        assert_eq!(
            brute_force_min_distance(&t, 4).unwrap_err(),
            ExactError::LeafCapExceeded {
                leaves: 11,
                cap: 10
            }
        );
        assert!(brute_force_min_distance_capped(&t, 4, 11).is_ok());
    }

    #[test]
    fn search_agrees_with_oracle_on_random_trees() {
        for seed in 0..60 {
            let t = RootedTree::random(4 + (seed as usize % 9), 1000 + seed).unwrap();
            if t.leaves().len() > DEFAULT_BRUTE_FORCE_LEAF_CAP {
                continue;
            }
            for extra in [0, 1] {
                let p = 2 * (t.height() + extra);
                let bc = bc_min_distance(&t, p).unwrap();
                let oracle = brute_force_min_distance(&t, p).unwrap();
                assert_eq!(bc.total_distance(), oracle.total_distance(), "seed {seed}");

                let bc = bc_min_immersions(&t, p).unwrap();
                let oracle = brute_force_min_immersions(&t, p).unwrap();
                assert_eq!(bc.immersion_count(), oracle.immersion_count(), "seed {seed}");
                assert_eq!(bc.total_distance(), oracle.total_distance(), "seed {seed}");
            }
        }
    }

    #[test]
    fn solutions_verify_and_infeasible_instances_error() {
        let t = fig_tree();
        for p in [4, 6, 8] {
            let sol = bc_min_distance(&t, p).unwrap();
            assert!(sol.verify(&t, &InstanceParams { p, k: 1 }).is_empty());
        }
        assert!(matches!(
            bc_min_distance(&t, 3),
            Err(InstanceError::AutonomyTooSmall { .. })
        ));
        assert!(matches!(
            brute_force_min_distance(&t, 3),
            Err(ExactError::Instance(_))
        ));
    }

    #[test]
    fn node_budget_aborts_but_keeps_incumbent() {
        let t = RootedTree::random(40, 3).unwrap();
        let p = 2 * t.height();
        let (sol, stats) = bc_min_distance_with(
            &t,
            p,
            SearchOptions {
                node_budget: Some(1),
                wall_limit: None,
            },
        )
        .unwrap();
        assert!(!stats.proven_optimal);
        assert!(sol.verify(&t, &InstanceParams { p, k: 1 }).is_empty());
        // The incumbent is heuristic-seeded, so it is a valid cover already.
        let (full, full_stats) = bc_min_distance_with(&t, p, SearchOptions::default()).unwrap();
        assert!(full_stats.proven_optimal);
        assert!(full.total_distance() <= sol.total_distance());
    }

    #[test]
    fn single_node_tree_needs_no_immersions() {
        let t = RootedTree::parse("1 1").unwrap();
        let sol = bc_min_distance(&t, 0).unwrap();
        assert_eq!(sol.immersion_count(), 0);
        assert_eq!(sol.total_distance(), 0);
    }
}
