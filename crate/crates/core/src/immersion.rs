//! Leaf-set immersions and their walk costs.
//!
//! An immersion is a closed walk that leaves the root, visits a chosen set
//! of leaves, and returns. The walk traverses the union of the root-to-leaf
//! paths (a subtree rooted at the root) and a depth-first tour of that
//! subtree crosses each of its edges exactly twice, so the cost of an
//! immersion is twice the total edge length of the path union. Every solver
//! in this crate represents immersions purely by their leaf sets and derives
//! costs from this rule.

use thiserror::Error;

use crate::tree::{NodeId, RootedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("node {id} is not a leaf")]
    NotALeaf { id: u32 },
    #[error("leaf {id} is already in the immersion")]
    AlreadyCovered { id: u32 },
    #[error("run is not a contiguous block of the depth-first leaf order")]
    NonContiguousRun,
}

/// A set of leaves together with the cached cost of the closed walk that
/// covers them. Equality compares leaf sets and costs, so two immersions
/// over the same tree are equal exactly when they cover the same leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Immersion {
    leaves: Vec<NodeId>,
    cost: u64,
}

impl Immersion {
    /// Builds an immersion over `tree` from the given leaves, computing its
    /// cost. Duplicate members are rejected.
    pub fn new(
        tree: &RootedTree,
        leaves: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self, CostError> {
        let mut sorted: Vec<NodeId> = leaves.into_iter().collect();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(CostError::AlreadyCovered { id: pair[0].get() });
            }
        }
        let cost = immersion_cost(tree, &sorted)?;
        Ok(Immersion {
            leaves: sorted,
            cost,
        })
    }

    pub fn empty() -> Self {
        Immersion {
            leaves: Vec::new(),
            cost: 0,
        }
    }

    /// Used by solvers and the solution parser, which already know (or claim
    /// to know) the cost; `CoverSolution::verify` re-derives it.
    pub(crate) fn from_raw(mut leaves: Vec<NodeId>, cost: u64) -> Self {
        leaves.sort_unstable();
        Immersion { leaves, cost }
    }

    /// Leaves in ascending label order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn contains(&self, l: NodeId) -> bool {
        self.leaves.binary_search(&l).is_ok()
    }

    /// Cost increase from extending this immersion with leaf `l`: twice the
    /// distance from `l` to the nearest node of the current path union (the
    /// root alone, for an empty immersion).
    pub fn added_cost(&self, tree: &RootedTree, l: NodeId) -> Result<u64, CostError> {
        if !tree.is_leaf(l) {
            return Err(CostError::NotALeaf { id: l.get() });
        }
        if self.contains(l) {
            return Err(CostError::AlreadyCovered { id: l.get() });
        }
        let mut marker = PathMarker::new(tree);
        for &m in &self.leaves {
            marker.add(m);
        }
        Ok(marker.added_cost(l))
    }
}

/// Twice the total edge length of the union of root-to-leaf paths over
/// `leaves`. Marks paths bottom-up, stopping at the first already-marked
/// node, so shared prefixes are counted once.
pub fn immersion_cost(tree: &RootedTree, leaves: &[NodeId]) -> Result<u64, CostError> {
    let mut marker = PathMarker::new(tree);
    for &l in leaves {
        if !tree.is_leaf(l) {
            return Err(CostError::NotALeaf { id: l.get() });
        }
        marker.add(l);
    }
    Ok(marker.cost())
}

/// `immersion_cost <= p`.
pub fn is_feasible(tree: &RootedTree, leaves: &[NodeId], p: u64) -> Result<bool, CostError> {
    Ok(immersion_cost(tree, leaves)? <= p)
}

/// Cost of an immersion whose leaves form a contiguous run of the
/// depth-first leaf order, evaluated as the closed-tour sum
/// `d(root, l_first) + d(l_first, l_second) + ... + d(l_last, root)`.
/// Equals [`immersion_cost`] of the same leaves: the tour visits the run in
/// depth-first order and crosses each path-union edge exactly twice.
pub fn consecutive_leaf_cost(tree: &RootedTree, run: &[NodeId]) -> Result<u64, CostError> {
    if run.is_empty() {
        return Ok(0);
    }
    let start = tree
        .leaf_rank(run[0])
        .ok_or(CostError::NotALeaf { id: run[0].get() })?;
    let order = tree.leaves();
    if start + run.len() > order.len() || &order[start..start + run.len()] != run {
        // Re-report non-leaf members distinctly from order violations.
        for &l in run {
            if !tree.is_leaf(l) {
                return Err(CostError::NotALeaf { id: l.get() });
            }
        }
        return Err(CostError::NonContiguousRun);
    }
    let root = tree.root();
    let mut total = tree.distance(root, run[0]).expect("nodes belong to tree");
    for pair in run.windows(2) {
        total += tree.distance(pair[0], pair[1]).expect("nodes belong to tree");
    }
    total += tree
        .distance(*run.last().unwrap(), root)
        .expect("nodes belong to tree");
    Ok(total)
}

/// Incremental path-union bookkeeping shared by the heuristics and the
/// exact search: tracks which nodes the current immersion's walk reaches and
/// the doubled edge weight of the union. Additions are undone by truncating
/// the mark trail, so a search can backtrack in O(nodes unmarked).
pub(crate) struct PathMarker<'a> {
    tree: &'a RootedTree,
    marked: Vec<bool>,
    trail: Vec<NodeId>,
    cost: u64,
}

impl<'a> PathMarker<'a> {
    pub fn new(tree: &'a RootedTree) -> Self {
        let mut marked = vec![false; tree.node_count()];
        marked[tree.root().idx()] = true;
        PathMarker {
            tree,
            marked,
            trail: Vec::new(),
            cost: 0,
        }
    }

    /// Doubled weight of the currently marked path union.
    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    #[cfg(test)]
    pub fn is_marked(&self, v: NodeId) -> bool {
        self.marked[v.idx()]
    }

    /// Weighted distance from `v` up to the nearest marked node.
    pub fn distance_to_marked(&self, v: NodeId) -> u64 {
        let mut d = 0;
        let mut cur = v;
        while !self.marked[cur.idx()] {
            d += self.tree.up_len(cur);
            cur = self.tree.parent(cur).expect("root is always marked");
        }
        d
    }

    /// Cost increase if `leaf` were added now.
    pub fn added_cost(&self, leaf: NodeId) -> u64 {
        2 * self.distance_to_marked(leaf)
    }

    /// Marks the path from `leaf` up to the existing union.
    pub fn add(&mut self, leaf: NodeId) {
        let mut cur = leaf;
        while !self.marked[cur.idx()] {
            self.marked[cur.idx()] = true;
            self.trail.push(cur);
            self.cost += 2 * self.tree.up_len(cur);
            cur = self.tree.parent(cur).expect("root is always marked");
        }
    }

    /// Unmarks everything added after the trail had length `len`.
    pub fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().unwrap();
            self.marked[v.idx()] = false;
            self.cost -= 2 * self.tree.up_len(v);
        }
    }

    pub fn reset(&mut self) {
        self.undo_to(0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nid(id: u32) -> NodeId {
        NodeId::new(id).unwrap()
    }

    fn fig_tree() -> RootedTree {
        RootedTree::parse("4 1\n1 2 1\n2 3 1\n2 4 1").unwrap()
    }

    #[test]
    fn cost_of_leaf_sets() {
        let t = fig_tree();
        assert_eq!(immersion_cost(&t, &[nid(3), nid(4)]).unwrap(), 6);
        assert_eq!(immersion_cost(&t, &[nid(3)]).unwrap(), 4);
        assert_eq!(immersion_cost(&t, &[]).unwrap(), 0);
        assert_eq!(
            immersion_cost(&t, &[nid(2)]).unwrap_err(),
            CostError::NotALeaf { id: 2 }
        );
    }

    #[test]
    fn added_cost_matches_cost_difference() {
        let t = fig_tree();
        let single = Immersion::new(&t, [nid(3)]).unwrap();
        assert_eq!(single.added_cost(&t, nid(4)).unwrap(), 2);
        let empty = Immersion::empty();
        assert_eq!(empty.added_cost(&t, nid(4)).unwrap(), 4);
        assert_eq!(
            single.added_cost(&t, nid(3)).unwrap_err(),
            CostError::AlreadyCovered { id: 3 }
        );
        assert_eq!(
            single.added_cost(&t, nid(2)).unwrap_err(),
            CostError::NotALeaf { id: 2 }
        );
    }

    #[test]
    fn added_cost_on_disjoint_branches_is_full_depth() {
        let t = RootedTree::parse("5 1\n1 2 1\n2 3 1\n1 4 1\n4 5 1").unwrap();
        let single = Immersion::new(&t, [nid(3)]).unwrap();
        assert_eq!(single.added_cost(&t, nid(5)).unwrap(), 2 * t.depth(nid(5)));
    }

    #[test]
    fn consecutive_run_telescopes() {
        let t = fig_tree();
        assert_eq!(consecutive_leaf_cost(&t, &[nid(3), nid(4)]).unwrap(), 6);
        assert_eq!(consecutive_leaf_cost(&t, &[nid(4)]).unwrap(), 4);
        assert_eq!(consecutive_leaf_cost(&t, &[]).unwrap(), 0);
        let five = RootedTree::parse("5 1\n1 2 1\n2 3 1\n1 4 1\n4 5 1").unwrap();
        assert_eq!(
            consecutive_leaf_cost(&five, &[nid(5), nid(3)]).unwrap_err(),
            CostError::NonContiguousRun
        );
    }

    #[test]
    fn feasibility_thresholds() {
        let t = fig_tree();
        assert!(is_feasible(&t, &[nid(3), nid(4)], 6).unwrap());
        assert!(!is_feasible(&t, &[nid(3), nid(4)], 4).unwrap());
        assert!(is_feasible(&t, &[], 0).unwrap());
    }

    #[test]
    fn immersion_rejects_duplicates() {
        let t = fig_tree();
        assert_eq!(
            Immersion::new(&t, [nid(3), nid(3)]).unwrap_err(),
            CostError::AlreadyCovered { id: 3 }
        );
    }

    #[test]
    fn marker_undo_restores_cost() {
        let t = fig_tree();
        let mut marker = PathMarker::new(&t);
        marker.add(nid(3));
        assert_eq!(marker.cost(), 4);
        let mark = marker.trail_len();
        marker.add(nid(4));
        assert_eq!(marker.cost(), 6);
        marker.undo_to(mark);
        assert_eq!(marker.cost(), 4);
        assert!(!marker.is_marked(nid(4)));
        assert!(marker.is_marked(nid(3)));
        marker.reset();
        assert_eq!(marker.cost(), 0);
    }
}
