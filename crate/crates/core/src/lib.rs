//! Covering rooted trees with energy-bounded closed walks.
//!
//! A tree rooted at a supply station must be inspected by agents that start
//! at the root and can travel at most `p` edge-length units before
//! returning. Each such round trip (an *immersion*) is identified with the
//! set of leaves it reaches: the walk traverses the union of the
//! root-to-leaf paths twice, so its cost is twice the union's total edge
//! length, and a family of immersions covers the tree exactly when every
//! leaf is reached. This crate provides:
//!
//! - the tree model, file format, and seeded random instance generator
//!   ([`tree`]);
//! - the leaf-set cost calculus and solution verifier ([`immersion`],
//!   [`solution`]);
//! - two fast covering heuristics ([`heuristics`]);
//! - exact minimum-distance and minimum-count solvers with brute-force
//!   oracles ([`exact`], [`partitions`]);
//! - exact makespan scheduling over `k` agents and the combined
//!   heuristic-cover-plus-exact-schedule pipeline ([`scheduling`]).
//!
//! Trees are immutable once built; every solver here is a pure function of
//! its inputs, so concurrent calls may share a tree freely.

pub mod exact;
pub mod heuristics;
pub mod immersion;
pub mod partitions;
pub mod scheduling;
pub mod solution;
pub mod tree;

pub use exact::{
    bc_min_distance, bc_min_distance_with, bc_min_immersions, bc_min_immersions_with,
    brute_force_min_distance, brute_force_min_distance_capped, brute_force_min_immersions,
    brute_force_min_immersions_capped, ExactError, SearchOptions, SearchStats,
    DEFAULT_BRUTE_FORCE_LEAF_CAP,
};
pub use heuristics::{dftn, sweeping_leaves};
pub use immersion::{consecutive_leaf_cost, immersion_cost, is_feasible, CostError, Immersion};
pub use scheduling::{
    brute_force_makespan, brute_force_makespan_capped, brute_force_min_time,
    brute_force_min_time_capped, dp_makespan_partition, min_time_heuristic, SchedError, Schedule,
    DEFAULT_ASSIGNMENT_CAP, DEFAULT_MIN_TIME_LEAF_CAP,
};
pub use solution::{CoverSolution, SolutionParseError, Violation};
pub use tree::{
    validate_autonomy, InstanceError, InstanceParams, NodeId, ParseError, RootedTree, TreeError,
};
