//! Randomized invariant sweeps across the solver stack, plus property tests
//! for the structural encodings.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treecover::{
    bc_min_distance, bc_min_immersions, brute_force_min_distance, brute_force_min_immersions,
    consecutive_leaf_cost, dftn, dp_makespan_partition, immersion_cost, partitions,
    sweeping_leaves, CoverSolution, ExactError, Immersion, InstanceParams, NodeId, RootedTree,
};

fn verify(t: &RootedTree, p: u64, k: usize, sol: &CoverSolution) {
    let violations = sol.verify(t, &InstanceParams { p, k });
    assert!(violations.is_empty(), "violations: {violations:?}");
}

#[test]
fn generated_trees_satisfy_structural_invariants() {
    for case in 0..1000u64 {
        let n = 1 + (case % 50) as usize;
        let t = RootedTree::random(n, 0xA5A5_0000 + case).unwrap();
        assert_eq!(t.node_count(), n);
        assert_eq!(t.root().get(), 1);
        assert_eq!(t.up_len(t.root()), 0);

        // n-1 parent edges, unit lengths, depths consistent.
        let mut edges = 0;
        for id in 1..=n as u32 {
            let v = NodeId::new(id).unwrap();
            if let Some(pa) = t.parent(v) {
                edges += 1;
                assert_eq!(t.up_len(v), 1);
                assert_eq!(t.depth(v), t.depth(pa) + 1);
            } else {
                assert_eq!(v, t.root());
            }
        }
        assert_eq!(edges, n - 1);

        // Leaves are exactly the childless non-root nodes, each listed once.
        let mut expected: Vec<NodeId> = (1..=n as u32)
            .map(|id| NodeId::new(id).unwrap())
            .filter(|&v| v != t.root() && t.children(v).is_empty())
            .collect();
        let mut listed: Vec<NodeId> = t.leaves().to_vec();
        expected.sort_unstable();
        listed.sort_unstable();
        assert_eq!(listed, expected);
    }
}

#[test]
fn distance_is_a_metric_on_small_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..40 {
        let n = rng.random_range(2..=50);
        let t = RootedTree::random(n, rng.random()).unwrap();
        let ids: Vec<NodeId> = (1..=n as u32).map(|i| NodeId::new(i).unwrap()).collect();
        for &u in &ids {
            assert_eq!(t.distance(u, u).unwrap(), 0);
            for &v in &ids {
                assert_eq!(t.distance(u, v).unwrap(), t.distance(v, u).unwrap());
            }
        }
        for _ in 0..200 {
            let u = ids[rng.random_range(0..n)];
            let v = ids[rng.random_range(0..n)];
            let w = ids[rng.random_range(0..n)];
            assert!(
                t.distance(u, w).unwrap()
                    <= t.distance(u, v).unwrap() + t.distance(v, w).unwrap()
            );
        }
    }
}

#[test]
fn telescoping_run_cost_matches_path_union_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.random_range(2..=40);
        let t = RootedTree::random(n, rng.random()).unwrap();
        let leaves = t.leaves();
        if leaves.is_empty() {
            continue;
        }
        let start = rng.random_range(0..leaves.len());
        let len = rng.random_range(1..=leaves.len() - start);
        let run = &leaves[start..start + len];
        assert_eq!(
            consecutive_leaf_cost(&t, run).unwrap(),
            immersion_cost(&t, run).unwrap()
        );
        checked += 1;
    }
}

#[test]
fn full_leaf_order_cost_equals_whole_tree_cost() {
    for seed in 0..50 {
        let t = RootedTree::random(30, 900 + seed).unwrap();
        assert_eq!(
            consecutive_leaf_cost(&t, t.leaves()).unwrap(),
            immersion_cost(&t, t.leaves()).unwrap()
        );
    }
}

#[test]
fn cost_is_monotone_and_incrementally_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(2..=40);
        let t = RootedTree::random(n, rng.random()).unwrap();
        let mut pool: Vec<NodeId> = t.leaves().to_vec();
        if pool.is_empty() {
            continue;
        }
        // Random insertion order over a random subset.
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.random_range(0..=i));
        }
        pool.truncate(rng.random_range(1..=pool.len()));

        let mut built = Immersion::empty();
        let mut prev_cost = 0;
        for &l in &pool {
            let added = built.added_cost(&t, l).unwrap();
            let mut members = built.leaves().to_vec();
            members.push(l);
            built = Immersion::new(&t, members).unwrap();
            assert_eq!(built.cost(), prev_cost + added, "added_cost mismatch");
            assert!(built.cost() >= prev_cost, "cost not monotone");
            prev_cost = built.cost();
            // Unit-length trees have even costs at every prefix.
            assert_eq!(built.cost() % 2, 0);
        }
        assert_eq!(built.cost(), immersion_cost(&t, built.leaves()).unwrap());
    }
}

#[test]
fn heuristics_verify_on_a_thousand_random_instances() {
    for case in 0..1000u64 {
        let n = 2 + (case % 44) as usize;
        let t = RootedTree::random(n, 0xBEEF_0000 + case).unwrap();
        for extra in [0, 1] {
            let p = 2 * (t.height() + extra);
            let sweep = sweeping_leaves(&t, p).unwrap();
            verify(&t, p, 1, &sweep);
            let deep = dftn(&t, p).unwrap();
            verify(&t, p, 1, &deep);
        }
    }
}

#[test]
fn heuristics_never_beat_the_exact_solver() {
    let mut compared = 0;
    for seed in 0..150u64 {
        let t = RootedTree::random(4 + (seed % 10) as usize, 0xD00D + seed).unwrap();
        let p = 2 * t.height();
        let exact = match brute_force_min_distance(&t, p) {
            Ok(sol) => sol,
            Err(ExactError::LeafCapExceeded { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        verify(&t, p, 1, &exact);
        for heur in [sweeping_leaves(&t, p).unwrap(), dftn(&t, p).unwrap()] {
            assert!(heur.total_distance() >= exact.total_distance());
        }
        compared += 1;
    }
    assert!(compared > 100);
}

#[test]
fn exact_solvers_agree_with_oracles_and_each_other() {
    let mut compared = 0;
    for seed in 0..80u64 {
        let t = RootedTree::random(4 + (seed % 10) as usize, 0xCAFE + seed).unwrap();
        if t.leaves().len() > treecover::DEFAULT_BRUTE_FORCE_LEAF_CAP {
            continue;
        }
        for extra in [0, 1] {
            let p = 2 * (t.height() + extra);
            let bc = bc_min_distance(&t, p).unwrap();
            let oracle = brute_force_min_distance(&t, p).unwrap();
            assert_eq!(bc.total_distance(), oracle.total_distance());
            verify(&t, p, 1, &bc);

            let bc = bc_min_immersions(&t, p).unwrap();
            let oracle = brute_force_min_immersions(&t, p).unwrap();
            assert_eq!(bc.immersion_count(), oracle.immersion_count());
            assert_eq!(bc.total_distance(), oracle.total_distance());
            verify(&t, p, 1, &bc);

            // The minimum count lower-bounds the count of any cover,
            // including the distance-optimal one.
            assert!(
                bc_min_immersions(&t, p).unwrap().immersion_count()
                    <= bc_min_distance(&t, p).unwrap().immersion_count()
            );
        }
        compared += 1;
    }
    assert!(compared > 50);
}

proptest! {
    #[test]
    fn tree_text_roundtrip(n in 1usize..60, seed in any::<u64>()) {
        let t = RootedTree::random(n, seed).unwrap();
        let back = RootedTree::parse(&t.to_text()).unwrap();
        prop_assert_eq!(t, back);
    }

    #[test]
    fn solution_text_roundtrip(n in 2usize..40, seed in any::<u64>(), extra in 0u64..2) {
        let t = RootedTree::random(n, seed).unwrap();
        let p = 2 * (t.height() + extra);
        let sol = dftn(&t, p).unwrap();
        let back = CoverSolution::parse(&sol.to_text()).unwrap();
        prop_assert_eq!(&back, &sol);
        prop_assert!(back.verify(&t, &InstanceParams { p, k: 1 }).is_empty());
    }

    #[test]
    fn partition_enumeration_count_is_bell(m in 0usize..9) {
        let mut count = 0u128;
        partitions::for_each_partition(m, |_| count += 1);
        prop_assert_eq!(count, partitions::bell_number(m));
    }

    #[test]
    fn makespan_sandwich_bounds(
        costs in proptest::collection::vec(1u64..50, 1..9),
        k in 1usize..5,
    ) {
        let schedule = dp_makespan_partition(&costs, k).unwrap();
        let sum: u64 = costs.iter().sum();
        let max = *costs.iter().max().unwrap();
        prop_assert!(schedule.makespan >= max);
        prop_assert!(schedule.makespan <= sum);
        prop_assert!(schedule.makespan >= sum.div_ceil(k as u64));
        if k >= costs.len() {
            prop_assert_eq!(schedule.makespan, max);
        }
        // Non-increasing in k.
        if k > 1 {
            let fewer = dp_makespan_partition(&costs, k - 1).unwrap();
            prop_assert!(fewer.makespan >= schedule.makespan);
        }
    }
}
