#![allow(dead_code)]

use biopt_core::{LinearConstraint, Problem, Relation, Sense};
use proptest::prelude::*;

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

fn sense() -> impl Strategy<Value = Sense> {
    prop_oneof![Just(Sense::Min), Just(Sense::Max)]
}

/// Problems with at most 4 variables in small boxes, so the lattice stays
/// tiny and infeasible instances show up regularly.
pub fn tiny_problem() -> impl Strategy<Value = Problem> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let bounds = prop::collection::vec((-2i64..=1, 0i64..=2), n)
                .prop_map(|v| v.into_iter().map(|(lo, w)| (lo, lo + w)).collect::<Vec<_>>());
            let objective = || prop::collection::vec(-5i64..=5, n);
            let row = (prop::collection::vec(-3i64..=3, n), relation(), -4i64..=4)
                .prop_map(|(a, r, b)| LinearConstraint::new(a, r, b));
            (
                objective(),
                objective(),
                [sense(), sense()],
                prop::collection::vec(row, 0..=2),
                bounds,
            )
        })
        .prop_map(|(c1, c2, senses, rows, bounds)| {
            Problem::new([c1, c2], senses, rows, bounds).expect("well-formed by construction")
        })
}

/// 0/1 knapsack-style problems with conflicting objectives and a large
/// enough front to exercise the parallel algorithms.
pub fn small_knapsack() -> impl Strategy<Value = Problem> {
    (3usize..=7)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1i64..=20, n),
                prop::collection::vec(1i64..=20, n),
                prop::collection::vec(1i64..=20, n),
            )
        })
        .prop_map(|(w, p1, p2)| {
            let n = w.len();
            let cap = w.iter().sum::<i64>() / 2;
            Problem::new(
                [p1, p2],
                [Sense::Max, Sense::Max],
                vec![LinearConstraint::new(w, Relation::Le, cap)],
                vec![(0, 1); n],
            )
            .unwrap()
        })
}
