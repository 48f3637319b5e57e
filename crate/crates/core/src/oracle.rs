//! Brute-force ground truth for small instances.

use crate::ipsolve::{SolveError, DEFAULT_ENUMERATION_LIMIT};
use crate::lattice::for_each_feasible;
use crate::model::{pareto_filter, ParetoSet, Problem, Solution};

/// Cap on the number of lattice points a brute-force scan may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_points: u128,
}

impl EnumerationBudget {
    /// `None` for a zero budget.
    pub fn new(max_points: u128) -> Option<Self> {
        (max_points > 0).then_some(Self { max_points })
    }

    pub fn max_points(self) -> u128 {
        self.max_points
    }

    pub fn admits(self, p: &Problem) -> bool {
        p.lattice_size() <= self.max_points
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_points: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

/// Exact non-dominated set by scanning every lattice point of the box.
/// Representatives are the first feasible point per outcome in row-major
/// order. Fails with [`SolveError::EnumerationLimit`] instead of sampling.
pub fn brute_force_pareto(p: &Problem, budget: EnumerationBudget) -> Result<ParetoSet, SolveError> {
    // Keep only outcomes that could still be non-dominated as we go, so
    // memory stays proportional to the front, not the feasible set.
    let mut front = Vec::new();
    for_each_feasible(p, &[], budget.max_points, |x, outcome| {
        if front
            .iter()
            .any(|s: &Solution| s.outcome == outcome || crate::model::dominates(s.outcome, outcome))
        {
            return;
        }
        front.retain(|s: &Solution| !crate::model::dominates(outcome, s.outcome));
        front.push(Solution {
            assignment: x.to_vec(),
            outcome,
        });
    })?;
    Ok(pareto_filter(front))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dominates, LinearConstraint, OutcomeVector, Relation, Sense};
    use crate::lattice::for_each_feasible;

    fn t1() -> Problem {
        Problem::new(
            [vec![1, 0], vec![0, 1]],
            [Sense::Min, Sense::Min],
            vec![LinearConstraint::new(vec![1, 1], Relation::Ge, 3)],
            vec![(0, 3), (0, 3)],
        )
        .unwrap()
    }

    fn k1() -> Problem {
        Problem::new(
            [vec![3, 1, 4], vec![1, 4, 2]],
            [Sense::Max, Sense::Max],
            vec![LinearConstraint::new(vec![2, 3, 4], Relation::Le, 4)],
            vec![(0, 1); 3],
        )
        .unwrap()
    }

    #[test]
    fn t1_front() {
        let f = brute_force_pareto(&t1(), EnumerationBudget::default()).unwrap();
        let o = OutcomeVector::new;
        assert_eq!(f.outcomes(), vec![o(0, 3), o(1, 2), o(2, 1), o(3, 0)]);
        assert!(f.is_staircase());
    }

    #[test]
    fn k1_front_in_user_sense() {
        let p = k1();
        let f = brute_force_pareto(&p, EnumerationBudget::default()).unwrap();
        let user: Vec<_> = f.outcomes().into_iter().map(|o| p.to_user_outcome(o)).collect();
        assert_eq!(user, vec![OutcomeVector::new(4, 2), OutcomeVector::new(1, 4)]);
    }

    #[test]
    fn empty_region() {
        let p = Problem::new(
            [vec![1], vec![1]],
            [Sense::Min; 2],
            vec![LinearConstraint::new(vec![1], Relation::Ge, 5)],
            vec![(0, 3)],
        )
        .unwrap();
        assert!(brute_force_pareto(&p, EnumerationBudget::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let budget = EnumerationBudget::new(15).unwrap();
        assert_eq!(
            brute_force_pareto(&t1(), budget),
            Err(SolveError::EnumerationLimit {
                points: 16,
                limit: 15
            })
        );
        assert!(EnumerationBudget::new(0).is_none());
    }

    #[test]
    fn representative_is_first_in_row_major_order() {
        // both objectives ignore x2, so (x1=0,x2=0) represents outcome (0,0)
        let p = Problem::new(
            [vec![1, 0], vec![-1, 0]],
            [Sense::Min; 2],
            vec![],
            vec![(0, 1), (0, 2)],
        )
        .unwrap();
        let f = brute_force_pareto(&p, EnumerationBudget::default()).unwrap();
        assert_eq!(f.solutions()[0].assignment, vec![0, 0]);
        assert_eq!(f.solutions()[1].assignment, vec![1, 0]);
    }

    #[test]
    fn every_feasible_point_is_covered() {
        let p = Problem::new(
            [vec![2, -1, 3], vec![-1, 2, -2]],
            [Sense::Min, Sense::Max],
            vec![
                LinearConstraint::new(vec![1, 1, 1], Relation::Le, 4),
                LinearConstraint::new(vec![1, -1, 0], Relation::Ge, -1),
            ],
            vec![(0, 2), (-1, 2), (0, 2)],
        )
        .unwrap();
        let front = brute_force_pareto(&p, EnumerationBudget::default()).unwrap();
        assert!(front.is_staircase());
        let mut count = 0;
        for_each_feasible(&p, &[], u128::MAX, |x, y| {
            count += 1;
            assert!(p.is_feasible(x).unwrap());
            assert!(front
                .iter()
                .any(|s| s.outcome == y || dominates(s.outcome, y)));
        })
        .unwrap();
        assert!(count > 0);
    }
}
