//! Single-objective and lexicographic integer-program oracles.
//!
//! [`BranchAndBoundBackend`] is the working solver; [`EnumerationBackend`]
//! scans the whole lattice and exists to cross-check it on small boxes.

mod bnb;
mod enumerate;
pub mod lp;

use std::time::Duration;

use thiserror::Error;

use crate::model::{
    evaluate, LinearConstraint, ModelError, Objective, ObjectiveOrder, Problem, Relation, Solution,
};

pub use bnb::{BranchAndBoundBackend, DEFAULT_NODE_LIMIT, NODE_LIMIT_ENV};
pub use enumerate::{EnumerationBackend, DEFAULT_ENUMERATION_LIMIT};
pub use lp::{LpOutcome, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("branch-and-bound node limit of {0} exceeded")]
    NodeLimit(u64),
    #[error("time limit of {0:?} exceeded")]
    TimeLimit(Duration),
    #[error("lattice of {points} points exceeds the enumeration limit of {limit}")]
    EnumerationLimit { points: u128, limit: u128 },
    #[error("branch bounds for variable {var} leave the original box")]
    BranchBoundsOutsideBox { var: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `f_objective ≤ strict_upper − 1`, i.e. the strict cap `f < strict_upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtraConstraint {
    pub objective: Objective,
    pub strict_upper: i64,
}

impl ExtraConstraint {
    pub fn new(objective: Objective, strict_upper: i64) -> Self {
        Self {
            objective,
            strict_upper,
        }
    }

    /// `None` stands for an infinite bound, which adds no constraint.
    pub fn from_bound(objective: Objective, bound: Option<i64>) -> Option<Self> {
        bound.map(|l| Self::new(objective, l))
    }

    pub fn to_row(self, p: &Problem) -> Result<LinearConstraint, SolveError> {
        let rhs = self
            .strict_upper
            .checked_sub(1)
            .ok_or(SolveError::Overflow)?;
        Ok(LinearConstraint::new(
            p.objective(self.objective.index()).to_vec(),
            Relation::Le,
            rhs,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexStatus {
    Optimal(Solution),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexResult {
    pub status: LexStatus,
    pub node_count: u64,
    pub lp_count: u64,
}

impl LexResult {
    pub fn solution(&self) -> Option<&Solution> {
        match &self.status {
            LexStatus::Optimal(s) => Some(s),
            LexStatus::Infeasible => None,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self.status {
            LexStatus::Optimal(s) => Some(s),
            LexStatus::Infeasible => None,
        }
    }
}

/// A lexicographic CLBOIP oracle. One instance belongs to one worker.
pub trait SolverBackend {
    fn solve_lex(
        &mut self,
        problem: &Problem,
        order: ObjectiveOrder,
        extras: &[ExtraConstraint],
    ) -> Result<LexResult, SolveError>;
}

impl<B: SolverBackend + ?Sized> SolverBackend for Box<B> {
    fn solve_lex(
        &mut self,
        problem: &Problem,
        order: ObjectiveOrder,
        extras: &[ExtraConstraint],
    ) -> Result<LexResult, SolveError> {
        (**self).solve_lex(problem, order, extras)
    }
}

pub(crate) fn extra_rows(
    p: &Problem,
    extras: &[ExtraConstraint],
) -> Result<Vec<LinearConstraint>, SolveError> {
    extras.iter().map(|e| e.to_row(p)).collect()
}

pub(crate) fn make_solution(p: &Problem, assignment: Vec<i64>) -> Result<Solution, SolveError> {
    let outcome = evaluate(p, &assignment)?;
    Ok(Solution {
        assignment,
        outcome,
    })
}

/// LP relaxation of `p` with objective `objective`, the extra cuts, and the
/// box narrowed to `branch_bounds`.
pub fn solve_lp_relaxation(
    p: &Problem,
    objective: &[i64],
    extras: &[ExtraConstraint],
    branch_bounds: &[(i64, i64)],
) -> Result<LpOutcome, SolveError> {
    check_branch_bounds(p, branch_bounds)?;
    let mut rows = p.constraints().to_vec();
    rows.extend(extra_rows(p, extras)?);
    lp::solve_lp(&rows, objective, branch_bounds)
}

pub(crate) fn check_branch_bounds(
    p: &Problem,
    branch_bounds: &[(i64, i64)],
) -> Result<(), SolveError> {
    if branch_bounds.len() != p.num_vars() {
        return Err(SolveError::DimensionMismatch {
            expected: p.num_vars(),
            found: branch_bounds.len(),
        });
    }
    for (var, (&(lo, hi), &(olo, ohi))) in branch_bounds.iter().zip(p.bounds()).enumerate() {
        if lo < olo || hi > ohi {
            return Err(SolveError::BranchBoundsOutsideBox { var });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OutcomeVector, Sense};

    pub(crate) fn t1() -> Problem {
        Problem::new(
            [vec![1, 0], vec![0, 1]],
            [Sense::Min, Sense::Min],
            vec![LinearConstraint::new(vec![1, 1], Relation::Ge, 3)],
            vec![(0, 3), (0, 3)],
        )
        .unwrap()
    }

    #[test]
    fn relaxation_examples() {
        let p = t1();
        let out = solve_lp_relaxation(&p, p.objective(0), &[], p.bounds()).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: Rational::from_integer(0),
                point: vec![Rational::from_integer(0), Rational::from_integer(3)],
            }
        );
        let cut = ExtraConstraint::new(Objective::F2, 2);
        let out = solve_lp_relaxation(&p, p.objective(0), &[cut], p.bounds()).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: Rational::from_integer(2),
                point: vec![Rational::from_integer(2), Rational::from_integer(1)],
            }
        );
    }

    #[test]
    fn relaxation_rejects_widened_bounds() {
        let p = t1();
        assert_eq!(
            solve_lp_relaxation(&p, p.objective(0), &[], &[(0, 4), (0, 3)]),
            Err(SolveError::BranchBoundsOutsideBox { var: 0 })
        );
    }

    #[test]
    fn strict_bound_at_minimum_overflows() {
        let p = t1();
        assert_eq!(
            ExtraConstraint::new(Objective::F1, i64::MIN).to_row(&p),
            Err(SolveError::Overflow)
        );
    }

    #[test]
    fn backends_agree_on_t1() {
        let p = t1();
        let mut bnb = BranchAndBoundBackend::default();
        let mut en = EnumerationBackend::default();
        let cases = [
            (ObjectiveOrder::F1F2, vec![], Some(OutcomeVector::new(0, 3))),
            (ObjectiveOrder::F2F1, vec![], Some(OutcomeVector::new(3, 0))),
            (
                ObjectiveOrder::F1F2,
                vec![ExtraConstraint::new(Objective::F2, 3)],
                Some(OutcomeVector::new(1, 2)),
            ),
            (
                ObjectiveOrder::F1F2,
                vec![ExtraConstraint::new(Objective::F2, 0)],
                None,
            ),
        ];
        for (order, extras, expected) in cases {
            for backend in [&mut bnb as &mut dyn SolverBackend, &mut en] {
                let got = backend.solve_lex(&p, order, &extras).unwrap();
                assert_eq!(got.solution().map(|s| s.outcome), expected);
            }
        }
    }
}
