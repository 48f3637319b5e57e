use std::cmp::Ordering;

use super::{extra_rows, make_solution, ExtraConstraint, LexResult, LexStatus, SolveError, SolverBackend};
use crate::lattice::for_each_feasible;
use crate::model::{ObjectiveOrder, OutcomeVector, Problem};

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Lexicographic oracle by exhaustive lattice scan. The first point found in
/// row-major order wins ties.
#[derive(Debug, Clone)]
pub struct EnumerationBackend {
    pub max_points: u128,
}

impl Default for EnumerationBackend {
    fn default() -> Self {
        Self {
            max_points: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

impl SolverBackend for EnumerationBackend {
    fn solve_lex(
        &mut self,
        p: &Problem,
        order: ObjectiveOrder,
        extras: &[ExtraConstraint],
    ) -> Result<LexResult, SolveError> {
        let rows = extra_rows(p, extras)?;
        let mut best: Option<(OutcomeVector, Vec<i64>)> = None;
        let mut scanned = 0u64;
        for_each_feasible(p, &rows, self.max_points, |x, outcome| {
            scanned += 1;
            let better = best
                .as_ref()
                .is_none_or(|(b, _)| order.compare(outcome, *b) == Ordering::Less);
            if better {
                best = Some((outcome, x.to_vec()));
            }
        })?;
        let status = match best {
            Some((_, x)) => LexStatus::Optimal(make_solution(p, x)?),
            None => LexStatus::Infeasible,
        };
        Ok(LexResult {
            status,
            node_count: scanned,
            lp_count: 0,
        })
    }
}
