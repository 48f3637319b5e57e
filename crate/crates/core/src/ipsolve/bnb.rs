use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use super::lp::{self, LpOutcome, Rational};
use super::{
    check_branch_bounds, extra_rows, make_solution, ExtraConstraint, LexResult, LexStatus,
    SolveError, SolverBackend,
};
use crate::model::{LinearConstraint, Objective, ObjectiveOrder, Problem, Relation};

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;
pub const NODE_LIMIT_ENV: &str = "BIOPT_NODE_LIMIT";

/// Depth-first branch and bound over the exact LP relaxation.
///
/// Branches on the most fractional variable (lowest index on ties) and
/// explores the rounded-down child first. There is no initial incumbent;
/// nodes are pruned when the ceiling of their LP bound cannot beat it, or
/// reaches a strict cap on the objective being minimised.
#[derive(Debug, Clone)]
pub struct BranchAndBoundBackend {
    pub node_limit: u64,
    /// Deadline and the budget it was derived from, for error reporting.
    deadline: Option<(Instant, Duration)>,
}

impl Default for BranchAndBoundBackend {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
            deadline: None,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Counters {
    nodes: u64,
    lps: u64,
}

struct Node {
    bounds: Vec<(i64, i64)>,
    /// Ceiling of the parent's LP value, if any.
    parent_bound: Option<i64>,
}

impl BranchAndBoundBackend {
    pub fn with_node_limit(node_limit: u64) -> Self {
        Self {
            node_limit,
            ..Self::default()
        }
    }

    /// Reads the node limit from `BIOPT_NODE_LIMIT`, falling back to the default
    /// when unset. An unparsable value is reported as an error string.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(NODE_LIMIT_ENV) {
            Ok(v) => v
                .trim()
                .parse::<u64>()
                .map(Self::with_node_limit)
                .map_err(|e| format!("{NODE_LIMIT_ENV}={v:?}: {e}")),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Fails every solve still running `budget` after `start`.
    pub fn with_deadline(mut self, start: Instant, budget: Duration) -> Self {
        self.deadline = Some((start + budget, budget));
        self
    }

    /// Integer minimum of one objective under the base constraints, the
    /// extras, and the narrowed box.
    pub fn solve_single(
        &mut self,
        p: &Problem,
        objective: Objective,
        extras: &[ExtraConstraint],
        branch_bounds: &[(i64, i64)],
    ) -> Result<LexResult, SolveError> {
        check_branch_bounds(p, branch_bounds)?;
        let (cutoff, rest) = split_cutoff(objective, extras);
        let mut rows = p.constraints().to_vec();
        rows.extend(extra_rows(p, &rest)?);
        let mut counters = Counters::default();
        let best = self.minimise(
            p.objective(objective.index()),
            &rows,
            branch_bounds.to_vec(),
            cutoff,
            &mut counters,
        )?;
        let status = match best {
            Some((_, x)) => LexStatus::Optimal(make_solution(p, x)?),
            None => LexStatus::Infeasible,
        };
        Ok(LexResult {
            status,
            node_count: counters.nodes,
            lp_count: counters.lps,
        })
    }

    fn minimise(
        &self,
        objective: &[i64],
        rows: &[LinearConstraint],
        root: Vec<(i64, i64)>,
        cutoff: Option<i64>,
        counters: &mut Counters,
    ) -> Result<Option<(i64, Vec<i64>)>, SolveError> {
        let mut incumbent: Option<(i64, Vec<i64>)> = None;
        let mut stack = vec![Node {
            bounds: root,
            parent_bound: None,
        }];
        while let Some(node) = stack.pop() {
            counters.nodes += 1;
            if counters.nodes > self.node_limit {
                return Err(SolveError::NodeLimit(self.node_limit));
            }
            if let Some((deadline, budget)) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(SolveError::TimeLimit(budget));
                }
            }
            let beaten = |bound: i64, inc: &Option<(i64, Vec<i64>)>| {
                cutoff.is_some_and(|c| bound >= c) || inc.as_ref().is_some_and(|(v, _)| bound >= *v)
            };
            if node.parent_bound.is_some_and(|b| beaten(b, &incumbent)) {
                continue;
            }

            counters.lps += 1;
            let (value, point) = match lp::solve_lp(rows, objective, &node.bounds)? {
                LpOutcome::Optimal { value, point } => (value, point),
                LpOutcome::Infeasible => continue,
                LpOutcome::Unbounded => {
                    unreachable!("LP over a finite box cannot be unbounded")
                }
            };
            let bound = to_i64(value.ceil())?;
            if beaten(bound, &incumbent) {
                continue;
            }

            match most_fractional(&point) {
                None => {
                    let x = point
                        .iter()
                        .map(|v| to_i64(*v))
                        .collect::<Result<Vec<_>, _>>()?;
                    // integral LP optimum: its value is an integer, equal to `bound`
                    incumbent = Some((bound, x));
                }
                Some(j) => {
                    let down = value_floor(&point[j])?;
                    let mut up_bounds = node.bounds.clone();
                    up_bounds[j].0 = down + 1;
                    let mut down_bounds = node.bounds;
                    down_bounds[j].1 = down;
                    stack.push(Node {
                        bounds: up_bounds,
                        parent_bound: Some(bound),
                    });
                    stack.push(Node {
                        bounds: down_bounds,
                        parent_bound: Some(bound),
                    });
                }
            }
        }
        Ok(incumbent)
    }
}

impl SolverBackend for BranchAndBoundBackend {
    /// Optimises the first objective, fixes it with an equality, then
    /// optimises the second. Caps on the first objective act as a pruning
    /// cutoff in stage one instead of LP rows; the fixing equality implies
    /// them in stage two.
    fn solve_lex(
        &mut self,
        p: &Problem,
        order: ObjectiveOrder,
        extras: &[ExtraConstraint],
    ) -> Result<LexResult, SolveError> {
        let (cutoff, rest) = split_cutoff(order.first(), extras);
        let mut rows = p.constraints().to_vec();
        rows.extend(extra_rows(p, &rest)?);
        let mut counters = Counters::default();
        let first = p.objective(order.first().index());
        let Some((v, _)) = self.minimise(first, &rows, p.bounds().to_vec(), cutoff, &mut counters)? else {
            return Ok(LexResult {
                status: LexStatus::Infeasible,
                node_count: counters.nodes,
                lp_count: counters.lps,
            });
        };
        rows.push(LinearConstraint::new(first.to_vec(), Relation::Eq, v));
        let second = p.objective(order.second().index());
        let (_, x) = self
            .minimise(second, &rows, p.bounds().to_vec(), None, &mut counters)?
            .expect("the stage-one optimum satisfies the fixing equality");
        Ok(LexResult {
            status: LexStatus::Optimal(make_solution(p, x)?),
            node_count: counters.nodes,
            lp_count: counters.lps,
        })
    }
}

/// Separates caps on `objective` (folded into one strict cutoff) from the
/// constraints that must stay LP rows.
fn split_cutoff(
    objective: Objective,
    extras: &[ExtraConstraint],
) -> (Option<i64>, Vec<ExtraConstraint>) {
    let cutoff = extras
        .iter()
        .filter(|e| e.objective == objective)
        .map(|e| e.strict_upper)
        .min();
    let rest = extras
        .iter()
        .filter(|e| e.objective != objective)
        .copied()
        .collect();
    (cutoff, rest)
}

fn to_i64(v: Rational) -> Result<i64, SolveError> {
    debug_assert!(v.is_integer());
    i64::try_from(v.to_integer()).map_err(|_| SolveError::Overflow)
}

fn value_floor(v: &Rational) -> Result<i64, SolveError> {
    to_i64(v.floor())
}

/// Index of the variable whose fractional part is closest to one half.
fn most_fractional(point: &[Rational]) -> Option<usize> {
    let half = Rational::new(1, 2);
    let mut best: Option<(Rational, usize)> = None;
    for (j, v) in point.iter().enumerate() {
        let frac = v - v.floor();
        if frac.is_zero() {
            continue;
        }
        let distance = (frac - half).abs();
        if best.as_ref().is_none_or(|(d, _)| distance < *d) {
            best = Some((distance, j));
        }
    }
    best.map(|(_, j)| j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OutcomeVector, Sense};

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
    fn single_objective_examples() {
        let p = t1();
        let mut b = BranchAndBoundBackend::default();
        let r = b.solve_single(&p, Objective::F1, &[], p.bounds()).unwrap();
        assert_eq!(r.solution().unwrap().outcome.f1, 0);
        assert!(r.node_count >= 1 && r.lp_count >= 1);

        let k = k1();
        let r = b.solve_single(&k, Objective::F1, &[], k.bounds()).unwrap();
        let best = r.solution().unwrap();
        assert_eq!(k.to_user_outcome(best.outcome).f1, 4);
        assert_eq!(best.assignment, vec![0, 0, 1]);
    }

    #[test]
    fn zero_capacity_with_cover_is_infeasible() {
        let p = Problem::new(
            [vec![1, 1], vec![1, 1]],
            [Sense::Max, Sense::Max],
            vec![
                LinearConstraint::new(vec![2, 3], Relation::Le, 0),
                LinearConstraint::new(vec![1, 1], Relation::Ge, 1),
            ],
            vec![(0, 1); 2],
        )
        .unwrap();
        let r = BranchAndBoundBackend::default()
            .solve_single(&p, Objective::F1, &[], p.bounds())
            .unwrap();
        assert_eq!(r.status, LexStatus::Infeasible);
    }

    #[test]
    fn lex_examples() {
        let p = t1();
        let mut b = BranchAndBoundBackend::default();
        let lex = |b: &mut BranchAndBoundBackend, order, extras: &[ExtraConstraint]| {
            b.solve_lex(&p, order, extras).unwrap().solution().unwrap().outcome
        };
        assert_eq!(lex(&mut b, ObjectiveOrder::F1F2, &[]), OutcomeVector::new(0, 3));
        assert_eq!(lex(&mut b, ObjectiveOrder::F2F1, &[]), OutcomeVector::new(3, 0));
        assert_eq!(
            lex(&mut b, ObjectiveOrder::F1F2, &[ExtraConstraint::new(Objective::F2, 3)]),
            OutcomeVector::new(1, 2)
        );
    }

    #[test]
    fn first_objective_caps_match_explicit_rows() {
        let k = k1();
        let mut b = BranchAndBoundBackend::default();
        for order in [ObjectiveOrder::F1F2, ObjectiveOrder::F2F1] {
            for cap in -8..=1 {
                let extra = [ExtraConstraint::new(order.first(), cap)];
                let outcome = |r: LexResult| r.solution().map(|x| x.outcome);
                let got = outcome(b.solve_lex(&k, order, &extra).unwrap());
                let with_row = k.with_constraints(extra_rows(&k, &extra).unwrap()).unwrap();
                let want = outcome(b.solve_lex(&with_row, order, &[]).unwrap());
                assert_eq!(got, want, "order {order} cap {cap}");
            }
        }
    }

    #[test]
    fn node_limit_is_a_hard_error() {
        // max x1+..+x4 s.t. 2x1+..+2x4 <= 5 needs branching
        let p = Problem::new(
            [vec![1; 4], vec![0; 4]],
            [Sense::Max, Sense::Min],
            vec![LinearConstraint::new(vec![2; 4], Relation::Le, 5)],
            vec![(0, 1); 4],
        )
        .unwrap();
        let mut b = BranchAndBoundBackend::with_node_limit(1);
        assert_eq!(
            b.solve_single(&p, Objective::F1, &[], p.bounds()),
            Err(SolveError::NodeLimit(1))
        );
        let r = BranchAndBoundBackend::default()
            .solve_single(&p, Objective::F1, &[], p.bounds())
            .unwrap();
        assert_eq!(r.solution().unwrap().outcome.f1, -2);
        assert!(r.node_count > 1);
        assert!(r.lp_count <= r.node_count);
    }

    #[test]
    fn expired_deadline_is_reported() {
        let p = t1();
        let mut b = BranchAndBoundBackend::default()
            .with_deadline(Instant::now() - Duration::from_secs(1), Duration::from_millis(5));
        assert_eq!(
            b.solve_lex(&p, ObjectiveOrder::F1F2, &[]),
            Err(SolveError::TimeLimit(Duration::from_millis(5)))
        );
    }

    #[test]
    fn branching_picks_most_fractional_lowest_index() {
        let q = |n, d| Rational::new(n, d);
        assert_eq!(most_fractional(&[q(1, 1), q(1, 3), q(2, 3)]), Some(1));
        assert_eq!(most_fractional(&[q(1, 4), q(5, 2), q(1, 2)]), Some(1));
        assert_eq!(most_fractional(&[q(-1, 2), q(0, 1)]), Some(0));
        assert_eq!(most_fractional(&[q(2, 1)]), None);
    }
}
