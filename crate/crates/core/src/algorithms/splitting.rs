use std::thread;
use std::time::Instant;

use super::{AlgorithmError, RunStats, WorkerStats};
use crate::ipsolve::{ExtraConstraint, SolverBackend};
use crate::model::{pareto_filter, Objective, ObjectiveOrder, ParetoSet, Problem, Solution};

/// Inclusive integer range of f1 values; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct F1Interval {
    pub lo: i64,
    pub hi: i64,
}

impl F1Interval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub intervals: Vec<F1Interval>,
    /// Optima of orders (1,2) and (2,1); `None` when the problem is infeasible.
    pub endpoints: Option<(Solution, Solution)>,
}

/// Cuts `[f1_min, f1_max]` into `t` consecutive pieces of width
/// `max(1, ⌊(f1_max − f1_min + 1) / t⌋)`; the last piece absorbs the
/// remainder, and pieces starting past `f1_max` are empty.
pub fn partition_range(f1_min: i64, f1_max: i64, t: usize) -> Vec<F1Interval> {
    assert!(t >= 1, "need at least one piece");
    assert!(f1_min <= f1_max, "empty range");
    let span = f1_max as i128 - f1_min as i128 + 1;
    let width = (span / t as i128).max(1);
    (0..t)
        .map(|i| {
            let lo = f1_min as i128 + i as i128 * width;
            let hi = if i + 1 == t {
                f1_max as i128
            } else {
                (lo + width - 1).min(f1_max as i128)
            };
            if lo > f1_max as i128 {
                F1Interval::empty_after(f1_max)
            } else {
                F1Interval {
                    lo: lo as i64,
                    hi: hi as i64,
                }
            }
        })
        .collect()
}

impl F1Interval {
    /// Canonical empty piece just past `at`.
    fn empty_after(at: i64) -> Self {
        match at.checked_add(1) {
            Some(lo) => F1Interval { lo, hi: at },
            None => F1Interval { lo: at, hi: at - 1 },
        }
    }
}

/// Finds the f1 range with the (1,2) and (2,1) optima and partitions it.
pub fn split_range<B: SolverBackend + ?Sized>(
    p: &Problem,
    backend: &mut B,
    t: usize,
) -> Result<SplitPlan, AlgorithmError> {
    let mut stats = WorkerStats::default();
    let low = solve_endpoint(p, backend, ObjectiveOrder::F1F2, &mut stats)?;
    let Some(low) = low else {
        return Ok(SplitPlan {
            intervals: Vec::new(),
            endpoints: None,
        });
    };
    let high = solve_endpoint(p, backend, ObjectiveOrder::F2F1, &mut stats)?
        .expect("(2,1) is feasible whenever (1,2) is");
    Ok(plan(low, high, t))
}

fn plan(low: Solution, high: Solution, t: usize) -> SplitPlan {
    SplitPlan {
        intervals: partition_range(low.outcome.f1, high.outcome.f1, t),
        endpoints: Some((low, high)),
    }
}

fn solve_endpoint<B: SolverBackend + ?Sized>(
    p: &Problem,
    backend: &mut B,
    order: ObjectiveOrder,
    stats: &mut WorkerStats,
) -> Result<Option<Solution>, AlgorithmError> {
    let r = backend.solve_lex(p, order, &[])?;
    stats.record(r.solution().is_some(), r.node_count);
    Ok(r.into_solution())
}

/// Range-splitting enumeration with one worker per backend.
///
/// The endpoint solves run concurrently on the first two workers. Each worker
/// then walks its f1 slice from the top under order (2,1): a strict cap on
/// f1 starts just above the slice and follows the points found, and the walk
/// stops at the first point with f1 at or below the slice's lower end. The
/// union goes through a full [`pareto_filter`].
pub fn splitting_boip<B: SolverBackend + Send>(
    p: &Problem,
    backends: &mut [B],
) -> Result<(ParetoSet, RunStats), AlgorithmError> {
    let t = backends.len();
    if t == 0 {
        return Err(AlgorithmError::NoWorkers("splitting"));
    }
    let mut stats: Vec<WorkerStats> = vec![WorkerStats::default(); t];

    let started = Instant::now();
    let (low, high) = match backends {
        [only] => {
            let low = solve_endpoint(p, only, ObjectiveOrder::F1F2, &mut stats[0])?;
            let high = match low {
                Some(_) => solve_endpoint(p, only, ObjectiveOrder::F2F1, &mut stats[0])?,
                None => None,
            };
            (low, high)
        }
        [a, b, ..] => {
            let (s0, rest) = stats.split_at_mut(1);
            let (low, high) = thread::scope(|scope| {
                let lo = scope.spawn(|| solve_endpoint(p, a, ObjectiveOrder::F1F2, &mut s0[0]));
                let high = solve_endpoint(p, b, ObjectiveOrder::F2F1, &mut rest[0]);
                (join(lo), high)
            });
            (low?, high?)
        }
        [] => unreachable!(),
    };
    let endpoint_time = started.elapsed();
    let (Some(low), Some(high)) = (low, high) else {
        for s in &mut stats {
            s.elapsed = endpoint_time;
        }
        return Ok((ParetoSet::new(), RunStats::from_workers(stats, 0)));
    };

    let f1_max = high.outcome.f1;
    let SplitPlan { intervals, .. } = plan(low.clone(), high.clone(), t);
    let slices = thread::scope(|scope| {
        let handles: Vec<_> = backends
            .iter_mut()
            .zip(stats.iter_mut())
            .zip(&intervals)
            .map(|((backend, st), &interval)| {
                scope.spawn(move || -> Result<Vec<Solution>, AlgorithmError> {
                    let start = Instant::now();
                    let out = if interval.is_empty() {
                        Vec::new()
                    } else {
                        // the top slice already has its first point: the (2,1) optimum
                        let cap = if interval.hi == f1_max {
                            Some(f1_max)
                        } else {
                            interval.hi.checked_add(1)
                        };
                        walk_slice(p, backend, interval, cap, st)?
                    };
                    st.elapsed = endpoint_time + start.elapsed();
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(join).collect::<Vec<_>>()
    });

    let mut all = vec![low, high];
    for s in slices {
        all.extend(s?);
    }
    let front = pareto_filter(all);
    let size = front.len();
    Ok((front, RunStats::from_workers(stats, size)))
}

/// Order (2,1) walk with a strict f1 cap, descending until a point at or
/// below `interval.lo` turns up or the region runs dry.
fn walk_slice<B: SolverBackend + ?Sized>(
    p: &Problem,
    backend: &mut B,
    interval: F1Interval,
    mut cap: Option<i64>,
    stats: &mut WorkerStats,
) -> Result<Vec<Solution>, AlgorithmError> {
    let mut found = Vec::new();
    while cap.is_none_or(|c| c > interval.lo) {
        let extras: Vec<_> = ExtraConstraint::from_bound(Objective::F1, cap).into_iter().collect();
        let result = backend.solve_lex(p, ObjectiveOrder::F2F1, &extras)?;
        stats.record(result.solution().is_some(), result.node_count);
        let Some(x) = result.into_solution() else {
            break;
        };
        cap = Some(x.outcome.f1);
        found.push(x);
    }
    Ok(found)
}

pub(super) fn join<T>(h: thread::ScopedJoinHandle<'_, T>) -> T {
    h.join().unwrap_or_else(|e| std::panic::resume_unwind(e))
}
