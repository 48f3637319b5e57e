//! Pareto enumeration drivers.
//!
//! All three walk the non-dominated staircase with lexicographic solves under
//! a strict cap on one objective that tightens after every point found:
//!
//! * [`sequential_boip`]: one worker, order (1,2), cap on f2.
//! * [`splitting_boip`]: the f1 range is cut into equal slices, each worker
//!   walks its slice, and the union is filtered globally.
//! * [`meeting_boip`]: two workers walk from opposite ends under opposite
//!   orders and read each other's cap from a [`SharedBounds`] store, so they
//!   stop where they meet.

mod meeting;
mod splitting;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ipsolve::{ExtraConstraint, SolveError, SolverBackend};
use crate::model::{
    ModelError, Objective, ObjectiveOrder, OutcomeVector, ParetoSet, Problem, Solution,
};

pub use meeting::{
    meeting_boip, meeting_boip_with, BoundWrite, Immediate, MeetingRun, RandomDelays, Schedule,
    SharedBounds, StoreAccess,
};
pub use splitting::{partition_range, split_range, splitting_boip, F1Interval, SplitPlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bound on f{objective} may only decrease: current {current}, attempted {attempted}")]
    BoundIncrease {
        objective: usize,
        current: i64,
        attempted: i64,
    },
    #[error("collected points do not form a non-dominated staircase")]
    NotAStaircase,
    #[error("{0} needs at least one worker backend")]
    NoWorkers(&'static str),
}

/// Per-worker counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorkerStats {
    pub ip_solves: u64,
    pub feasible_solves: u64,
    pub infeasible_solves: u64,
    /// Branch-and-bound nodes (or scanned points) over all solves.
    pub nodes: u64,
    pub elapsed: Duration,
}

impl WorkerStats {
    fn record(&mut self, feasible: bool, nodes: u64) {
        self.ip_solves += 1;
        self.nodes += nodes;
        if feasible {
            self.feasible_solves += 1;
        } else {
            self.infeasible_solves += 1;
        }
    }

    fn absorb(&mut self, other: &WorkerStats) {
        self.ip_solves += other.ip_solves;
        self.feasible_solves += other.feasible_solves;
        self.infeasible_solves += other.infeasible_solves;
        self.nodes += other.nodes;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub ip_solves: u64,
    pub feasible_solves: u64,
    pub infeasible_solves: u64,
    pub nodes: u64,
    pub workers: Vec<WorkerStats>,
    pub pareto_size: usize,
}

impl RunStats {
    fn from_workers(workers: Vec<WorkerStats>, pareto_size: usize) -> Self {
        let mut total = WorkerStats::default();
        for w in &workers {
            total.absorb(w);
        }
        Self {
            ip_solves: total.ip_solves,
            feasible_solves: total.feasible_solves,
            infeasible_solves: total.infeasible_solves,
            nodes: total.nodes,
            workers,
            pareto_size,
        }
    }
}

/// Walks the staircase under `order`, capping the second objective strictly
/// below the last point found, until the capped problem is infeasible.
/// `cap` is the starting cap (`None` = unbounded).
pub(crate) fn walk<B: SolverBackend + ?Sized>(
    p: &Problem,
    backend: &mut B,
    order: ObjectiveOrder,
    mut cap: Option<i64>,
    stats: &mut WorkerStats,
) -> Result<Vec<Solution>, AlgorithmError> {
    let capped = order.second();
    let mut found = Vec::new();
    loop {
        let extras: Vec<ExtraConstraint> = ExtraConstraint::from_bound(capped, cap).into_iter().collect();
        let result = backend.solve_lex(p, order, &extras)?;
        stats.record(result.solution().is_some(), result.node_count);
        let Some(x) = result.into_solution() else {
            return Ok(found);
        };
        cap = Some(x.outcome.component(capped));
        found.push(x);
    }
}

/// One-worker epsilon-constraint enumeration under order (1,2).
pub fn sequential_boip<B: SolverBackend + ?Sized>(
    p: &Problem,
    backend: &mut B,
) -> Result<(ParetoSet, RunStats), AlgorithmError> {
    let start = Instant::now();
    let mut stats = WorkerStats::default();
    let found = walk(p, backend, ObjectiveOrder::F1F2, None, &mut stats)?;
    stats.elapsed = start.elapsed();
    let front = ParetoSet::from_staircase(found).ok_or(AlgorithmError::NotAStaircase)?;
    let size = front.len();
    Ok((front, RunStats::from_workers(vec![stats], size)))
}

/// Whether `S ∪ S′ ∪ {meet}` has exactly the oracle's outcome set.
pub fn verify_theorem1(
    s: &ParetoSet,
    s_prime: &ParetoSet,
    meet: Option<OutcomeVector>,
    oracle: &ParetoSet,
) -> bool {
    let union: HashSet<OutcomeVector> = s
        .iter()
        .chain(s_prime.iter())
        .map(|x| x.outcome)
        .chain(meet)
        .collect();
    let expected: HashSet<OutcomeVector> = oracle.iter().map(|x| x.outcome).collect();
    union == expected
}

pub(crate) fn objective_number(o: Objective) -> usize {
    o.index() + 1
}
