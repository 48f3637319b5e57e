use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::splitting::join;
use super::{objective_number, AlgorithmError, RunStats, WorkerStats};
use crate::ipsolve::{ExtraConstraint, SolverBackend};
use crate::model::{Objective, ObjectiveOrder, ParetoSet, Problem, Solution};

/// Stored value standing for an infinite bound.
const UNBOUNDED: i64 = i64::MAX;

/// One accepted write to a [`SharedBounds`] store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundWrite {
    pub objective: Objective,
    pub value: i64,
}

/// The pair of strict objective caps `(l1, l2)` shared by the two meeting
/// workers. Each cap only ever decreases. Reads are a single atomic load and
/// may be stale, never fabricated.
#[derive(Debug)]
pub struct SharedBounds {
    caps: [AtomicI64; 2],
    writes: Mutex<Vec<BoundWrite>>,
}

impl Default for SharedBounds {
    fn default() -> Self {
        Self::new()
    }
}

impl SharedBounds {
    /// Both caps infinite.
    pub fn new() -> Self {
        Self {
            caps: [AtomicI64::new(UNBOUNDED), AtomicI64::new(UNBOUNDED)],
            writes: Mutex::new(Vec::new()),
        }
    }

    /// Current cap on `objective`, `None` while infinite.
    pub fn read(&self, objective: Objective) -> Option<i64> {
        let v = self.caps[objective.index()].load(Ordering::Acquire);
        (v != UNBOUNDED).then_some(v)
    }

    /// Min-merges `value` into the cap on `objective`. A value above the
    /// current cap is rejected.
    pub fn publish(&self, objective: Objective, value: i64) -> Result<(), AlgorithmError> {
        let mut log = self.writes.lock().unwrap_or_else(|e| e.into_inner());
        let previous = self.caps[objective.index()].fetch_min(value, Ordering::AcqRel);
        if value > previous {
            return Err(AlgorithmError::BoundIncrease {
                objective: objective_number(objective),
                current: previous,
                attempted: value,
            });
        }
        log.push(BoundWrite { objective, value });
        Ok(())
    }

    /// Every accepted write, in store order.
    pub fn trace(&self) -> Vec<BoundWrite> {
        self.writes.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Whether each cap's recorded history is non-increasing.
    pub fn trace_is_monotone(&self) -> bool {
        let trace = self.trace();
        [Objective::F1, Objective::F2].iter().all(|&o| {
            let values: Vec<i64> = trace
                .iter()
                .filter(|w| w.objective == o)
                .map(|w| w.value)
                .collect();
            values.windows(2).all(|w| w[1] <= w[0])
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreAccess {
    Read,
    Write,
}

/// Interleaving control for the meeting workers. Workers are numbered 1 and 2.
pub trait Schedule: Sync {
    fn before_access(&self, _worker: usize, _access: StoreAccess) {}
    fn worker_done(&self, _worker: usize) {}
}

/// Run at full speed.
#[derive(Debug, Default, Clone, Copy)]
pub struct Immediate;

impl Schedule for Immediate {}

/// Sleeps a uniformly random duration in `[0, max]` before every store access.
#[derive(Debug)]
pub struct RandomDelays {
    rng: Mutex<StdRng>,
    max: Duration,
}

impl RandomDelays {
    pub fn new(seed: u64, max: Duration) -> Self {
        Self {
            rng: Mutex::new(StdRng::seed_from_u64(seed)),
            max,
        }
    }
}

impl Schedule for RandomDelays {
    fn before_access(&self, _worker: usize, _access: StoreAccess) {
        let nanos = self.max.as_nanos() as u64;
        let pause = {
            let mut rng = self.rng.lock().unwrap_or_else(|e| e.into_inner());
            rng.random_range(0..=nanos)
        };
        thread::sleep(Duration::from_nanos(pause));
    }
}

/// Output of a meeting run, including what each worker found.
#[derive(Debug, Clone)]
pub struct MeetingRun {
    pub front: ParetoSet,
    pub stats: RunStats,
    /// Points found by worker 1 (order (2,1)) and worker 2 (order (1,2)),
    /// in discovery order.
    pub found: [Vec<Solution>; 2],
}

/// Two-worker meeting enumeration at full speed.
pub fn meeting_boip<B: SolverBackend + Send>(
    p: &Problem,
    backends: &mut [B; 2],
    bounds: &SharedBounds,
) -> Result<(ParetoSet, RunStats), AlgorithmError> {
    let run = meeting_boip_with(p, backends, bounds, &Immediate)?;
    Ok((run.front, run.stats))
}

/// Two-worker meeting enumeration under an explicit [`Schedule`].
///
/// Worker 1 solves order (2,1) with its own cap on f1 and the shared cap on
/// f2; worker 2 mirrors it with order (1,2). Before every solve a worker
/// re-reads the other's cap, replacing its previous cross constraint. After
/// every point it publishes its own new cap. A worker stops at its first
/// infeasible solve.
pub fn meeting_boip_with<B: SolverBackend + Send>(
    p: &Problem,
    backends: &mut [B; 2],
    bounds: &SharedBounds,
    schedule: &dyn Schedule,
) -> Result<MeetingRun, AlgorithmError> {
    let [b1, b2] = backends;
    let (r1, r2) = thread::scope(|scope| {
        let h1 = scope.spawn(|| run_worker(1, p, b1, bounds, schedule));
        let r2 = run_worker(2, p, b2, bounds, schedule);
        (join(h1), r2)
    });
    let (found1, stats1) = r1?;
    let (found2, stats2) = r2?;

    // worker 2's representative wins on a shared outcome
    let front = ParetoSet::from_staircase(found2.iter().chain(&found1).cloned())
        .ok_or(AlgorithmError::NotAStaircase)?;
    let size = front.len();
    Ok(MeetingRun {
        front,
        stats: RunStats::from_workers(vec![stats1, stats2], size),
        found: [found1, found2],
    })
}

fn run_worker<B: SolverBackend + ?Sized>(
    worker: usize,
    p: &Problem,
    backend: &mut B,
    bounds: &SharedBounds,
    schedule: &dyn Schedule,
) -> Result<(Vec<Solution>, WorkerStats), AlgorithmError> {
    let (order, own) = match worker {
        1 => (ObjectiveOrder::F2F1, Objective::F1),
        _ => (ObjectiveOrder::F1F2, Objective::F2),
    };
    let start = Instant::now();
    let mut stats = WorkerStats::default();
    let mut found = Vec::new();
    let mut own_cap: Option<i64> = None;
    let result = loop {
        schedule.before_access(worker, StoreAccess::Read);
        let cross_cap = bounds.read(own.other());
        let extras: Vec<ExtraConstraint> = [
            ExtraConstraint::from_bound(own, own_cap),
            ExtraConstraint::from_bound(own.other(), cross_cap),
        ]
        .into_iter()
        .flatten()
        .collect();
        let r = match backend.solve_lex(p, order, &extras) {
            Ok(r) => r,
            Err(e) => break Err(e.into()),
        };
        stats.record(r.solution().is_some(), r.node_count);
        let Some(x) = r.into_solution() else {
            break Ok(());
        };
        let cap = x.outcome.component(own);
        found.push(x);
        schedule.before_access(worker, StoreAccess::Write);
        if let Err(e) = bounds.publish(own, cap) {
            break Err(e);
        }
        own_cap = Some(cap);
    };
    stats.elapsed = start.elapsed();
    schedule.worker_done(worker);
    result.map(|()| (found, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipsolve::{BranchAndBoundBackend, EnumerationBackend};
    use crate::model::{LinearConstraint, OutcomeVector, Relation, Sense};
    use crate::oracle::{brute_force_pareto, EnumerationBudget};
    use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
    use std::sync::{Barrier, Condvar};

    fn t1() -> Problem {
        super::super::tests::t1()
    }

    fn bnb_pair() -> [BranchAndBoundBackend; 2] {
        [BranchAndBoundBackend::default(), BranchAndBoundBackend::default()]
    }

    /// Both workers finish their first solve before either publishes.
    struct StartTogether {
        barrier: Barrier,
        started: [AtomicBool; 2],
    }

    impl Schedule for StartTogether {
        fn before_access(&self, worker: usize, access: StoreAccess) {
            if access == StoreAccess::Write && !self.started[worker - 1].swap(true, AtomicOrdering::SeqCst) {
                self.barrier.wait();
            }
        }
    }

    #[test]
    fn meeting_t1() {
        let bounds = SharedBounds::new();
        let schedule = StartTogether {
            barrier: Barrier::new(2),
            started: [AtomicBool::new(false), AtomicBool::new(false)],
        };
        let run = meeting_boip_with(&t1(), &mut bnb_pair(), &bounds, &schedule).unwrap();
        let o = OutcomeVector::new;
        assert_eq!(run.front.outcomes(), vec![o(0, 3), o(1, 2), o(2, 1), o(3, 0)]);
        assert!(run.found[0].iter().any(|s| s.outcome == o(3, 0)));
        assert!(run.found[1].iter().any(|s| s.outcome == o(0, 3)));
        assert!(bounds.trace_is_monotone());
        assert!(run.stats.ip_solves as usize <= run.front.len() + 4);
    }

    #[test]
    fn single_point_front_is_deduplicated() {
        // min (x, x) over x ∈ [2, 5]: both orders land on (2,2)
        let p = Problem::new([vec![1], vec![1]], [Sense::Min; 2], vec![], vec![(2, 5)]).unwrap();
        let bounds = SharedBounds::new();
        let run = meeting_boip_with(&p, &mut bnb_pair(), &bounds, &Immediate).unwrap();
        assert_eq!(run.front.outcomes(), vec![OutcomeVector::new(2, 2)]);
    }

    #[test]
    fn infeasible_problem() {
        let p = Problem::new(
            [vec![1], vec![1]],
            [Sense::Min; 2],
            vec![LinearConstraint::new(vec![1], Relation::Ge, 5)],
            vec![(0, 3)],
        )
        .unwrap();
        let (front, stats) = meeting_boip(&p, &mut bnb_pair(), &SharedBounds::new()).unwrap();
        assert!(front.is_empty());
        assert_eq!(stats.ip_solves, 2);
    }

    #[test]
    fn bounds_reject_increase() {
        let b = SharedBounds::new();
        assert_eq!(b.read(Objective::F1), None);
        b.publish(Objective::F1, 5).unwrap();
        b.publish(Objective::F1, 5).unwrap();
        b.publish(Objective::F1, 3).unwrap();
        assert_eq!(
            b.publish(Objective::F1, 4),
            Err(AlgorithmError::BoundIncrease {
                objective: 1,
                current: 3,
                attempted: 4
            })
        );
        assert_eq!(b.read(Objective::F1), Some(3));
        assert_eq!(b.read(Objective::F2), None);
        assert_eq!(b.trace().len(), 3);
        assert!(b.trace_is_monotone());
    }

    /// Holds worker 1 back until worker 2 has finished.
    struct StallWorkerOne {
        done: Mutex<bool>,
        cv: Condvar,
    }

    impl Schedule for StallWorkerOne {
        fn before_access(&self, worker: usize, _access: StoreAccess) {
            if worker == 1 {
                let mut done = self.done.lock().unwrap();
                while !*done {
                    done = self.cv.wait(done).unwrap();
                }
            }
        }

        fn worker_done(&self, worker: usize) {
            if worker == 2 {
                *self.done.lock().unwrap() = true;
                self.cv.notify_all();
            }
        }
    }

    #[test]
    fn stalled_worker_leaves_everything_to_the_other() {
        let schedule = StallWorkerOne {
            done: Mutex::new(false),
            cv: Condvar::new(),
        };
        let p = t1();
        let bounds = SharedBounds::new();
        let run = meeting_boip_with(&p, &mut bnb_pair(), &bounds, &schedule).unwrap();
        let oracle = brute_force_pareto(&p, EnumerationBudget::default()).unwrap();
        assert_eq!(run.front.outcomes(), oracle.outcomes());
        // worker 2 alone walked the staircase exactly like the sequential loop
        assert_eq!(run.found[1].len(), oracle.len());
        assert!(run.found[0].is_empty());
        assert_eq!(run.stats.workers[1].ip_solves as usize, oracle.len() + 1);
    }

    #[test]
    fn random_schedules_match_oracle() {
        let p = Problem::new(
            [vec![3, 5, 2, 4], vec![-2, -4, -3, -1]],
            [Sense::Min; 2],
            vec![LinearConstraint::new(vec![1, 1, 1, 1], Relation::Le, 5)],
            vec![(0, 2); 4],
        )
        .unwrap();
        let oracle = brute_force_pareto(&p, EnumerationBudget::default()).unwrap();
        for seed in 0..8 {
            let schedule = RandomDelays::new(seed, Duration::from_millis(2));
            let bounds = SharedBounds::new();
            let mut backends = [EnumerationBackend::default(), EnumerationBackend::default()];
            let run = meeting_boip_with(&p, &mut backends, &bounds, &schedule).unwrap();
            assert_eq!(run.front.outcomes(), oracle.outcomes(), "seed {seed}");
            assert!(bounds.trace_is_monotone());
        }
    }
}
