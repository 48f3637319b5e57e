//! Timed experiment harness.
//!
//! For every family, size, seed `1..=reps` and algorithm, generates the
//! instance, times the algorithm call (backend construction included), and
//! cross-checks the front against the brute-force oracle whenever the
//! instance lattice fits the enumeration budget. Any mismatch aborts the run.

mod report;

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use biopt_core::algorithms::AlgorithmError;
use biopt_core::instances::{Family, GeneratorSpec, InstanceError, DEFAULT_COST_RANGE};
use biopt_core::{
    brute_force_pareto, meeting_boip, sequential_boip, splitting_boip, BranchAndBoundBackend,
    EnumerationBudget, OutcomeVector, ParetoSet, Problem, SharedBounds, SolveError,
};
use thiserror::Error;

pub use report::{read_csv, summarize, write_csv, Summary, SummaryRow, CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sequential,
    Splitting,
    Meeting,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Sequential,
        Algorithm::Splitting,
        Algorithm::Meeting,
        Algorithm::Brute,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sequential => "sequential",
            Algorithm::Splitting => "splitting",
            Algorithm::Meeting => "meeting",
            Algorithm::Brute => "brute",
        }
    }

    pub fn threads(self) -> usize {
        match self {
            Algorithm::Splitting | Algorithm::Meeting => 2,
            Algorithm::Sequential | Algorithm::Brute => 1,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// Accepts the full names and the short forms `seq`, `split`, `meet`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(Algorithm::Sequential),
            "splitting" | "split" => Ok(Algorithm::Splitting),
            "meeting" | "meet" => Ok(Algorithm::Meeting),
            "brute" => Ok(Algorithm::Brute),
            other => Err(format!(
                "unknown algorithm {other:?} (expected sequential, splitting, meeting or brute)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub families: Vec<Family>,
    /// Applied to every family.
    pub sizes: Vec<usize>,
    /// Seeds `1..=reps` per size.
    pub reps: u64,
    pub algorithms: Vec<Algorithm>,
    /// Per run; `None` for no limit. Brute force ignores it.
    pub time_limit: Option<Duration>,
    /// CSV destination, written record by record.
    pub out: Option<PathBuf>,
    /// Instances whose lattice fits are cross-checked against the oracle.
    pub budget: EnumerationBudget,
    pub cost_range: (i64, i64),
    /// One untimed throwaway run per (family, size) before the timed reps.
    pub warmup: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Knapsack],
            sizes: vec![12],
            reps: 10,
            algorithms: Algorithm::ALL.to_vec(),
            time_limit: None,
            out: None,
            budget: EnumerationBudget::default(),
            cost_range: DEFAULT_COST_RANGE,
            warmup: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::InvalidConfig(m.to_string()));
        if self.reps == 0 {
            return bad("reps must be at least 1");
        }
        if self.families.is_empty() || self.sizes.is_empty() || self.algorithms.is_empty() {
            return bad("families, sizes and algorithms must be non-empty");
        }
        for &family in &self.families {
            for &size in &self.sizes {
                self.spec(family, size, 1).validate()?;
            }
        }
        Ok(())
    }

    /// Whether the oracle can check instances of this family and size.
    pub fn oracle_checkable(&self, family: Family, size: usize) -> Result<bool, BenchError> {
        let p = self.spec(family, size, 1).generate()?;
        Ok(self.budget.admits(&p))
    }

    fn spec(&self, family: Family, size: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            cost_range: self.cost_range,
            ..GeneratorSpec::new(family, size, seed)
        }
    }
}

/// One timed run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub family: Family,
    pub size: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub threads: usize,
    /// Wall-clock milliseconds, microsecond resolution.
    pub elapsed_ms: f64,
    /// Zero for brute force and for timed-out runs.
    pub ip_solves: u64,
    pub pareto_size: usize,
    /// `Some` only when the oracle ran.
    pub verified: Option<bool>,
    pub timed_out: bool,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{algorithm} failed on {family} size {size} seed {seed}: {source}")]
    Algorithm {
        family: Family,
        size: usize,
        seed: u64,
        algorithm: Algorithm,
        source: AlgorithmError,
    },
    #[error("oracle failed on {family} size {size} seed {seed}: {source}")]
    Oracle {
        family: Family,
        size: usize,
        seed: u64,
        source: SolveError,
    },
    #[error("{algorithm} disagrees with the oracle on {family} size {size} seed {seed}: {diff}")]
    Mismatch {
        family: Family,
        size: usize,
        seed: u64,
        algorithm: Algorithm,
        diff: FrontDiff,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Outcome vectors present on only one side of a comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrontDiff {
    /// In the reference front but not the candidate.
    pub missing: Vec<OutcomeVector>,
    /// In the candidate but not the reference.
    pub extra: Vec<OutcomeVector>,
}

impl FrontDiff {
    pub fn between(reference: &ParetoSet, candidate: &ParetoSet) -> Self {
        let a: BTreeSet<_> = reference.outcomes().into_iter().collect();
        let b: BTreeSet<_> = candidate.outcomes().into_iter().collect();
        Self {
            missing: a.difference(&b).copied().collect(),
            extra: b.difference(&a).copied().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

impl fmt::Display for FrontDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[OutcomeVector]| {
            v.iter()
                .map(|o| format!("({},{})", o.f1, o.f2))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "missing [{}] extra [{}]", list(&self.missing), list(&self.extra))
    }
}

/// Front and IP count of one algorithm run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub front: ParetoSet,
    pub ip_solves: u64,
    pub elapsed: Duration,
}

/// Runs one algorithm on `p`. The clock starts before the backends are
/// built; `time_limit` applies to the branch-and-bound backends.
pub fn run_algorithm(
    algorithm: Algorithm,
    p: &Problem,
    time_limit: Option<Duration>,
    budget: EnumerationBudget,
) -> Result<RunResult, AlgorithmError> {
    let start = Instant::now();
    let backend = || match time_limit {
        Some(limit) => BranchAndBoundBackend::default().with_deadline(start, limit),
        None => BranchAndBoundBackend::default(),
    };
    let (front, ip_solves) = match algorithm {
        Algorithm::Sequential => {
            let (front, stats) = sequential_boip(p, &mut backend())?;
            (front, stats.ip_solves)
        }
        Algorithm::Splitting => {
            let (front, stats) = splitting_boip(p, &mut [backend(), backend()])?;
            (front, stats.ip_solves)
        }
        Algorithm::Meeting => {
            let (front, stats) = meeting_boip(p, &mut [backend(), backend()], &SharedBounds::new())?;
            (front, stats.ip_solves)
        }
        Algorithm::Brute => (brute_force_pareto(p, budget)?, 0),
    };
    Ok(RunResult {
        front,
        ip_solves,
        elapsed: start.elapsed(),
    })
}

fn is_timeout(e: &AlgorithmError) -> bool {
    matches!(e, AlgorithmError::Solve(SolveError::TimeLimit(_)))
}

fn millis(d: Duration) -> f64 {
    d.as_micros() as f64 / 1000.0
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    run_bench_with(config, |_| {})
}

/// [`run_bench`] with a callback invoked after every record.
pub fn run_bench_with(
    config: &BenchConfig,
    mut on_record: impl FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>, BenchError> {
    config.validate()?;
    let mut csv = match &config.out {
        Some(path) => {
            let mut w = csv::Writer::from_writer(File::create(path)?);
            w.write_record(CSV_HEADER)?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };

    let mut records = Vec::new();
    for &family in &config.families {
        for &size in &config.sizes {
            if config.warmup {
                let p = config.spec(family, size, 1).generate()?;
                for &alg in &config.algorithms {
                    if alg == Algorithm::Brute && !config.budget.admits(&p) {
                        continue;
                    }
                    // timing and errors of the throwaway run are irrelevant;
                    // real failures resurface in the timed reps
                    let _ = run_algorithm(alg, &p, config.time_limit, config.budget);
                }
            }
            for seed in 1..=config.reps {
                let p = config.spec(family, size, seed).generate()?;
                let oracle = if config.budget.admits(&p) {
                    let front = brute_force_pareto(&p, config.budget).map_err(|source| {
                        BenchError::Oracle {
                            family,
                            size,
                            seed,
                            source,
                        }
                    })?;
                    Some(front)
                } else {
                    None
                };
                for &algorithm in &config.algorithms {
                    let record = run_cell(config, &p, oracle.as_ref(), family, size, seed, algorithm)?;
                    if let Some(w) = csv.as_mut() {
                        report::write_record(w, &record)?;
                        w.flush()?;
                    }
                    on_record(&record);
                    records.push(record);
                }
            }
        }
    }
    Ok(records)
}

fn run_cell(
    config: &BenchConfig,
    p: &Problem,
    oracle: Option<&ParetoSet>,
    family: Family,
    size: usize,
    seed: u64,
    algorithm: Algorithm,
) -> Result<BenchRecord, BenchError> {
    let mut record = BenchRecord {
        family,
        size,
        seed,
        algorithm,
        threads: algorithm.threads(),
        elapsed_ms: 0.0,
        ip_solves: 0,
        pareto_size: 0,
        verified: None,
        timed_out: false,
    };
    let started = Instant::now();
    match run_algorithm(algorithm, p, config.time_limit, config.budget) {
        Ok(run) => {
            record.elapsed_ms = millis(run.elapsed);
            record.ip_solves = run.ip_solves;
            record.pareto_size = run.front.len();
            if let Some(oracle) = oracle {
                let diff = FrontDiff::between(oracle, &run.front);
                if !diff.is_empty() {
                    return Err(BenchError::Mismatch {
                        family,
                        size,
                        seed,
                        algorithm,
                        diff,
                    });
                }
                record.verified = Some(true);
            }
        }
        Err(e) if is_timeout(&e) => {
            record.elapsed_ms = millis(started.elapsed());
            record.timed_out = true;
        }
        Err(source) => {
            return Err(BenchError::Algorithm {
                family,
                size,
                seed,
                algorithm,
                source,
            })
        }
    }
    Ok(record)
}
