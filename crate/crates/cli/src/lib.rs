//! The `biopt` command line: `gen`, `solve`, `verify` and `bench`.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 usage or contract
//! violation, 3 empty front, 4 verification mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use biopt_harness::{run_bench_with, summarize, Algorithm, BenchConfig, BenchError, FrontDiff};
use biopt_core::algorithms::AlgorithmError;
use biopt_core::instances::{
    format_front, instance_to_string, read_instance, Family, GeneratorSpec, InstanceError,
};
use biopt_core::{
    brute_force_pareto, meeting_boip, sequential_boip, splitting_boip, BranchAndBoundBackend,
    EnumerationBudget, ParetoSet, Problem, SharedBounds,
};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_EMPTY_FRONT: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "biopt", version, about = "Exact bi-objective integer programming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Compute the non-dominated set of an instance file.
    Solve(SolveArgs),
    /// Cross-check every algorithm against brute-force enumeration.
    Verify(VerifyArgs),
    /// Time the algorithms on generated instances and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Tasks (assignment) or items (knapsack).
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Inclusive coefficient range.
    #[arg(long, value_parser = parse_range, default_value = "1:100")]
    range: (i64, i64),
    /// Output file; the instance goes to standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// seq, split, meet or brute.
    #[arg(long, default_value = "seq")]
    alg: Algorithm,
    /// Worker threads: 1 for seq and brute, 2 for split and meet.
    #[arg(long)]
    threads: Option<usize>,
    file: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest lattice the brute-force oracle may scan.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u128,
    file: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated families.
    #[arg(long, value_delimiter = ',', default_value = "knapsack")]
    families: Vec<Family>,
    /// Comma-separated sizes, applied to every family.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Seeded instances per size.
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Comma-separated algorithms; all four when omitted.
    #[arg(long, value_delimiter = ',')]
    algs: Vec<Algorithm>,
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
    /// Per-run wall-clock limit in milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Largest lattice cross-checked by the oracle.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u128,
    /// Skip the untimed warm-up run per family and size.
    #[arg(long)]
    no_warmup: bool,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, found {s:?}"))?;
    let int = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((int(lo)?, int(hi)?))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Problem, CliError> {
    read_instance(path).map_err(|e| match e {
        InstanceError::InvalidSpec(m) => CliError::Usage(m),
        other => io_err(path, other),
    })
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("standard output: {e}")))
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "biopt: {e}");
            e.exit_code()
        }
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let spec = GeneratorSpec {
        cost_range: a.range,
        ..GeneratorSpec::new(a.family, a.size, a.seed)
    };
    let p = spec.generate().map_err(|e| CliError::Usage(e.to_string()))?;
    let text = instance_to_string(&p);
    match a.out {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
            write_out(
                out,
                &format!(
                    "{}: {} variables, {} constraints\n",
                    path.display(),
                    p.num_vars(),
                    p.constraints().len()
                ),
            )?;
        }
        None => write_out(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn node_limited_backend() -> Result<BranchAndBoundBackend, CliError> {
    BranchAndBoundBackend::from_env().map_err(CliError::Usage)
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let threads = a.threads.unwrap_or(a.alg.threads());
    if threads != a.alg.threads() {
        return Err(CliError::Usage(format!(
            "--alg {} runs on exactly {} thread(s), got --threads {threads}",
            a.alg,
            a.alg.threads()
        )));
    }
    let backend = node_limited_backend()?;
    let p = load(&a.file)?;

    let start = Instant::now();
    let pair = || [backend.clone(), backend.clone()];
    let (front, ip_solves) = match a.alg {
        Algorithm::Sequential => {
            let (f, s) = sequential_boip(&p, &mut backend.clone()).map_err(solve_err)?;
            (f, s.ip_solves)
        }
        Algorithm::Splitting => {
            let (f, s) = splitting_boip(&p, &mut pair()).map_err(solve_err)?;
            (f, s.ip_solves)
        }
        Algorithm::Meeting => {
            let (f, s) = meeting_boip(&p, &mut pair(), &SharedBounds::new()).map_err(solve_err)?;
            (f, s.ip_solves)
        }
        Algorithm::Brute => {
            let f = brute_force_pareto(&p, EnumerationBudget::default())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (f, 0)
        }
    };
    let elapsed = start.elapsed();

    let mut text = format_front(&p, &front);
    text.push_str(&stats_footer(ip_solves, front.len(), elapsed));
    write_out(out, &text)?;
    Ok(if front.is_empty() { EXIT_EMPTY_FRONT } else { EXIT_OK })
}

/// Comment lines after the result; `#` keeps them apart from result lines.
fn stats_footer(ip_solves: u64, pareto_size: usize, elapsed: Duration) -> String {
    format!(
        "# ip_solves {ip_solves}\n# pareto_size {pareto_size}\n# elapsed_ms {:.3}\n",
        elapsed.as_secs_f64() * 1000.0
    )
}

fn solve_err(e: AlgorithmError) -> CliError {
    CliError::Usage(format!("solve failed: {e}"))
}

/// A named algorithm under verification.
pub type Candidate<'a> = (&'a str, Box<dyn Fn(&Problem) -> Result<ParetoSet, AlgorithmError> + 'a>);

/// The three IP-based algorithms with a shared backend template.
pub fn default_candidates(backend: BranchAndBoundBackend) -> Vec<Candidate<'static>> {
    let seq = backend.clone();
    let split = backend.clone();
    let meet = backend;
    vec![
        (
            "sequential",
            Box::new(move |p: &Problem| Ok(sequential_boip(p, &mut seq.clone())?.0)),
        ),
        (
            "splitting",
            Box::new(move |p: &Problem| Ok(splitting_boip(p, &mut [split.clone(), split.clone()])?.0)),
        ),
        (
            "meeting",
            Box::new(move |p: &Problem| {
                Ok(meeting_boip(p, &mut [meet.clone(), meet.clone()], &SharedBounds::new())?.0)
            }),
        ),
    ]
}

/// Runs every candidate and the oracle on `p`, printing one line per
/// algorithm. Returns the exit code: 0 when all agree, 4 otherwise, 2 when
/// the lattice exceeds `budget`.
pub fn verify_problem(
    p: &Problem,
    budget: EnumerationBudget,
    candidates: &[Candidate<'_>],
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    if !budget.admits(p) {
        return Err(CliError::Usage(format!(
            "lattice size {} exceeds the enumeration budget {}",
            p.lattice_size(),
            budget.max_points()
        )));
    }
    let oracle = brute_force_pareto(p, budget).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut report = format!("oracle: {} points\n", oracle.len());
    let mut agree = true;
    for (name, solve) in candidates {
        let front = solve(p).map_err(solve_err)?;
        let diff = FrontDiff::between(&oracle, &front);
        if diff.is_empty() {
            report.push_str(&format!("{name}: ok ({} points)\n", front.len()));
        } else {
            agree = false;
            report.push_str(&format!("{name}: MISMATCH {diff}\n"));
        }
    }
    write_out(out, &report)?;
    Ok(if agree { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let budget = EnumerationBudget::new(a.budget)
        .ok_or_else(|| CliError::Usage("--budget must be positive".into()))?;
    let backend = node_limited_backend()?;
    let p = load(&a.file)?;
    verify_problem(&p, budget, &default_candidates(backend), out)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let config = BenchConfig {
        families: a.families,
        sizes: a.sizes,
        reps: a.reps,
        algorithms: if a.algs.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            a.algs
        },
        time_limit: a.time_limit_ms.map(Duration::from_millis),
        out: Some(a.out.clone()),
        budget: EnumerationBudget::new(a.budget)
            .ok_or_else(|| CliError::Usage("--budget must be positive".into()))?,
        warmup: !a.no_warmup,
        ..BenchConfig::default()
    };
    let records = run_bench_with(&config, |r| {
        let _ = writeln!(
            err,
            "{} {} seed {} {}: {:.3} ms{}",
            r.family,
            r.size,
            r.seed,
            r.algorithm,
            r.elapsed_ms,
            if r.timed_out { " (timed out)" } else { "" }
        );
    })
    .map_err(|e| match e {
        BenchError::Io(_) | BenchError::Csv(_) => io_err(&a.out, e),
        BenchError::Mismatch { .. } => CliError::Mismatch(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    write_out(out, &summarize(&records).to_string())?;
    write_out(out, &format!("wrote {} records to {}\n", records.len(), a.out.display()))?;
    Ok(EXIT_OK)
}
