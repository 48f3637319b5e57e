//! Exact bi-objective integer programming.
//!
//! Computes the complete non-dominated set of an integer program with two
//! linear objectives by repeated lexicographic solves under a tightening
//! objective cap, either on one worker or split across two.

pub mod algorithms;
pub mod instances;
pub mod ipsolve;
mod lattice;
pub mod model;
pub mod oracle;

pub use algorithms::{
    meeting_boip, sequential_boip, split_range, splitting_boip, verify_theorem1, RunStats,
    SharedBounds,
};
pub use ipsolve::{
    BranchAndBoundBackend, EnumerationBackend, ExtraConstraint, LexResult, LexStatus, SolveError,
    SolverBackend,
};
pub use model::{
    dominates, evaluate, pareto_filter, LinearConstraint, ModelError, Objective, ObjectiveOrder,
    OutcomeVector, ParetoSet, Problem, Relation, Sense, Solution,
};
pub use oracle::{brute_force_pareto, EnumerationBudget};
