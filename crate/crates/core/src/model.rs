//! Problem representation, objective-space arithmetic, dominance and the
//! Pareto staircase container.
//!
//! Every objective is stored in minimisation sense. Maximised objectives are
//! negated when the [`Problem`] is built and only flipped back for display
//! (see [`Problem::to_user_outcome`]).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a problem needs at least one variable")]
    NoVariables,
    #[error("{what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("variable {var} has empty bound interval [{lo}, {hi}]")]
    EmptyBound { var: usize, lo: i64, hi: i64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

/// Optimisation direction of one objective as the user wrote it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Min => "min",
            Sense::Max => "max",
        }
    }

    fn sign(self) -> i64 {
        match self {
            Sense::Min => 1,
            Sense::Max => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    /// Whether `lhs <relation> rhs` holds.
    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

/// `coeffs · x <relation> rhs`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: Vec<i64>,
    pub relation: Relation,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<i64>, relation: Relation, rhs: i64) -> Self {
        Self {
            coeffs,
            relation,
            rhs,
        }
    }
}

/// One of the two objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    F1,
    F2,
}

impl Objective {
    pub fn index(self) -> usize {
        match self {
            Objective::F1 => 0,
            Objective::F2 => 1,
        }
    }

    pub fn other(self) -> Objective {
        match self {
            Objective::F1 => Objective::F2,
            Objective::F2 => Objective::F1,
        }
    }
}

/// Which of the two objectives is ranked first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveOrder {
    /// f1 first, then f2.
    F1F2,
    /// f2 first, then f1.
    F2F1,
}

impl ObjectiveOrder {
    pub fn first(self) -> Objective {
        match self {
            ObjectiveOrder::F1F2 => Objective::F1,
            ObjectiveOrder::F2F1 => Objective::F2,
        }
    }

    pub fn second(self) -> Objective {
        self.first().other()
    }

    /// Zero-based objective indices in priority order.
    pub fn indices(self) -> [usize; 2] {
        match self {
            ObjectiveOrder::F1F2 => [0, 1],
            ObjectiveOrder::F2F1 => [1, 0],
        }
    }

    /// Lexicographic comparison of two outcomes under this order.
    pub fn compare(self, a: OutcomeVector, b: OutcomeVector) -> Ordering {
        let [first, second] = self.indices();
        a.get(first)
            .cmp(&b.get(first))
            .then(a.get(second).cmp(&b.get(second)))
    }
}

impl fmt::Display for ObjectiveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveOrder::F1F2 => f.write_str("(1,2)"),
            ObjectiveOrder::F2F1 => f.write_str("(2,1)"),
        }
    }
}

/// A point in objective space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeVector {
    pub f1: i64,
    pub f2: i64,
}

impl OutcomeVector {
    pub const fn new(f1: i64, f2: i64) -> Self {
        Self { f1, f2 }
    }

    pub fn component(self, objective: Objective) -> i64 {
        self.get(objective.index())
    }

    /// Component by zero-based objective index.
    pub fn get(self, index: usize) -> i64 {
        match index {
            0 => self.f1,
            1 => self.f2,
            _ => panic!("objective index {index} out of range"),
        }
    }
}

impl fmt::Display for OutcomeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f1, self.f2)
    }
}

/// `a` dominates `b`: no worse in both objectives and not equal.
pub fn dominates(a: OutcomeVector, b: OutcomeVector) -> bool {
    a.f1 <= b.f1 && a.f2 <= b.f2 && a != b
}

/// A variable assignment together with its (normalised) outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub assignment: Vec<i64>,
    pub outcome: OutcomeVector,
}

/// Immutable bi-objective integer program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Problem {
    num_vars: usize,
    objectives: [Vec<i64>; 2],
    sense: [Sense; 2],
    constraints: Vec<LinearConstraint>,
    bounds: Vec<(i64, i64)>,
}

impl Problem {
    /// Builds a problem from objectives in the user's sense. Max objectives
    /// are negated so that everything downstream minimises.
    pub fn new(
        objectives: [Vec<i64>; 2],
        sense: [Sense; 2],
        constraints: Vec<LinearConstraint>,
        bounds: Vec<(i64, i64)>,
    ) -> Result<Self, ModelError> {
        let num_vars = bounds.len();
        if num_vars == 0 {
            return Err(ModelError::NoVariables);
        }
        for (k, obj) in objectives.iter().enumerate() {
            check_len(&format!("objective {}", k + 1), num_vars, obj.len())?;
        }
        for (i, c) in constraints.iter().enumerate() {
            check_len(&format!("constraint {i}"), num_vars, c.coeffs.len())?;
        }
        for (var, &(lo, hi)) in bounds.iter().enumerate() {
            if lo > hi {
                return Err(ModelError::EmptyBound { var, lo, hi });
            }
        }
        let [o1, o2] = objectives;
        let normalise = |obj: Vec<i64>, s: Sense| -> Result<Vec<i64>, ModelError> {
            obj.into_iter()
                .map(|c| c.checked_mul(s.sign()).ok_or(ModelError::Overflow("objective")))
                .collect()
        };
        Ok(Self {
            num_vars,
            objectives: [normalise(o1, sense[0])?, normalise(o2, sense[1])?],
            sense,
            constraints,
            bounds,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Objective coefficients in minimisation sense (zero-based index).
    pub fn objective(&self, index: usize) -> &[i64] {
        &self.objectives[index]
    }

    /// Objective coefficients as the user wrote them.
    pub fn user_objective(&self, index: usize) -> Vec<i64> {
        let s = self.sense[index].sign();
        self.objectives[index].iter().map(|c| c * s).collect()
    }

    pub fn sense(&self) -> [Sense; 2] {
        self.sense
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    /// Number of lattice points in the variable box, saturating at `u128::MAX`.
    pub fn lattice_size(&self) -> u128 {
        self.bounds.iter().fold(1u128, |acc, &(lo, hi)| {
            let width = (hi as i128 - lo as i128 + 1) as u128;
            acc.saturating_mul(width)
        })
    }

    /// Copy of this problem with additional constraint rows.
    pub fn with_constraints(
        &self,
        extra: impl IntoIterator<Item = LinearConstraint>,
    ) -> Result<Self, ModelError> {
        let mut out = self.clone();
        for c in extra {
            check_len("extra constraint", self.num_vars, c.coeffs.len())?;
            out.constraints.push(c);
        }
        Ok(out)
    }

    /// Whether `assignment` respects every bound and constraint.
    pub fn is_feasible(&self, assignment: &[i64]) -> Result<bool, ModelError> {
        check_len("assignment", self.num_vars, assignment.len())?;
        let in_box = assignment
            .iter()
            .zip(&self.bounds)
            .all(|(&x, &(lo, hi))| lo <= x && x <= hi);
        if !in_box {
            return Ok(false);
        }
        for c in &self.constraints {
            if !c.relation.holds(dot(&c.coeffs, assignment)?, c.rhs) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Flips normalised outcome components back into the user's sense.
    pub fn to_user_outcome(&self, outcome: OutcomeVector) -> OutcomeVector {
        OutcomeVector::new(
            outcome.f1 * self.sense[0].sign(),
            outcome.f2 * self.sense[1].sign(),
        )
    }
}

fn check_len(what: &str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::LengthMismatch {
            what: what.to_string(),
            expected,
            found,
        })
    }
}

/// Checked integer dot product.
pub fn dot(coeffs: &[i64], x: &[i64]) -> Result<i64, ModelError> {
    coeffs.iter().zip(x).try_fold(0i64, |acc, (&c, &v)| {
        c.checked_mul(v)
            .and_then(|t| acc.checked_add(t))
            .ok_or(ModelError::Overflow("dot product"))
    })
}

/// Outcome of `assignment` in minimisation sense.
pub fn evaluate(p: &Problem, assignment: &[i64]) -> Result<OutcomeVector, ModelError> {
    check_len("assignment", p.num_vars, assignment.len())?;
    Ok(OutcomeVector::new(
        dot(p.objective(0), assignment)?,
        dot(p.objective(1), assignment)?,
    ))
}

/// Non-dominated staircase of solutions, sorted by `f1` ascending with
/// strictly decreasing `f2` and one representative per outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParetoSet {
    entries: Vec<Solution>,
}

impl ParetoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Deduplicates by outcome (first occurrence kept) and sorts, without
    /// discarding anything else. `None` if the points are not mutually
    /// non-dominated.
    pub fn from_staircase(points: impl IntoIterator<Item = Solution>) -> Option<Self> {
        let mut seen = HashSet::new();
        let mut entries: Vec<Solution> = points
            .into_iter()
            .filter(|s| seen.insert(s.outcome))
            .collect();
        entries.sort_by_key(|s| s.outcome);
        let set = Self { entries };
        set.is_staircase().then_some(set)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn solutions(&self) -> &[Solution] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Solution> {
        self.entries.iter()
    }

    pub fn outcomes(&self) -> Vec<OutcomeVector> {
        self.entries.iter().map(|s| s.outcome).collect()
    }

    /// Checks the staircase invariant.
    pub fn is_staircase(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].outcome.f1 < w[1].outcome.f1 && w[0].outcome.f2 > w[1].outcome.f2)
    }
}

impl IntoIterator for ParetoSet {
    type Item = Solution;
    type IntoIter = std::vec::IntoIter<Solution>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<'a> IntoIterator for &'a ParetoSet {
    type Item = &'a Solution;
    type IntoIter = std::slice::Iter<'a, Solution>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Keeps exactly the solutions whose outcome no other input dominates.
/// Duplicated outcomes keep their first occurrence.
pub fn pareto_filter(points: impl IntoIterator<Item = Solution>) -> ParetoSet {
    let mut seen = HashSet::new();
    let mut unique: Vec<Solution> = points
        .into_iter()
        .filter(|s| seen.insert(s.outcome))
        .collect();
    // stable, so ties keep input order (cannot happen after dedup anyway)
    unique.sort_by_key(|s| s.outcome);

    // Sweep by f1 ascending: a point survives iff its f2 is strictly below
    // every f2 seen so far. Equal f1 with larger f2 is dominated by the
    // earlier (smaller f2) entry.
    let mut entries: Vec<Solution> = Vec::with_capacity(unique.len());
    let mut best_f2 = i64::MAX;
    for s in unique {
        if entries.is_empty() || s.outcome.f2 < best_f2 {
            best_f2 = s.outcome.f2;
            entries.push(s);
        }
    }
    ParetoSet { entries }
}
