//! Seeded benchmark generators and the text formats for instances and results.
//!
//! # Instance format
//!
//! Line oriented, tokens separated by single spaces, `#` starts a comment
//! that runs to the end of the line, blank lines are ignored:
//!
//! ```text
//! BOIP 1
//! SENSE <min|max> <min|max>
//! VARS n
//! OBJ1 c_1 ... c_n
//! OBJ2 c_1 ... c_n
//! B j lo hi            (n lines, j = 0..n-1 in order)
//! CONSTRAINTS m
//! ROW a_1 ... a_n <op> rhs   (m lines, op one of <=, >=, =)
//! ```
//!
//! Objective coefficients are written in the user's sense.
//!
//! # Result format
//!
//! One line per non-dominated point, `f1 f2 : x_1 ... x_n`, sorted by `f1`
//! ascending, values in the user's sense.
//!
//! # Random numbers
//!
//! Generators draw from SplitMix64 with the spec seed as its initial state.
//! A value in `[lo, hi]` takes draws `x` until `x < r·⌊2⁶⁴/r⌋` with
//! `r = hi − lo + 1`, then returns `lo + x mod r`. Assignment instances draw
//! the first cost matrix row by row, then the second. Knapsack instances draw
//! all weights, then the first profits, then the second profits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::model::{LinearConstraint, ModelError, ParetoSet, Problem, Relation, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Assignment,
    Knapsack,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Assignment => "assignment",
            Family::Knapsack => "knapsack",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "assignment" => Ok(Family::Assignment),
            "knapsack" => Ok(Family::Knapsack),
            other => Err(format!("unknown family {other:?}")),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_COST_RANGE: (i64, i64) = (1, 100);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Tasks for assignment, items for knapsack.
    pub size: usize,
    pub seed: u64,
    /// Inclusive range for every random coefficient.
    pub cost_range: (i64, i64),
}

impl GeneratorSpec {
    pub fn new(family: Family, size: usize, seed: u64) -> Self {
        Self {
            family,
            size,
            seed,
            cost_range: DEFAULT_COST_RANGE,
        }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let (lo, hi) = self.cost_range;
        if self.size == 0 {
            return Err(InstanceError::InvalidSpec("size must be at least 1".into()));
        }
        if lo < 1 || lo > hi {
            return Err(InstanceError::InvalidSpec(format!(
                "cost range {lo}:{hi} must be non-empty with a positive lower end"
            )));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<Problem, InstanceError> {
        match self.family {
            Family::Assignment => gen_assignment(self),
            Family::Knapsack => gen_knapsack(self),
        }
    }
}

struct Draw {
    rng: SplitMix64,
}

impl Draw {
    fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
        }
    }

    fn uniform(&mut self, (lo, hi): (i64, i64)) -> i64 {
        let r = (hi as i128 - lo as i128 + 1) as u128;
        let zone = (1u128 << 64) / r * r;
        loop {
            let x = self.rng.next_u64() as u128;
            if x < zone {
                return (lo as i128 + (x % r) as i128) as i64;
            }
        }
    }

    fn vector(&mut self, n: usize, range: (i64, i64)) -> Vec<i64> {
        (0..n).map(|_| self.uniform(range)).collect()
    }
}

/// Bi-objective assignment: `x_ij` at index `i·n + j`, each task to exactly
/// one agent and vice versa, both cost matrices minimised.
pub fn gen_assignment(spec: &GeneratorSpec) -> Result<Problem, InstanceError> {
    spec.validate()?;
    if spec.family != Family::Assignment {
        return Err(InstanceError::InvalidSpec("expected the assignment family".into()));
    }
    let n = spec.size;
    let vars = n.checked_mul(n).ok_or_else(|| InstanceError::InvalidSpec("size too large".into()))?;
    let mut draw = Draw::new(spec.seed);
    let c1 = draw.vector(vars, spec.cost_range);
    let c2 = draw.vector(vars, spec.cost_range);
    let mut constraints = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut row = vec![0; vars];
        row[i * n..(i + 1) * n].fill(1);
        constraints.push(LinearConstraint::new(row, Relation::Eq, 1));
    }
    for j in 0..n {
        let mut row = vec![0; vars];
        for i in 0..n {
            row[i * n + j] = 1;
        }
        constraints.push(LinearConstraint::new(row, Relation::Eq, 1));
    }
    Ok(Problem::new(
        [c1, c2],
        [Sense::Min, Sense::Min],
        constraints,
        vec![(0, 1); vars],
    )?)
}

/// Bi-objective 0/1 knapsack with capacity ⌊Σw/2⌋, both profits maximised.
pub fn gen_knapsack(spec: &GeneratorSpec) -> Result<Problem, InstanceError> {
    spec.validate()?;
    if spec.family != Family::Knapsack {
        return Err(InstanceError::InvalidSpec("expected the knapsack family".into()));
    }
    let n = spec.size;
    let mut draw = Draw::new(spec.seed);
    let weights = draw.vector(n, spec.cost_range);
    let p1 = draw.vector(n, spec.cost_range);
    let p2 = draw.vector(n, spec.cost_range);
    let total = weights
        .iter()
        .try_fold(0i64, |acc, &w| acc.checked_add(w))
        .ok_or(ModelError::Overflow("knapsack weights"))?;
    Ok(Problem::new(
        [p1, p2],
        [Sense::Max, Sense::Max],
        vec![LinearConstraint::new(weights, Relation::Le, total / 2)],
        vec![(0, 1); n],
    )?)
}

fn join_ints(out: &mut String, values: &[i64]) {
    for v in values {
        write!(out, " {v}").unwrap();
    }
}

/// Serialises `p` in the instance format.
pub fn instance_to_string(p: &Problem) -> String {
    let mut s = String::new();
    let [s1, s2] = p.sense();
    writeln!(s, "BOIP 1").unwrap();
    writeln!(s, "SENSE {} {}", s1.as_str(), s2.as_str()).unwrap();
    writeln!(s, "VARS {}", p.num_vars()).unwrap();
    for k in 0..2 {
        s.push_str(if k == 0 { "OBJ1" } else { "OBJ2" });
        join_ints(&mut s, &p.user_objective(k));
        s.push('\n');
    }
    for (j, (lo, hi)) in p.bounds().iter().enumerate() {
        writeln!(s, "B {j} {lo} {hi}").unwrap();
    }
    writeln!(s, "CONSTRAINTS {}", p.constraints().len()).unwrap();
    for c in p.constraints() {
        s.push_str("ROW");
        join_ints(&mut s, &c.coeffs);
        writeln!(s, " {} {}", c.relation.as_str(), c.rhs).unwrap();
    }
    s
}

pub fn write_instance(p: &Problem, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    fs::write(path, instance_to_string(p))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Problem, InstanceError> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    /// Column just past the last content character, for "missing token" errors.
    end_column: usize,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &content[s..i],
                        column: content[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: idx + 1,
                tokens,
                end_column: content.trim_end().chars().count() + 1,
            });
        }
    }
    out
}

struct Parser<'a> {
    lines: std::vec::IntoIter<Line<'a>>,
    last_line: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Line<'a> {
    fn int(&self, i: usize) -> Result<i64, ParseError> {
        let t = self.token(i)?;
        t.text
            .parse::<i64>()
            .map_err(|_| err(self.number, t.column, format!("expected an integer, found {:?}", t.text)))
    }

    fn token(&self, i: usize) -> Result<&Token<'a>, ParseError> {
        self.tokens
            .get(i)
            .ok_or_else(|| err(self.number, self.end_column, "unexpected end of line"))
    }

    fn arity(&self, expected: usize, what: &str) -> Result<(), ParseError> {
        if self.tokens.len() == expected {
            return Ok(());
        }
        let column = self
            .tokens
            .get(expected)
            .map_or(self.end_column, |t| t.column);
        Err(err(
            self.number,
            column,
            format!(
                "{what} expects {} values, found {}",
                expected - 1,
                self.tokens.len() - 1
            ),
        ))
    }

    fn sense(&self, i: usize) -> Result<Sense, ParseError> {
        let t = self.token(i)?;
        match t.text {
            "min" => Ok(Sense::Min),
            "max" => Ok(Sense::Max),
            other => Err(err(self.number, t.column, format!("expected min or max, found {other:?}"))),
        }
    }
}

impl<'a> Parser<'a> {
    fn next(&mut self, keyword: &str) -> Result<Line<'a>, ParseError> {
        let line = self
            .lines
            .next()
            .ok_or_else(|| err(self.last_line + 1, 1, format!("expected {keyword}, found end of file")))?;
        self.last_line = line.number;
        let head = &line.tokens[0];
        if head.text != keyword {
            return Err(err(line.number, head.column, format!("expected {keyword}, found {:?}", head.text)));
        }
        Ok(line)
    }
}

/// Parses the instance format. Errors carry 1-based line and column.
pub fn parse_instance(text: &str) -> Result<Problem, InstanceError> {
    let mut parser = Parser {
        lines: tokenize(text).into_iter(),
        last_line: 0,
    };

    let header = parser.next("BOIP")?;
    header.arity(2, "BOIP")?;
    if header.int(1)? != 1 {
        return Err(err(header.number, header.tokens[1].column, "unsupported format version").into());
    }

    let sense_line = parser.next("SENSE")?;
    sense_line.arity(3, "SENSE")?;
    let sense = [sense_line.sense(1)?, sense_line.sense(2)?];

    let vars = parser.next("VARS")?;
    vars.arity(2, "VARS")?;
    let n = vars.int(1)?;
    if n < 1 {
        return Err(err(vars.number, vars.tokens[1].column, "VARS must be at least 1").into());
    }
    let n = n as usize;

    let mut objectives: [Vec<i64>; 2] = [Vec::new(), Vec::new()];
    for (k, keyword) in ["OBJ1", "OBJ2"].into_iter().enumerate() {
        let line = parser.next(keyword)?;
        line.arity(n + 1, keyword)?;
        objectives[k] = (1..=n).map(|i| line.int(i)).collect::<Result<_, _>>()?;
    }

    let mut bounds = Vec::with_capacity(n);
    for j in 0..n {
        let line = parser.next("B")?;
        line.arity(4, "B")?;
        if line.int(1)? != j as i64 {
            return Err(err(line.number, line.tokens[1].column, format!("expected bounds for variable {j}")).into());
        }
        let (lo, hi) = (line.int(2)?, line.int(3)?);
        if lo > hi {
            return Err(err(line.number, line.tokens[2].column, format!("empty bound interval [{lo}, {hi}]")).into());
        }
        bounds.push((lo, hi));
    }

    let count = parser.next("CONSTRAINTS")?;
    count.arity(2, "CONSTRAINTS")?;
    let m = count.int(1)?;
    if m < 0 {
        return Err(err(count.number, count.tokens[1].column, "CONSTRAINTS must be non-negative").into());
    }
    let mut constraints = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let line = parser.next("ROW")?;
        line.arity(n + 3, "ROW")?;
        let coeffs = (1..=n).map(|i| line.int(i)).collect::<Result<Vec<_>, _>>()?;
        let op = line.token(n + 1)?;
        let relation = match op.text {
            "<=" => Relation::Le,
            ">=" => Relation::Ge,
            "=" => Relation::Eq,
            other => return Err(err(line.number, op.column, format!("expected <=, >= or =, found {other:?}")).into()),
        };
        constraints.push(LinearConstraint::new(coeffs, relation, line.int(n + 2)?));
    }

    if let Some(extra) = parser.lines.next() {
        return Err(err(extra.number, extra.tokens[0].column, "unexpected content after the last ROW").into());
    }
    Ok(Problem::new(objectives, sense, constraints, bounds)?)
}

/// Renders a front in the result format.
pub fn format_front(p: &Problem, front: &ParetoSet) -> String {
    let mut rows: Vec<_> = front
        .iter()
        .map(|s| (p.to_user_outcome(s.outcome), &s.assignment))
        .collect();
    rows.sort_by_key(|(o, _)| o.f1);
    let mut out = String::new();
    for (o, x) in rows {
        write!(out, "{} {} :", o.f1, o.f2).unwrap();
        join_ints(&mut out, x);
        out.push('\n');
    }
    out
}
