//! Bounded-variable primal simplex over exact rationals.
//!
//! Two phases with artificial variables, Bland's smallest-index rule for both
//! the entering and the leaving variable. Nonbasic variables sit at one of
//! their bounds; slack variables have an infinite upper bound.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use super::SolveError;
use crate::model::{LinearConstraint, Relation};

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    /// Only reachable with an unbounded box, which `Problem` forbids.
    Unbounded,
}

// Integral operands skip the gcd work inside `Ratio`; totally unimodular
// tableaus never leave that path.

fn integers(a: &Rational, b: &Rational) -> Option<(i128, i128)> {
    (a.is_integer() && b.is_integer()).then(|| (*a.numer(), *b.numer()))
}

fn add(a: &Rational, b: &Rational) -> Result<Rational, SolveError> {
    match integers(a, b) {
        Some((x, y)) => x.checked_add(y).map(Rational::from_integer),
        None => a.checked_add(b),
    }
    .ok_or(SolveError::Overflow)
}

fn sub(a: &Rational, b: &Rational) -> Result<Rational, SolveError> {
    match integers(a, b) {
        Some((x, y)) => x.checked_sub(y).map(Rational::from_integer),
        None => a.checked_sub(b),
    }
    .ok_or(SolveError::Overflow)
}

fn mul(a: &Rational, b: &Rational) -> Result<Rational, SolveError> {
    match integers(a, b) {
        Some((x, y)) => x.checked_mul(y).map(Rational::from_integer),
        None => a.checked_mul(b),
    }
    .ok_or(SolveError::Overflow)
}

fn div(a: &Rational, b: &Rational) -> Result<Rational, SolveError> {
    match integers(a, b) {
        Some((x, y)) if y != 0 && x % y == 0 => x.checked_div(y).map(Rational::from_integer),
        _ => a.checked_div(b),
    }
    .ok_or(SolveError::Overflow)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

struct Tableau {
    /// B⁻¹A, one dense row per constraint.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    value: Vec<Rational>,
    lo: Vec<Rational>,
    hi: Vec<Option<Rational>>,
    reduced: Vec<Rational>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.value.len()
    }

    fn price(&mut self, cost: &[Rational]) -> Result<(), SolveError> {
        let mut reduced = cost.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in reduced.iter_mut().zip(row) {
                if !a.is_zero() {
                    *d = sub(d, &mul(cb, a)?)?;
                }
            }
        }
        self.reduced = reduced;
        Ok(())
    }

    fn entering(&self) -> Option<(usize, bool)> {
        (0..self.ncols()).find_map(|j| {
            if self.is_basic[j] {
                return None;
            }
            let d = &self.reduced[j];
            let below_hi = self.hi[j].as_ref().is_none_or(|h| self.value[j] < *h);
            let above_lo = self.value[j] > self.lo[j];
            if d.is_negative() && below_hi {
                Some((j, true))
            } else if d.is_positive() && above_lo {
                Some((j, false))
            } else {
                None
            }
        })
    }

    fn run(&mut self) -> Result<Phase, SolveError> {
        while let Some((q, increase)) = self.entering() {
            // Ratio test. Rows tie-break on the smallest basic index.
            let mut best: Option<(Rational, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let alpha = &row[q];
                if alpha.is_zero() {
                    continue;
                }
                let b = self.basis[i];
                // basic moves by -alpha per unit of entering movement (sign flipped when decreasing)
                let basic_decreases = alpha.is_positive() == increase;
                let limit = if basic_decreases {
                    div(&sub(&self.value[b], &self.lo[b])?, &alpha.abs())?
                } else {
                    match &self.hi[b] {
                        Some(h) => div(&sub(h, &self.value[b])?, &alpha.abs())?,
                        None => continue,
                    }
                };
                let better = match &best {
                    None => true,
                    Some((t, r)) => limit < *t || (limit == *t && b < self.basis[*r]),
                };
                if better {
                    best = Some((limit, i));
                }
            }
            let flip = self.hi[q].as_ref().map(|h| sub(h, &self.lo[q])).transpose()?;
            let (step, leave) = match (flip, best) {
                (None, None) => return Ok(Phase::Unbounded),
                (Some(f), None) => (f, None),
                (None, Some((t, r))) => (t, Some(r)),
                (Some(f), Some((t, r))) => {
                    if f <= t {
                        (f, None)
                    } else {
                        (t, Some(r))
                    }
                }
            };

            let signed = if increase { step } else { -step };
            if !step.is_zero() {
                self.value[q] = add(&self.value[q], &signed)?;
                for i in 0..self.rows.len() {
                    let alpha = &self.rows[i][q];
                    if alpha.is_zero() {
                        continue;
                    }
                    let b = self.basis[i];
                    self.value[b] = sub(&self.value[b], &mul(&signed, alpha)?)?;
                }
            }
            match leave {
                None => {
                    // bound flip, snap exactly onto the opposite bound
                    self.value[q] = if increase {
                        self.hi[q].expect("flip needs a finite bound")
                    } else {
                        self.lo[q]
                    };
                }
                Some(r) => {
                    let b = self.basis[r];
                    self.value[b] = if alpha_sign_decreases(&self.rows[r][q], increase) {
                        self.lo[b]
                    } else {
                        self.hi[b].expect("leaving at an infinite bound")
                    };
                    self.pivot(r, q)?;
                }
            }
        }
        Ok(Phase::Optimal)
    }

    fn pivot(&mut self, r: usize, q: usize) -> Result<(), SolveError> {
        let piv = self.rows[r][q];
        if !piv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a = div(a, &piv)?;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[q].is_zero() {
                continue;
            }
            let f = row[q];
            for &j in &nz {
                row[j] = sub(&row[j], &mul(&f, &pivot_row[j])?)?;
            }
        }
        let f = self.reduced[q];
        if !f.is_zero() {
            for &j in &nz {
                self.reduced[j] = sub(&self.reduced[j], &mul(&f, &pivot_row[j])?)?;
            }
        }
        self.rows[r] = pivot_row;
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        Ok(())
    }
}

fn alpha_sign_decreases(alpha: &Rational, increase: bool) -> bool {
    alpha.is_positive() == increase
}

/// Minimises `objective · x` subject to `rows` and the box `bounds`.
pub fn solve_lp(
    rows: &[LinearConstraint],
    objective: &[i64],
    bounds: &[(i64, i64)],
) -> Result<LpOutcome, SolveError> {
    let n = bounds.len();
    if objective.len() != n {
        return Err(SolveError::DimensionMismatch {
            expected: n,
            found: objective.len(),
        });
    }
    if let Some(r) = rows.iter().find(|r| r.coeffs.len() != n) {
        return Err(SolveError::DimensionMismatch {
            expected: n,
            found: r.coeffs.len(),
        });
    }
    if bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(LpOutcome::Infeasible);
    }

    let m = rows.len();
    let num_slacks = rows.iter().filter(|r| r.relation != Relation::Eq).count();

    // residual r_i = b_i - a_i·lo decides which column starts basic in row i
    let mut residual = Vec::with_capacity(m);
    for row in rows {
        let mut act: i128 = 0;
        for (&a, &(lo, _)) in row.coeffs.iter().zip(bounds) {
            act = act
                .checked_add((a as i128) * (lo as i128))
                .ok_or(SolveError::Overflow)?;
        }
        residual.push((row.rhs as i128).checked_sub(act).ok_or(SolveError::Overflow)?);
    }
    let needs_artificial: Vec<bool> = rows
        .iter()
        .zip(&residual)
        .map(|(row, &r)| match row.relation {
            Relation::Le => r < 0,
            Relation::Ge => r > 0,
            Relation::Eq => true,
        })
        .collect();
    let num_art = needs_artificial.iter().filter(|&&a| a).count();
    let ncols = n + num_slacks + num_art;

    let mut lo: Vec<Rational> = bounds.iter().map(|&(l, _)| int(l)).collect();
    let mut hi: Vec<Option<Rational>> = bounds.iter().map(|&(_, h)| Some(int(h))).collect();
    lo.resize(ncols, Rational::zero());
    hi.resize(ncols, None);
    let mut value = lo.clone();

    let mut table = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = n;
    let mut art = n + num_slacks;
    for (i, row) in rows.iter().enumerate() {
        let r = residual[i];
        // flip so the basic column enters with coefficient +1 and a non-negative value
        let flip = match row.relation {
            Relation::Le => false,
            Relation::Ge => !needs_artificial[i],
            Relation::Eq => r < 0,
        } || (needs_artificial[i] && r < 0);
        let sign: i128 = if flip { -1 } else { 1 };
        let mut line = vec![Rational::zero(); ncols];
        for (j, &a) in row.coeffs.iter().enumerate() {
            line[j] = Rational::from_integer(sign * a as i128);
        }
        let slack_col = match row.relation {
            Relation::Le => {
                line[slack] = Rational::from_integer(sign);
                slack += 1;
                Some(slack - 1)
            }
            Relation::Ge => {
                line[slack] = Rational::from_integer(-sign);
                slack += 1;
                Some(slack - 1)
            }
            Relation::Eq => None,
        };
        let start = Rational::from_integer(r.abs());
        if needs_artificial[i] {
            line[art] = Rational::one();
            basis.push(art);
            value[art] = start;
            art += 1;
        } else {
            let s = slack_col.expect("equality rows always get an artificial");
            basis.push(s);
            value[s] = start;
        }
        table.push(line);
    }

    let mut is_basic = vec![false; ncols];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tab = Tableau {
        rows: table,
        basis,
        is_basic,
        value,
        lo,
        hi,
        reduced: Vec::new(),
    };

    if num_art > 0 {
        let mut cost = vec![Rational::zero(); ncols];
        for c in cost.iter_mut().skip(n + num_slacks) {
            *c = Rational::one();
        }
        tab.price(&cost)?;
        if let Phase::Unbounded = tab.run()? {
            unreachable!("phase one is bounded below by zero");
        }
        let infeasibility = tab.value[n + num_slacks..]
            .iter()
            .try_fold(Rational::zero(), |acc, v| add(&acc, v))?;
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // artificials are pinned to zero from here on
        for j in n + num_slacks..ncols {
            tab.hi[j] = Some(Rational::zero());
        }
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (c, &o) in cost.iter_mut().zip(objective) {
        *c = int(o);
    }
    tab.price(&cost)?;
    if let Phase::Unbounded = tab.run()? {
        return Ok(LpOutcome::Unbounded);
    }
    let point: Vec<Rational> = tab.value[..n].to_vec();
    let mut value = Rational::zero();
    for (x, &c) in point.iter().zip(objective) {
        if c != 0 {
            value = add(&value, &mul(x, &int(c))?)?;
        }
    }
    Ok(LpOutcome::Optimal { value, point })
}
