//! Row-major scan over every integer point of a problem's variable box.

use crate::ipsolve::SolveError;
use crate::model::{LinearConstraint, OutcomeVector, Problem};

/// Calls `visit` for each point of the box satisfying the problem's
/// constraints and `extra` rows, in row-major order (last variable fastest).
/// Refuses boxes with more than `limit` points.
pub(crate) fn for_each_feasible(
    p: &Problem,
    extra: &[LinearConstraint],
    limit: u128,
    mut visit: impl FnMut(&[i64], OutcomeVector),
) -> Result<(), SolveError> {
    let points = p.lattice_size();
    if points > limit {
        return Err(SolveError::EnumerationLimit { points, limit });
    }
    let bounds = p.bounds();
    let n = p.num_vars();
    let rows: Vec<&LinearConstraint> = p.constraints().iter().chain(extra).collect();
    let objectives = [p.objective(0), p.objective(1)];

    // |activity| ≤ Σ|a_j|·max(|lo_j|,|hi_j|); checking that bound once keeps
    // the incremental updates below overflow-free.
    let reach: Vec<i128> = bounds
        .iter()
        .map(|&(lo, hi)| (lo as i128).abs().max((hi as i128).abs()))
        .collect();
    for coeffs in rows.iter().map(|r| r.coeffs.as_slice()).chain(objectives) {
        coeffs.iter().zip(&reach).try_fold(0i128, |acc, (&a, &r)| {
            (a as i128)
                .checked_mul(r)
                .and_then(|t| acc.checked_add(t.abs()))
                .ok_or(SolveError::Overflow)
        })?;
    }

    let mut x: Vec<i64> = bounds.iter().map(|&(lo, _)| lo).collect();
    let activity_at = |coeffs: &[i64], x: &[i64]| -> i128 {
        coeffs.iter().zip(x).map(|(&a, &v)| a as i128 * v as i128).sum()
    };
    let mut act: Vec<i128> = rows.iter().map(|r| activity_at(&r.coeffs, &x)).collect();
    let mut obj = [activity_at(objectives[0], &x), activity_at(objectives[1], &x)];

    loop {
        let feasible = rows
            .iter()
            .zip(&act)
            .all(|(r, &a)| r.relation.holds(a, r.rhs as i128));
        if feasible {
            let outcome = OutcomeVector::new(
                i64::try_from(obj[0]).map_err(|_| SolveError::Overflow)?,
                i64::try_from(obj[1]).map_err(|_| SolveError::Overflow)?,
            );
            visit(&x, outcome);
        }

        // odometer step
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            let (lo, hi) = bounds[j];
            if x[j] < hi {
                x[j] += 1;
                for (a, r) in act.iter_mut().zip(&rows) {
                    *a += r.coeffs[j] as i128;
                }
                for (o, c) in obj.iter_mut().zip(objectives) {
                    *o += c[j] as i128;
                }
                break;
            }
            let span = hi as i128 - lo as i128;
            x[j] = lo;
            for (a, r) in act.iter_mut().zip(&rows) {
                *a -= r.coeffs[j] as i128 * span;
            }
            for (o, c) in obj.iter_mut().zip(objectives) {
                *o -= c[j] as i128 * span;
            }
        }
    }
}
