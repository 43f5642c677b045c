//! Exact feasibility of `A x = b, x >= 0` by the two-phase simplex method
//! (phase one only) over checked rationals, with Bland's rule.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::matrix::{IntMatrix, MatrixError};

type Q = Ratio<i128>;

fn sub(a: &Q, b: &Q) -> Result<Q, MatrixError> {
    a.checked_sub(b).ok_or(MatrixError::Overflow)
}

fn mul(a: &Q, b: &Q) -> Result<Q, MatrixError> {
    a.checked_mul(b).ok_or(MatrixError::Overflow)
}

fn div(a: &Q, b: &Q) -> Result<Q, MatrixError> {
    a.checked_div(b).ok_or(MatrixError::Overflow)
}

fn add(a: &Q, b: &Q) -> Result<Q, MatrixError> {
    a.checked_add(b).ok_or(MatrixError::Overflow)
}

/// Returns a nonnegative rational solution of `A x = b` if one exists.
pub fn feasible_point(a: &IntMatrix, b: &[i64]) -> Result<Option<Vec<Ratio<i128>>>, MatrixError> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(MatrixError::DimensionMismatch(format!("{} constraints, {} right-hand sides", m, b.len())));
    }
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = if b[i] < 0 { -1i128 } else { 1 };
        let mut row = Vec::with_capacity(width);
        row.extend((0..n).map(|j| Q::from_integer(flip * a.get(i, j) as i128)));
        row.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        row.push(Q::from_integer(flip * b[i] as i128));
        t.push(row);
    }
    // Phase-one objective row: reduced costs of sum of artificials.
    let mut obj = vec![Q::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] = sub(&obj[j], &row[j])?;
        }
        obj[width - 1] = sub(&obj[width - 1], &row[width - 1])?;
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = div(&t[i][width - 1], &t[i][enter])?;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always has a positive entry.
        let Some((row, _)) = leave else { break };
        pivot(&mut t, row, enter)?;
        basis[row] = enter;
    }

    if !t[m][width - 1].is_zero() {
        return Ok(None);
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][width - 1];
        }
    }
    Ok(Some(x))
}

fn pivot(t: &mut [Vec<Q>], row: usize, col: usize) -> Result<(), MatrixError> {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v = div(v, &p)?;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let factor = r[col];
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            *v = sub(v, &mul(&factor, pv)?)?;
        }
    }
    Ok(())
}

/// True when `point` is a convex combination of the columns of `points`.
pub fn in_convex_hull(points: &IntMatrix, point: &[i64]) -> Result<bool, MatrixError> {
    if points.cols() == 0 {
        return Ok(false);
    }
    let ones = vec![1i64; points.cols()];
    let system = points.push_row(&ones)?;
    let mut rhs = point.to_vec();
    rhs.push(1);
    Ok(feasible_point(&system, &rhs)?.is_some())
}

/// Sum of a rational vector, used by tests to check convex weights.
pub fn rational_sum(v: &[Ratio<i128>]) -> Result<Ratio<i128>, MatrixError> {
    v.iter().try_fold(Q::zero(), |acc, x| add(&acc, x))
}
