//! The bound functions `g` and `h` and generators for the extremal matrices.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::int_matrix;
use crate::matrix::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("argument {0} is outside the domain x >= 1")]
    Domain(i64),
    #[error("{family} needs {requirement}, got {got}")]
    Parameter { family: &'static str, requirement: &'static str, got: i64 },
    #[error("m = 5 is attained by the sporadic 5x10 matrix, not the bipartite family")]
    UseSporadic,
    #[error("sporadic 5x5 variant must be 1 or 2, got {0}")]
    Variant(u8),
}

/// `g(x) = (x + 1)^2 / 4`.
pub fn g(x: i64) -> Result<Ratio<i64>, FamilyError> {
    if x < 1 {
        return Err(FamilyError::Domain(x));
    }
    Ok(Ratio::new((x + 1) * (x + 1), 4))
}

/// `h(x) = floor(g(x))`, except `h(5) = 10`.
pub fn h(x: i64) -> Result<i64, FamilyError> {
    if x < 1 {
        return Err(FamilyError::Domain(x));
    }
    if x == 5 {
        return Ok(10);
    }
    Ok((x + 1) * (x + 1) / 4)
}

/// Outcome of one exhaustive inequality sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub part: u8,
    pub statement: &'static str,
    /// Inclusive ranges checked for `x` and `y`.
    pub x_range: (i64, i64),
    pub y_range: (i64, i64),
    pub found: BTreeSet<(i64, i64)>,
    pub expected: BTreeSet<(i64, i64)>,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Checks the four superadditivity inequalities for `h` over `x, y <= max`
/// and compares the violations with the known exception lists.
pub fn verify_extralemma(max: i64) -> Result<[BoundReport; 4], FamilyError> {
    if max < 10 {
        return Err(FamilyError::Parameter { family: "verify_extralemma", requirement: "max >= 10", got: max });
    }
    type Check = fn(i64, i64) -> Result<bool, FamilyError>;
    /// Part, statement, least x, least y, test, expected exceptions.
    type Part = (u8, &'static str, i64, i64, Check, &'static [(i64, i64)]);
    let parts: [Part; 4] = [
        (1, "h(x) + h(y) <= h(x+y)", 1, 1, |x, y| Ok(h(x)? + h(y)? <= h(x + y)?), &[]),
        (2, "h(x) + h(y+1) <= h(x+y)", 2, 1, |x, y| Ok(h(x)? + h(y + 1)? <= h(x + y)?), &[]),
        (3, "h(x) + h(y+2) <= h(x+y)", 3, 1, |x, y| Ok(h(x)? + h(y + 2)? <= h(x + y)?), &[(3, 1), (3, 3), (5, 1)]),
        (4, "h(x+1) + h(y+1) <= h(x+y)", 2, 2, |x, y| Ok(h(x + 1)? + h(y + 1)? <= h(x + y)?), &[(2, 2), (2, 4), (4, 2)]),
    ];
    let mut reports = Vec::with_capacity(4);
    for (part, statement, x0, y0, holds, expected) in parts {
        let mut found = BTreeSet::new();
        for x in x0..=max {
            for y in y0..=max {
                if !holds(x, y)? {
                    found.insert((x, y));
                }
            }
        }
        let expected: BTreeSet<_> = expected.iter().copied().collect();
        reports.push(BoundReport {
            part,
            statement,
            x_range: (x0, max),
            y_range: (y0, max),
            matches: found == expected,
            found,
            expected,
        });
    }
    Ok(reports.try_into().expect("four parts"))
}

/// Heller's extremal family: incidence columns of the complete digraph on
/// `m` nodes (arcs `(i, j)` in lexicographic order, tail `-1`, head `+1`),
/// then `I`, then `-I`, then the zero column.
pub fn heller_family(m: usize) -> IntMatrix {
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(m * m + m + 1);
    for (i, j) in (0..m).cartesian_product(0..m).filter(|(i, j)| i != j) {
        let mut c = vec![0; m];
        c[i] = -1;
        c[j] = 1;
        cols.push(c);
    }
    for sign in [1, -1] {
        for i in 0..m {
            let mut c = vec![0; m];
            c[i] = sign;
            cols.push(c);
        }
    }
    cols.push(vec![0; m]);
    IntMatrix::from_columns(m, &cols).expect("columns have length m")
}

/// `(M | -M | 0)`.
pub fn symmetric_closure(m: &IntMatrix) -> IntMatrix {
    let neg = m.neg().expect("entries of a TU candidate are small");
    m.hconcat(&neg)
        .and_then(|x| x.hconcat(&IntMatrix::zeros(m.rows(), 1)))
        .expect("same row count")
}

/// Incidence matrix of `K_{a,b}` with the last `B` row removed, where
/// `a = b = (m+1)/2` for odd `m` and `(a, b) = (m/2, m/2 + 1)` for even `m`.
/// Rows are the `A` vertices then the remaining `B` vertices; columns are the
/// edges `(i, j)` in lexicographic order.
pub fn bipartite_extremal(m: usize) -> Result<IntMatrix, FamilyError> {
    if m == 0 {
        return Err(FamilyError::Parameter { family: "bipartite_extremal", requirement: "m >= 1", got: 0 });
    }
    if m == 5 {
        return Err(FamilyError::UseSporadic);
    }
    let (a, b) = if m % 2 == 1 { (m.div_ceil(2), m.div_ceil(2)) } else { (m / 2, m / 2 + 1) };
    let cols: Vec<Vec<i64>> = (0..a)
        .cartesian_product(0..b)
        .map(|(i, j)| {
            let mut c = vec![0; m];
            c[i] = 1;
            if j + 1 < b {
                c[a + j] = 1;
            }
            c
        })
        .collect();
    Ok(IntMatrix::from_columns(m, &cols).expect("columns have length m"))
}

/// The TU polytopal 5x10 matrix attaining 10 columns for 5 rows.
pub fn sporadic_5x10() -> IntMatrix {
    int_matrix![
        [1, 0, 0, 0, 0, 1, 0, 0, 1, -1],
        [0, 1, 0, 0, 0, -1, 1, 0, 0, 1],
        [0, 0, 1, 0, 0, 1, -1, 1, 0, 0],
        [0, 0, 0, 1, 0, 0, 1, -1, 1, 0],
        [0, 0, 0, 0, 1, 0, 0, 1, -1, 1],
    ]
}

/// The two 5x5 matrices defining the sporadic class.
pub fn sporadic_5x5(variant: u8) -> Result<IntMatrix, FamilyError> {
    match variant {
        1 => Ok(int_matrix![
            [-1, 1, 0, 0, 1],
            [1, -1, 1, 0, 0],
            [0, 1, -1, 1, 0],
            [0, 0, 1, -1, 1],
            [1, 0, 0, 1, -1],
        ]),
        2 => Ok(int_matrix![
            [1, 1, 0, 0, 1],
            [0, 1, 1, 0, 1],
            [0, 0, 1, 1, 1],
            [1, 0, 0, 1, 1],
            [1, 1, 1, 1, 1],
        ]),
        v => Err(FamilyError::Variant(v)),
    }
}

/// Vertex matrix of the 4-dimensional unimodular 0/1-polytope with 10 vertices.
pub fn ex4_matrix() -> IntMatrix {
    int_matrix![
        [0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
        [0, 1, 1, 1, 0, 0, 0, 1, 1, 1],
        [1, 0, 1, 1, 0, 1, 1, 0, 0, 1],
        [1, 1, 0, 1, 1, 0, 1, 0, 1, 0],
    ]
}

/// Equivalence to one of the two sporadic matrices under row and column
/// permutations and `±1` scaling of rows and columns.
pub fn is_sporadic(m: &IntMatrix) -> bool {
    if m.shape() != (5, 5) || !m.is_ternary() {
        return false;
    }
    [1, 2].into_iter().any(|v| signed_permutation_equivalent(m, &sporadic_5x5(v).expect("valid variant")))
}

/// Searches row permutations, then column permutations consistent with the
/// zero pattern, then solves for the row/column signs.
pub fn signed_permutation_equivalent(m: &IntMatrix, target: &IntMatrix) -> bool {
    let n = m.rows();
    if m.shape() != target.shape() || !m.is_square() {
        return false;
    }
    let count = |x: &IntMatrix, i: usize| x.row(i).iter().filter(|&&v| v != 0).count();
    for perm in (0..n).permutations(n) {
        // Row i of the target corresponds to row perm[i] of m.
        if (0..n).any(|i| count(m, perm[i]) != count(target, i)) {
            continue;
        }
        let mut col_map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if match_columns(m, target, &perm, &mut col_map, &mut used, 0) {
            return true;
        }
    }
    false
}

fn match_columns(
    m: &IntMatrix,
    target: &IntMatrix,
    perm: &[usize],
    col_map: &mut [usize],
    used: &mut [bool],
    j: usize,
) -> bool {
    let n = m.cols();
    if j == n {
        return signs_consistent(m, target, perm, col_map);
    }
    for c in 0..n {
        if used[c] {
            continue;
        }
        if (0..n).any(|i| (m.get(perm[i], c) != 0) != (target.get(i, j) != 0)) {
            continue;
        }
        used[c] = true;
        col_map[j] = c;
        if match_columns(m, target, perm, col_map, used, j + 1) {
            return true;
        }
        used[c] = false;
    }
    false
}

/// Finds `r_i, c_j in {±1}` with `r_i c_j m[perm i][col j] = target[i][j]`
/// by propagating signs along the bipartite support graph.
fn signs_consistent(m: &IntMatrix, target: &IntMatrix, perm: &[usize], col_map: &[usize]) -> bool {
    let n = m.rows();
    let mut row_sign = vec![0i64; n];
    let mut col_sign = vec![0i64; n];
    for start in 0..n {
        if row_sign[start] != 0 {
            continue;
        }
        row_sign[start] = 1;
        let mut stack = vec![(true, start)];
        while let Some((is_row, k)) = stack.pop() {
            for other in 0..n {
                let (i, j) = if is_row { (k, other) } else { (other, k) };
                let a = m.get(perm[i], col_map[j]);
                if a == 0 {
                    continue;
                }
                let ratio = target.get(i, j) * a;
                if is_row {
                    let want = ratio * row_sign[i];
                    if col_sign[j] == 0 {
                        col_sign[j] = want;
                        stack.push((false, j));
                    } else if col_sign[j] != want {
                        return false;
                    }
                } else {
                    let want = ratio * col_sign[j];
                    if row_sign[i] == 0 {
                        row_sign[i] = want;
                        stack.push((true, i));
                    } else if row_sign[i] != want {
                        return false;
                    }
                }
            }
        }
    }
    true
}
