//! Integer linear systems via column Hermite reduction.
//!
//! `A U = H` with `U` unimodular and `H` in column echelon form (pivot rows
//! strictly increasing, pivots positive). The last `cols - rank` columns of
//! `U` span the integer kernel of `A`.

use crate::matrix::{add128, mul128, sub128, to_i64, IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnHermite {
    /// Echelon form `A U`.
    pub h: IntMatrix,
    /// Unimodular transform.
    pub u: IntMatrix,
    /// `pivots[k]` is the row holding the pivot of column `k`.
    pub pivots: Vec<usize>,
}

impl ColumnHermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegerSolution {
    /// No rational solution.
    Inconsistent,
    /// Rational solutions exist but none is integral.
    NotIntegral,
    Solution {
        /// Canonical representative of the solution coset.
        particular: Vec<i64>,
        /// Kernel basis in row echelon form with positive pivots.
        kernel: Vec<Vec<i64>>,
    },
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Column-major working copy so column operations stay contiguous.
struct Cols {
    rows: usize,
    data: Vec<Vec<i128>>,
}

impl Cols {
    fn from_matrix(m: &IntMatrix) -> Self {
        Cols { rows: m.rows(), data: (0..m.cols()).map(|j| m.column(j).into_iter().map(i128::from).collect()).collect() }
    }

    fn identity(n: usize) -> Self {
        let data = (0..n)
            .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
            .collect();
        Cols { rows: n, data }
    }

    /// `(c_a, c_b) <- (p c_a + q c_b, r c_a + s c_b)`.
    fn combine(&mut self, a: usize, b: usize, p: i128, q: i128, r: i128, s: i128) -> Result<(), MatrixError> {
        for i in 0..self.rows {
            let x = self.data[a][i];
            let y = self.data[b][i];
            self.data[a][i] = add128(mul128(p, x)?, mul128(q, y)?)?;
            self.data[b][i] = add128(mul128(r, x)?, mul128(s, y)?)?;
        }
        Ok(())
    }

    fn negate(&mut self, a: usize) {
        for v in &mut self.data[a] {
            *v = -*v;
        }
    }

    /// `c_a <- c_a - k c_b`.
    fn sub_multiple(&mut self, a: usize, b: usize, k: i128) -> Result<(), MatrixError> {
        for i in 0..self.rows {
            self.data[a][i] = sub128(self.data[a][i], mul128(k, self.data[b][i])?)?;
        }
        Ok(())
    }

    fn to_matrix(&self) -> Result<IntMatrix, MatrixError> {
        let cols: Vec<Vec<i64>> = self
            .data
            .iter()
            .map(|c| c.iter().map(|&v| to_i64(v)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        IntMatrix::from_columns(self.rows, &cols)
    }
}

/// Column Hermite form with entries left of each pivot reduced into `[0, pivot)`.
pub fn column_hermite(a: &IntMatrix) -> Result<ColumnHermite, MatrixError> {
    let n = a.cols();
    let mut h = Cols::from_matrix(a);
    let mut u = Cols::identity(n);
    let mut pivots = Vec::new();
    let mut k = 0;
    for i in 0..a.rows() {
        if k == n {
            break;
        }
        for j in k + 1..n {
            let y = h.data[j][i];
            if y == 0 {
                continue;
            }
            let x = h.data[k][i];
            let (g, s, t) = egcd(x, y);
            let (p, q) = (x / g, y / g);
            // [[s, -q], [t, p]] has determinant s p + t q = 1.
            h.combine(k, j, s, t, -q, p)?;
            u.combine(k, j, s, t, -q, p)?;
        }
        if h.data[k][i] == 0 {
            continue;
        }
        if h.data[k][i] < 0 {
            h.negate(k);
            u.negate(k);
        }
        let pivot = h.data[k][i];
        for j in 0..k {
            let q = h.data[j][i].div_euclid(pivot);
            if q != 0 {
                h.sub_multiple(j, k, q)?;
                u.sub_multiple(j, k, q)?;
            }
        }
        pivots.push(i);
        k += 1;
    }
    Ok(ColumnHermite { h: h.to_matrix()?, u: u.to_matrix()?, pivots })
}

/// Basis of `{x in Z^n : A x = 0}` in row echelon form with positive pivots.
pub fn integer_kernel(a: &IntMatrix) -> Result<Vec<Vec<i64>>, MatrixError> {
    let hnf = column_hermite(a)?;
    let basis: Vec<Vec<i64>> = (hnf.rank()..a.cols()).map(|j| hnf.u.column(j)).collect();
    echelon_rows(&basis, a.cols())
}

/// Row echelon basis (positive pivots, entries above pivots reduced) of the
/// lattice spanned by `vectors` in `Z^dim`.
pub fn echelon_rows(vectors: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>, MatrixError> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let m = IntMatrix::from_columns(dim, vectors)?;
    // Columns of the Hermite form are the echelon rows.
    let hnf = column_hermite(&m)?;
    Ok((0..hnf.rank()).map(|k| hnf.h.column(k)).collect())
}

/// Leading nonzero position of a vector.
fn leading(v: &[i64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

/// Reduces `x` modulo the lattice spanned by an echelon basis so that each
/// pivot coordinate lands in `[0, pivot)`. The result depends only on the
/// coset of `x`.
pub fn reduce_modulo(x: &[i64], echelon: &[Vec<i64>]) -> Result<Vec<i64>, MatrixError> {
    let mut out: Vec<i128> = x.iter().map(|&v| v as i128).collect();
    for row in echelon {
        let Some(p) = leading(row) else { continue };
        let pivot = row[p] as i128;
        let q = out[p].div_euclid(pivot);
        if q != 0 {
            for (o, &r) in out.iter_mut().zip(row) {
                *o = sub128(*o, mul128(q, r as i128)?)?;
            }
        }
    }
    out.into_iter().map(to_i64).collect()
}

/// Solves `A x = b` over the integers.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Result<IntegerSolution, MatrixError> {
    if b.len() != a.rows() {
        return Err(MatrixError::DimensionMismatch(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    // Rational consistency first: rank(A) = rank(A | b).
    let augmented = a.push_column(b)?;
    if augmented.rank()? != a.rank()? {
        return Ok(IntegerSolution::Inconsistent);
    }
    let hnf = column_hermite(a)?;
    let rank = hnf.rank();
    let mut y = vec![0i128; a.cols()];
    for (k, &row) in hnf.pivots.iter().enumerate() {
        let mut rest = b[row] as i128;
        for (j, yj) in y.iter().enumerate().take(k) {
            rest = sub128(rest, mul128(hnf.h.get(row, j) as i128, *yj)?)?;
        }
        let pivot = hnf.h.get(row, k) as i128;
        if rest % pivot != 0 {
            return Ok(IntegerSolution::NotIntegral);
        }
        y[k] = rest / pivot;
    }
    let mut x = vec![0i128; a.cols()];
    for (i, xi) in x.iter_mut().enumerate() {
        for (k, yk) in y.iter().enumerate().take(rank) {
            *xi = add128(*xi, mul128(hnf.u.get(i, k) as i128, *yk)?)?;
        }
    }
    let x: Vec<i64> = x.into_iter().map(to_i64).collect::<Result<_, _>>()?;
    let kernel_vectors: Vec<Vec<i64>> = (rank..a.cols()).map(|j| hnf.u.column(j)).collect();
    let kernel = echelon_rows(&kernel_vectors, a.cols())?;
    let particular = reduce_modulo(&x, &kernel)?;
    Ok(IntegerSolution::Solution { particular, kernel })
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(r: &IntMatrix) -> Result<Option<IntMatrix>, MatrixError> {
    let det = r.determinant()?;
    if det.abs() != 1 {
        return Ok(None);
    }
    let n = r.rows();
    let mut columns = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<i64> = (0..n).map(|i| i64::from(i == j)).collect();
        match solve_integer(r, &e)? {
            IntegerSolution::Solution { particular, .. } => columns.push(particular),
            _ => return Ok(None),
        }
    }
    IntMatrix::from_columns(n, &columns).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int_matrix;
    use proptest::prelude::*;

    #[test]
    fn hermite_is_echelon_and_unimodular() {
        let a = int_matrix![[2, 4, 6], [1, 3, 5]];
        let hnf = column_hermite(&a).unwrap();
        assert_eq!(a.mul(&hnf.u).unwrap(), hnf.h);
        assert_eq!(hnf.u.determinant().unwrap().abs(), 1);
        assert_eq!(hnf.rank(), 2);
        assert_eq!(hnf.h.column(2), vec![0, 0]);
    }

    #[test]
    fn solve_distinguishes_outcomes() {
        let a = int_matrix![[2]];
        assert_eq!(solve_integer(&a, &[1]).unwrap(), IntegerSolution::NotIntegral);
        assert!(matches!(solve_integer(&a, &[4]).unwrap(), IntegerSolution::Solution { ref particular, .. } if particular == &vec![2]));
        let a = int_matrix![[1, 1], [1, 1]];
        assert_eq!(solve_integer(&a, &[1, 2]).unwrap(), IntegerSolution::Inconsistent);
        match solve_integer(&a, &[3, 3]).unwrap() {
            IntegerSolution::Solution { particular, kernel } => {
                assert_eq!(a.apply(&particular).unwrap(), vec![3, 3]);
                assert_eq!(kernel.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert!(integer_kernel(&IntMatrix::identity(3)).unwrap().is_empty());
        let k = integer_kernel(&int_matrix![[1, 1, 1]]).unwrap();
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn inverse_of_unimodular() {
        let r = int_matrix![[0, 1, 0], [0, 0, 1], [1, 1, 1]];
        let inv = unimodular_inverse(&r).unwrap().unwrap();
        assert_eq!(r.mul(&inv).unwrap(), IntMatrix::identity(3));
        assert_eq!(unimodular_inverse(&int_matrix![[2]]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn particular_solution_is_canonical(
            r in 1usize..4, c in 1usize..5,
            data in prop::collection::vec(-2i64..=2, 20),
            x in prop::collection::vec(-3i64..=3, 5),
            shift in prop::collection::vec(-3i64..=3, 5),
        ) {
            let a = IntMatrix::new(r, c, data[..r * c].to_vec()).unwrap();
            let x = &x[..c];
            let b = a.apply(x).unwrap();
            let IntegerSolution::Solution { particular, kernel } = solve_integer(&a, &b).unwrap() else {
                return Err(TestCaseError::fail("expected a solution"));
            };
            prop_assert_eq!(a.apply(&particular).unwrap(), b.clone());
            for k in &kernel {
                prop_assert!(a.apply(k).unwrap().iter().all(|&v| v == 0));
            }
            // Any other solution reduces to the same representative.
            let mut other = x.to_vec();
            for (coef, k) in shift.iter().zip(&kernel) {
                for (o, kv) in other.iter_mut().zip(k) {
                    *o += coef * kv;
                }
            }
            prop_assert_eq!(reduce_modulo(&other, &kernel).unwrap(), particular);
        }
    }
}
