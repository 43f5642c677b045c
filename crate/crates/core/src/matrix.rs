//! Dense exact integer matrices.
//!
//! Entries are stored row-major as `i64`. Every operation that can grow
//! entries (products, determinants, elimination) runs on checked `i128`
//! intermediates and reports [`MatrixError::Overflow`] instead of wrapping.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("arithmetic overflow in exact integer computation")]
    Overflow,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("index set is not strictly increasing")]
    UnsortedIndexSet,
    #[error("minor selection uses {rows} rows but {cols} columns")]
    MinorShape { rows: usize, cols: usize },
}

/// Sorted, duplicate-free selection of row or column indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self, MatrixError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MatrixError::UnsortedIndexSet);
        }
        Ok(IndexSet(indices))
    }

    /// Checks the set against an exclusive upper bound.
    pub fn within(indices: Vec<usize>, bound: usize) -> Result<Self, MatrixError> {
        let set = IndexSet::new(indices)?;
        if let Some(&last) = set.0.last() {
            if last >= bound {
                return Err(MatrixError::IndexOutOfRange { index: last, bound });
            }
        }
        Ok(set)
    }

    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn single(i: usize) -> Self {
        IndexSet(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = MatrixError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl std::ops::Deref for IndexSet {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

pub(crate) fn to_i64(v: i128) -> Result<i64, MatrixError> {
    i64::try_from(v).map_err(|_| MatrixError::Overflow)
}

pub(crate) fn mul128(a: i128, b: i128) -> Result<i128, MatrixError> {
    a.checked_mul(b).ok_or(MatrixError::Overflow)
}

pub(crate) fn add128(a: i128, b: i128) -> Result<i128, MatrixError> {
    a.checked_add(b).ok_or(MatrixError::Overflow)
}

pub(crate) fn sub128(a: i128, b: i128) -> Result<i128, MatrixError> {
    a.checked_sub(b).ok_or(MatrixError::Overflow)
}

/// Dot product with overflow checking.
pub fn dot(a: &[i64], b: &[i64]) -> Result<i64, MatrixError> {
    if a.len() != b.len() {
        return Err(MatrixError::DimensionMismatch(format!(
            "dot product of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut acc: i128 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc = add128(acc, x as i128 * y as i128)?;
    }
    to_i64(acc)
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, MatrixError> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from equally long rows. An empty slice gives `0x0`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    /// Builds a `rows x columns.len()` matrix from column vectors.
    pub fn from_columns<C: AsRef<[i64]>>(rows: usize, columns: &[C]) -> Result<Self, MatrixError> {
        let cols = columns.len();
        let mut m = IntMatrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(MatrixError::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Size in the matroid sense: rows plus columns.
    pub fn size(&self) -> usize {
        self.rows + self.cols
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.cols).map(move |j| self.column(j))
    }

    pub fn row_vectors(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// True when every entry lies in {-1, 0, 1}.
    pub fn is_ternary(&self) -> bool {
        self.data.iter().all(|v| (-1..=1).contains(v))
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn neg(&self) -> Result<IntMatrix, MatrixError> {
        let data = self
            .data
            .iter()
            .map(|v| v.checked_neg().ok_or(MatrixError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// `(self | other)`.
    pub fn hconcat(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "horizontal concatenation of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(IntMatrix { rows: self.rows, cols, data })
    }

    /// `(self ; other)`.
    pub fn vconcat(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vertical concatenation of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(IntMatrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn push_column(&self, column: &[i64]) -> Result<IntMatrix, MatrixError> {
        self.hconcat(&IntMatrix::from_columns(self.rows, &[column])?)
    }

    pub fn push_row(&self, row: &[i64]) -> Result<IntMatrix, MatrixError> {
        if self.rows == 0 && self.cols == 0 {
            return IntMatrix::from_rows(&[row]);
        }
        self.vconcat(&IntMatrix::from_rows(&[row])?)
    }

    fn check_indices(idx: &[usize], bound: usize) -> Result<(), MatrixError> {
        match idx.iter().find(|&&i| i >= bound) {
            Some(&index) => Err(MatrixError::IndexOutOfRange { index, bound }),
            None => Ok(()),
        }
    }

    /// Submatrix on arbitrary (possibly repeated or unordered) index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<IntMatrix, MatrixError> {
        Self::check_indices(rows, self.rows)?;
        Self::check_indices(cols, self.cols)?;
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j));
            }
        }
        Ok(IntMatrix { rows: rows.len(), cols: cols.len(), data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<IntMatrix, MatrixError> {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<IntMatrix, MatrixError> {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Result<IntMatrix, MatrixError> {
        self.select(rows, cols)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc = add128(acc, self.get(i, k) as i128 * other.get(k, j) as i128)?;
                }
                out.data[i * other.cols + j] = to_i64(acc)?;
            }
        }
        Ok(out)
    }

    /// Evaluates the row covector `f` on every column: `f * self`.
    pub fn left_apply(&self, f: &[i64]) -> Result<Vec<i64>, MatrixError> {
        if f.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "functional of length {} on {} rows",
                f.len(),
                self.rows
            )));
        }
        (0..self.cols)
            .map(|j| {
                let mut acc: i128 = 0;
                for (i, &fi) in f.iter().enumerate() {
                    acc = add128(acc, fi as i128 * self.get(i, j) as i128)?;
                }
                to_i64(acc)
            })
            .collect()
    }

    /// `self * x` for a column vector `x`.
    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector of length {} on {} columns",
                x.len(),
                self.cols
            )));
        }
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn column_sums(&self) -> Result<Vec<i64>, MatrixError> {
        self.left_apply(&vec![1; self.rows])
    }

    pub fn row_sums(&self) -> Result<Vec<i64>, MatrixError> {
        self.apply(&vec![1; self.cols])
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut work: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        to_i64(bareiss_determinant(self.rows, &mut work)?)
    }

    /// Determinant of the submatrix on `rows x cols`.
    pub fn minor(&self, rows: &IndexSet, cols: &IndexSet) -> Result<i64, MatrixError> {
        if rows.len() != cols.len() {
            return Err(MatrixError::MinorShape { rows: rows.len(), cols: cols.len() });
        }
        self.minor_unchecked_order(rows, cols)
    }

    /// Determinant of the submatrix on the given index lists, in the given order.
    pub(crate) fn minor_unchecked_order(&self, rows: &[usize], cols: &[usize]) -> Result<i64, MatrixError> {
        if rows.len() != cols.len() {
            return Err(MatrixError::MinorShape { rows: rows.len(), cols: cols.len() });
        }
        Self::check_indices(rows, self.rows)?;
        Self::check_indices(cols, self.cols)?;
        let k = rows.len();
        let mut work = Vec::with_capacity(k * k);
        for &i in rows {
            for &j in cols {
                work.push(self.get(i, j) as i128);
            }
        }
        to_i64(bareiss_determinant(k, &mut work)?)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> Result<usize, MatrixError> {
        let mut work: Vec<i128> = self.data.iter().map(|&v| v as i128).collect();
        fraction_free_echelon(self.rows, self.cols, &mut work)
    }

    /// First pair `(i, j)`, `i < j`, of equal columns in lexicographic order.
    pub fn first_duplicate_columns(&self) -> Option<(usize, usize)> {
        let cols: Vec<Vec<i64>> = self.columns().collect();
        (0..self.cols).tuple_combinations().find(|&(i, j)| cols[i] == cols[j])
    }

    pub fn columns_distinct(&self) -> bool {
        self.first_duplicate_columns().is_none()
    }

    /// Matrix text format: a `rows cols` header then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            s.push_str(&self.row(i).iter().join(" "));
            s.push('\n');
        }
        s
    }
}

/// Determinant of the `n x n` row-major matrix in `a`; `a` is destroyed.
///
/// Pivot is the first nonzero entry at or below the diagonal; each row swap
/// flips the sign.
pub(crate) fn bareiss_determinant(n: usize, a: &mut [i128]) -> Result<i128, MatrixError> {
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return Ok(0);
        };
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let lead = a[i * n + k];
            for j in k + 1..n {
                let v = sub128(mul128(pivot, a[i * n + j])?, mul128(lead, a[k * n + j])?)?;
                a[i * n + j] = v / prev;
            }
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    Ok(sign * a[n * n - 1])
}

/// Fraction-free row echelon form in place; returns the rank.
pub(crate) fn fraction_free_echelon(rows: usize, cols: usize, a: &mut [i128]) -> Result<usize, MatrixError> {
    let mut r = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(r * cols + j, p * cols + j);
            }
        }
        let pivot = a[r * cols + c];
        for i in r + 1..rows {
            let lead = a[i * cols + c];
            for j in c + 1..cols {
                let v = sub128(mul128(pivot, a[i * cols + j])?, mul128(lead, a[r * cols + j])?)?;
                a[i * cols + j] = v / prev;
            }
            a[i * cols + c] = 0;
        }
        prev = pivot;
        r += 1;
    }
    Ok(r)
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", self.row(i).iter().join(" "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Error from the line-oriented text formats, with 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

/// Whitespace-separated tokens of one line with 1-based column positions.
pub(crate) fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (pos, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..pos]));
            }
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (s + 1, t))
}

pub(crate) fn parse_token<T: FromStr>(line: usize, column: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse::<T>()
        .map_err(|_| ParseError::new(line, column, format!("invalid {what} `{tok}`")))
}

/// Parses the matrix text format. Lines that are empty after trimming are
/// ignored; everything else must match the declared shape exactly.
pub fn parse_matrix(text: &str) -> Result<IntMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return Err(ParseError::new(1, 1, "missing `rows cols` header"));
    };
    let head: Vec<_> = tokens(header).collect();
    if head.len() != 2 {
        let col = head.get(2).map_or(header.len() + 1, |t| t.0);
        return Err(ParseError::new(hline, col, "header must be exactly `rows cols`"));
    }
    let rows: usize = parse_token(hline, head[0].0, head[0].1, "row count")?;
    let cols: usize = parse_token(hline, head[1].0, head[1].1, "column count")?;
    let total = rows
        .checked_mul(cols)
        .filter(|&t| t <= text.len())
        .ok_or_else(|| ParseError::new(hline, head[0].0, "declared shape exceeds the input size"))?;
    let mut data = Vec::with_capacity(total);
    let mut last_line = hline;
    // Rows of a zero-column matrix are blank lines, which are skipped.
    let row_lines = if cols == 0 { 0 } else { rows };
    for r in 0..row_lines {
        let Some((lno, line)) = lines.next() else {
            return Err(ParseError::new(last_line + 1, 1, format!("expected {rows} rows, found {r}")));
        };
        last_line = lno;
        let mut count = 0;
        for (col, tok) in tokens(line) {
            if count == cols {
                return Err(ParseError::new(lno, col, format!("row has more than {cols} entries")));
            }
            data.push(parse_token::<i64>(lno, col, tok, "integer")?);
            count += 1;
        }
        if count != cols {
            return Err(ParseError::new(lno, line.len() + 1, format!("row has {count} entries, expected {cols}")));
        }
    }
    if let Some((lno, _)) = lines.next() {
        return Err(ParseError::new(lno, 1, "unexpected content after the last row"));
    }
    Ok(IntMatrix { rows, cols, data })
}

impl FromStr for IntMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_matrix(s)
    }
}

// JSON form: an array of rows. A matrix without rows serializes as `[]`.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.row_vectors().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literal matrices in code and tests.
#[macro_export]
macro_rules! int_matrix {
    ($([$($x:expr),* $(,)?]),* $(,)?) => {
        $crate::matrix::IntMatrix::from_rows(&[$(vec![$($x as i64),*]),*] as &[Vec<i64>])
            .expect("literal matrix rows have equal length")
    };
}
