//! Certificates for total unimodularity, unimodularity, polytopality and
//! w-valuedness.
//!
//! Two independent total-unimodularity oracles are provided: exhaustive minor
//! enumeration and the Ghouila-Houri row-signing criterion. Both are
//! exponential and guarded by [`TuBudget`].

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{solve_integer, IntegerSolution};
use crate::matrix::{IndexSet, IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("{method} on a {rows}x{cols} matrix exceeds the budget ({limit}); {suggestion}")]
    BudgetExceeded { method: TuMethod, rows: usize, cols: usize, limit: usize, suggestion: String },
    #[error("matrix has rank {rank} but {rows} rows; full row rank is required")]
    RankDeficient { rank: usize, rows: usize },
    #[error("functional has length {got}, expected {expected}")]
    FunctionalLength { got: usize, expected: usize },
    #[error("value vector has length {got}, expected {expected}")]
    ValueLength { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TuMethod {
    MinorEnumeration,
    GhouilaHouri,
}

impl fmt::Display for TuMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TuMethod::MinorEnumeration => "minor-enumeration",
            TuMethod::GhouilaHouri => "ghouila-houri",
        })
    }
}

/// Size limits for the exponential oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TuBudget {
    /// Largest `rows + cols` accepted by minor enumeration.
    pub max_minor_size: usize,
    /// Largest row count accepted by the Ghouila-Houri check.
    pub max_signing_rows: usize,
}

impl Default for TuBudget {
    fn default() -> Self {
        TuBudget { max_minor_size: 16, max_signing_rows: 20 }
    }
}

impl TuBudget {
    pub fn unlimited() -> Self {
        TuBudget { max_minor_size: usize::MAX, max_signing_rows: 62 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub minor: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuVerdict {
    pub is_tu: bool,
    pub method: TuMethod,
    pub witness: Option<MinorWitness>,
}

impl TuVerdict {
    fn holds(method: TuMethod) -> Self {
        TuVerdict { is_tu: true, method, witness: None }
    }

    fn fails(method: TuMethod, witness: MinorWitness) -> Self {
        TuVerdict { is_tu: false, method, witness: Some(witness) }
    }

    fn transposed(self) -> Self {
        TuVerdict {
            witness: self.witness.map(|w| MinorWitness { rows: w.cols, cols: w.rows, minor: w.minor }),
            ..self
        }
    }
}

/// An integral row covector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Functional(pub Vec<i64>);

impl Functional {
    pub fn ones(m: usize) -> Self {
        Functional(vec![1; m])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Values on the columns of `m`.
    pub fn evaluate(&self, m: &IntMatrix) -> Result<Vec<i64>, CertifyError> {
        if self.len() != m.rows() {
            return Err(CertifyError::FunctionalLength { got: self.len(), expected: m.rows() });
        }
        Ok(m.left_apply(&self.0)?)
    }

    /// True when `f * m = w` exactly.
    pub fn certifies(&self, m: &IntMatrix, w: &[i64]) -> Result<bool, CertifyError> {
        Ok(self.evaluate(m)? == w)
    }
}

fn first_non_ternary(m: &IntMatrix) -> Option<MinorWitness> {
    (0..m.rows()).cartesian_product(0..m.cols()).find_map(|(i, j)| {
        let v = m.get(i, j);
        (!(-1..=1).contains(&v)).then(|| MinorWitness { rows: IndexSet::single(i), cols: IndexSet::single(j), minor: v })
    })
}

/// Total unimodularity with the default budget.
pub fn is_totally_unimodular(m: &IntMatrix, method: TuMethod) -> Result<TuVerdict, CertifyError> {
    is_totally_unimodular_with(m, method, &TuBudget::default())
}

pub fn is_totally_unimodular_with(m: &IntMatrix, method: TuMethod, budget: &TuBudget) -> Result<TuVerdict, CertifyError> {
    match method {
        TuMethod::MinorEnumeration => minor_enumeration(m, budget),
        TuMethod::GhouilaHouri => ghouila_houri_check_with(m, budget),
    }
}

/// Picks whichever oracle fits the budget: minor enumeration for small
/// matrices, otherwise the signing criterion on the side with fewer lines.
pub fn certify_tu(m: &IntMatrix) -> Result<TuVerdict, CertifyError> {
    certify_tu_with(m, &TuBudget::default())
}

pub fn certify_tu_with(m: &IntMatrix, budget: &TuBudget) -> Result<TuVerdict, CertifyError> {
    if m.size() <= budget.max_minor_size {
        return minor_enumeration(m, budget);
    }
    if m.cols() < m.rows() && m.cols() <= budget.max_signing_rows {
        return Ok(ghouila_houri_check_with(&m.transpose(), budget)?.transposed());
    }
    ghouila_houri_check_with(m, budget)
}

fn minor_enumeration(m: &IntMatrix, budget: &TuBudget) -> Result<TuVerdict, CertifyError> {
    let method = TuMethod::MinorEnumeration;
    if let Some(w) = first_non_ternary(m) {
        return Ok(TuVerdict::fails(method, w));
    }
    if m.size() > budget.max_minor_size {
        return Err(CertifyError::BudgetExceeded {
            method,
            rows: m.rows(),
            cols: m.cols(),
            limit: budget.max_minor_size,
            suggestion: "use the ghouila-houri method".into(),
        });
    }
    match first_bad_minor(m, 2)? {
        Some(w) => Ok(TuVerdict::fails(method, w)),
        None => Ok(TuVerdict::holds(method)),
    }
}

/// First square minor of order at least `from` outside {-1, 0, 1}, in
/// ascending order and lexicographic index sets.
fn first_bad_minor(m: &IntMatrix, from: usize) -> Result<Option<MinorWitness>, MatrixError> {
    for k in from..=m.rows().min(m.cols()) {
        for rows in (0..m.rows()).combinations(k) {
            for cols in (0..m.cols()).combinations(k) {
                let d = m.minor_unchecked_order(&rows, &cols)?;
                if d.abs() > 1 {
                    return Ok(Some(MinorWitness {
                        rows: IndexSet::new(rows.clone())?,
                        cols: IndexSet::new(cols)?,
                        minor: d,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Ghouila-Houri criterion with the default budget.
pub fn ghouila_houri_check(m: &IntMatrix) -> Result<TuVerdict, CertifyError> {
    ghouila_houri_check_with(m, &TuBudget::default())
}

/// A `{-1,0,1}` matrix is TU iff every set of rows admits signs `±1` whose
/// signed row sum lies in `{-1,0,1}^n`. Row sets are scanned by ascending
/// size, so the first unsignable set is minimal and every violating minor
/// inside it uses all of its rows.
pub fn ghouila_houri_check_with(m: &IntMatrix, budget: &TuBudget) -> Result<TuVerdict, CertifyError> {
    let method = TuMethod::GhouilaHouri;
    if let Some(w) = first_non_ternary(m) {
        return Ok(TuVerdict::fails(method, w));
    }
    if m.rows() > budget.max_signing_rows {
        return Err(CertifyError::BudgetExceeded {
            method,
            rows: m.rows(),
            cols: m.cols(),
            limit: budget.max_signing_rows,
            suggestion: "use minor-enumeration or transpose the matrix".into(),
        });
    }
    for k in 2..=m.rows() {
        for rows in (0..m.rows()).combinations(k) {
            if !signable(m, &rows) {
                let witness = violating_minor_on_rows(m, &rows)?;
                return Ok(TuVerdict::fails(method, witness));
            }
        }
    }
    Ok(TuVerdict::holds(method))
}

fn violating_minor_on_rows(m: &IntMatrix, rows: &[usize]) -> Result<MinorWitness, CertifyError> {
    for cols in (0..m.cols()).combinations(rows.len()) {
        let d = m.minor_unchecked_order(rows, &cols)?;
        if d.abs() > 1 {
            return Ok(MinorWitness { rows: IndexSet::new(rows.to_vec())?, cols: IndexSet::new(cols)?, minor: d });
        }
    }
    // Unreachable for a minimal unsignable row set; fall back to a full scan.
    first_bad_minor(m, 2)?.ok_or_else(|| {
        CertifyError::Matrix(MatrixError::DimensionMismatch("unsignable rows without a violating minor".into()))
    })
}

/// Backtracking search for a signing of `rows`.
fn signable(m: &IntMatrix, rows: &[usize]) -> bool {
    let cols: Vec<usize> = (0..m.cols()).filter(|&j| rows.iter().any(|&i| m.get(i, j) != 0)).collect();
    // remaining[t][c]: nonzeros in column c among rows[t..].
    let mut remaining = vec![vec![0i32; cols.len()]; rows.len() + 1];
    for t in (0..rows.len()).rev() {
        for (c, &j) in cols.iter().enumerate() {
            remaining[t][c] = remaining[t + 1][c] + i32::from(m.get(rows[t], j) != 0);
        }
    }
    let mut sums = vec![0i32; cols.len()];
    fn go(m: &IntMatrix, rows: &[usize], cols: &[usize], remaining: &[Vec<i32>], sums: &mut [i32], t: usize) -> bool {
        if t == rows.len() {
            return true;
        }
        let signs: &[i32] = if t == 0 { &[1] } else { &[1, -1] };
        for &s in signs {
            let mut ok = true;
            for (c, &j) in cols.iter().enumerate() {
                sums[c] += s * m.get(rows[t], j) as i32;
                if sums[c].abs() > 1 + remaining[t + 1][c] {
                    ok = false;
                }
            }
            if ok && go(m, rows, cols, remaining, sums, t + 1) {
                return true;
            }
            for (c, &j) in cols.iter().enumerate() {
                sums[c] -= s * m.get(rows[t], j) as i32;
            }
        }
        false
    }
    go(m, rows, &cols, &remaining, &mut sums, 0)
}

/// Full row rank matrix whose maximal minors all lie in {-1, 0, 1}.
pub fn is_unimodular(m: &IntMatrix) -> Result<bool, CertifyError> {
    let rank = m.rank()?;
    if rank != m.rows() {
        return Err(CertifyError::RankDeficient { rank, rows: m.rows() });
    }
    let rows: Vec<usize> = (0..m.rows()).collect();
    for cols in (0..m.cols()).combinations(m.rows()) {
        if m.minor_unchecked_order(&rows, &cols)?.abs() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Integral `f` with `f * m = 1` on every column.
pub fn polytopal_certificate(m: &IntMatrix) -> Result<Option<Functional>, CertifyError> {
    w_valued_certificate(m, &vec![1; m.cols()])
}

/// Nonzero integral `f` with `f * m = w`.
///
/// The solution coset is reduced against an echelon basis of the kernel so
/// that the certificate depends only on `(m, w)`.
pub fn w_valued_certificate(m: &IntMatrix, w: &[i64]) -> Result<Option<Functional>, CertifyError> {
    if w.len() != m.cols() {
        return Err(CertifyError::ValueLength { got: w.len(), expected: m.cols() });
    }
    match solve_integer(&m.transpose(), w)? {
        IntegerSolution::Inconsistent | IntegerSolution::NotIntegral => Ok(None),
        IntegerSolution::Solution { particular, kernel } => {
            let f = Functional(particular);
            if !f.is_zero() {
                return Ok(Some(f));
            }
            // w = 0: any nonzero kernel vector certifies.
            Ok(kernel.into_iter().next().map(Functional))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreparedReport {
    pub duplicate_columns: Option<(usize, usize)>,
    pub tu: TuVerdict,
    pub certificate: Option<Functional>,
}

impl PreparedReport {
    pub fn is_prepared(&self) -> bool {
        self.duplicate_columns.is_none() && self.tu.is_tu && self.certificate.is_some()
    }
}

/// Distinct columns, total unimodularity and a polytopal certificate.
pub fn prepared_report(m: &IntMatrix) -> Result<PreparedReport, CertifyError> {
    Ok(PreparedReport {
        duplicate_columns: m.first_duplicate_columns(),
        tu: certify_tu(m)?,
        certificate: polytopal_certificate(m)?,
    })
}

pub fn is_prepared(m: &IntMatrix) -> Result<bool, CertifyError> {
    if !m.columns_distinct() {
        return Ok(false);
    }
    if !certify_tu(m)?.is_tu {
        return Ok(false);
    }
    Ok(polytopal_certificate(m)?.is_some())
}
