//! 1-sums, 2-sums, 3-sums and Δ-sums of TU factors, and transport of
//! w-valued functionals from a sum to its second (or first) factor.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_tu_with, CertifyError, Functional, TuBudget};
use crate::matrix::{IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("invalid sum specification: {0}")]
    Spec(String),
    #[error("factor {factor} is not totally unimodular")]
    FactorNotTu { factor: usize },
    #[error("lemma hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("functional does not certify the composed matrix as w-valued")]
    NotCertified,
    #[error("transport is not defined for {0}")]
    Unsupported(SumKind),
    #[error("transported functional fails re-verification: {0}")]
    Transport(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

impl From<MatrixError> for ComposeError {
    fn from(e: MatrixError) -> Self {
        ComposeError::Certify(CertifyError::Matrix(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumKind {
    OneSum,
    TwoSum,
    ThreeSum,
    DeltaSum,
}

impl std::fmt::Display for SumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SumKind::OneSum => "one-sum",
            SumKind::TwoSum => "two-sum",
            SumKind::ThreeSum => "three-sum",
            SumKind::DeltaSum => "delta-sum",
        })
    }
}

/// Data of a sum. Vectors on the `A` side have length `m1` (rows of `A`);
/// vectors on the `B` side have length `n2` (columns of `B`), except `v'`,
/// which has length `m2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumSpec {
    pub kind: SumKind,
    #[serde(rename = "A")]
    pub a: IntMatrix,
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_prime: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_prime: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u3: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v3: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<i64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<IntMatrix>,
}

impl SumSpec {
    fn empty(kind: SumKind, a: IntMatrix, b: IntMatrix) -> Self {
        SumSpec {
            kind,
            a,
            b,
            u: None,
            v: None,
            u_prime: None,
            v_prime: None,
            u1: None,
            u2: None,
            u3: None,
            v1: None,
            v2: None,
            v3: None,
            x: None,
            c: None,
        }
    }

    pub fn one_sum(a: IntMatrix, b: IntMatrix) -> Self {
        Self::empty(SumKind::OneSum, a, b)
    }

    pub fn two_sum(a: IntMatrix, u: Vec<i64>, v: Vec<i64>, b: IntMatrix) -> Self {
        SumSpec { u: Some(u), v: Some(v), ..Self::empty(SumKind::TwoSum, a, b) }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn three_sum(
        a: IntMatrix,
        u: [Vec<i64>; 3],
        v: [Vec<i64>; 3],
        b: IntMatrix,
        c: IntMatrix,
    ) -> Self {
        let [u1, u2, u3] = u;
        let [v1, v2, v3] = v;
        SumSpec {
            u1: Some(u1),
            u2: Some(u2),
            u3: Some(u3),
            v1: Some(v1),
            v2: Some(v2),
            v3: Some(v3),
            c: Some(c),
            ..Self::empty(SumKind::ThreeSum, a, b)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn delta_sum(
        a: IntMatrix,
        u: Vec<i64>,
        u_prime: Vec<i64>,
        v: Vec<i64>,
        v_prime: Vec<i64>,
        b: IntMatrix,
        x: i64,
    ) -> Self {
        SumSpec {
            u: Some(u),
            u_prime: Some(u_prime),
            v: Some(v),
            v_prime: Some(v_prime),
            x: Some(x),
            ..Self::empty(SumKind::DeltaSum, a, b)
        }
    }

    fn field<'a>(&self, name: &str, value: &'a Option<Vec<i64>>, len: usize) -> Result<&'a [i64], ComposeError> {
        let v = value.as_deref().ok_or_else(|| ComposeError::Spec(format!("{} requires `{name}`", self.kind)))?;
        if v.len() != len {
            return Err(ComposeError::Spec(format!("`{name}` has length {}, expected {len}", v.len())));
        }
        Ok(v)
    }
}

/// Result of composing a sum: the matrix, its factors and shape flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumReport {
    pub kind: SumKind,
    pub matrix: IntMatrix,
    pub factors: Vec<IntMatrix>,
    /// Three-sum whose glue matrix is zero.
    pub one_sum_shaped: bool,
    /// Three-sum whose nonzero glue rows are all `±w^T` for a single `w`.
    pub two_sum_shaped: bool,
}

fn outer(u: &[i64], v: &[i64]) -> IntMatrix {
    let data = u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
    IntMatrix::new(u.len(), v.len(), data).expect("shape matches data")
}

fn blocks(a: &IntMatrix, c: &IntMatrix, d: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix, MatrixError> {
    let top = a.hconcat(c)?;
    let bottom = d.hconcat(b)?;
    top.vconcat(&bottom)
}

fn require_tu(factor: usize, m: &IntMatrix, budget: &TuBudget) -> Result<(), ComposeError> {
    if certify_tu_with(m, budget)?.is_tu {
        Ok(())
    } else {
        Err(ComposeError::FactorNotTu { factor })
    }
}

fn require_size(kind: SumKind, a: &IntMatrix, b: &IntMatrix) -> Result<(), ComposeError> {
    if a.size() < 4 || b.size() < 4 {
        return Err(ComposeError::Spec(format!(
            "{kind} needs blocks of size at least 4, got {} and {}",
            a.size(),
            b.size()
        )));
    }
    Ok(())
}

fn neg_vec(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// `(A 0; 0 B)`.
pub fn one_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    blocks(a, &IntMatrix::zeros(a.rows(), b.cols()), &IntMatrix::zeros(b.rows(), a.cols()), b)
        .expect("block shapes agree")
}

/// `(A uv^T; 0 B)`; the factors `(A|u)` and `(v^T; B)` must be TU.
pub fn two_sum(a: &IntMatrix, u: &[i64], v: &[i64], b: &IntMatrix) -> Result<SumReport, ComposeError> {
    compose_with(&SumSpec::two_sum(a.clone(), u.to_vec(), v.to_vec(), b.clone()), &TuBudget::default())
}

/// `(A C; 0 B)` with validated glue matrix `C`.
pub fn three_sum(
    a: &IntMatrix,
    u: [&[i64]; 3],
    v: [&[i64]; 3],
    b: &IntMatrix,
    c: &IntMatrix,
) -> Result<SumReport, ComposeError> {
    let spec = SumSpec::three_sum(a.clone(), u.map(<[i64]>::to_vec), v.map(<[i64]>::to_vec), b.clone(), c.clone());
    compose_with(&spec, &TuBudget::default())
}

/// `(A u'v^T; v'u^T B)`.
pub fn delta_sum(
    a: &IntMatrix,
    u: &[i64],
    u_prime: &[i64],
    v: &[i64],
    v_prime: &[i64],
    b: &IntMatrix,
    x: i64,
) -> Result<SumReport, ComposeError> {
    let spec = SumSpec::delta_sum(a.clone(), u.to_vec(), u_prime.to_vec(), v.to_vec(), v_prime.to_vec(), b.clone(), x);
    compose_with(&spec, &TuBudget::default())
}

pub fn compose(spec: &SumSpec) -> Result<SumReport, ComposeError> {
    compose_with(spec, &TuBudget::default())
}

/// Builds the factors of a spec after validating its shape invariants.
pub fn factors(spec: &SumSpec) -> Result<Vec<IntMatrix>, ComposeError> {
    let (a, b) = (&spec.a, &spec.b);
    let (m1, n2, m2) = (a.rows(), b.cols(), b.rows());
    Ok(match spec.kind {
        SumKind::OneSum => vec![a.clone(), b.clone()],
        SumKind::TwoSum => {
            let u = spec.field("u", &spec.u, m1)?;
            let v = spec.field("v", &spec.v, n2)?;
            vec![a.push_column(u)?, IntMatrix::from_rows(&[v])?.vconcat(b)?]
        }
        SumKind::ThreeSum => {
            let g = three_sum_glue(spec)?;
            let mut f1 = a.clone();
            for u in &g.u {
                f1 = f1.push_column(u)?;
            }
            let f2 = IntMatrix::from_rows(&g.v)?.vconcat(b)?;
            vec![f1, f2]
        }
        SumKind::DeltaSum => {
            require_size(spec.kind, a, b)?;
            let u = spec.field("u", &spec.u, a.cols())?;
            let up = spec.field("u_prime", &spec.u_prime, m1)?;
            let v = spec.field("v", &spec.v, n2)?;
            let vp = spec.field("v_prime", &spec.v_prime, m2)?;
            let x = spec.x.ok_or_else(|| ComposeError::Spec("delta-sum requires `x`".into()))?;
            if x != 1 && x != -1 {
                return Err(ComposeError::Spec(format!("x must be ±1, got {x}")));
            }
            let mut last = u.to_vec();
            last.extend([0, x]);
            let f1 = a.push_column(up)?.push_column(up)?.push_row(&last)?;
            let mut first = v.to_vec();
            first.extend([0, x]);
            let f2 = IntMatrix::from_rows(&[first])?.vconcat(&b.push_column(vp)?.push_column(vp)?)?;
            vec![f1, f2]
        }
    })
}

struct Glue {
    u: [Vec<i64>; 3],
    v: [Vec<i64>; 3],
    c: IntMatrix,
}

fn three_sum_glue(spec: &SumSpec) -> Result<Glue, ComposeError> {
    let (a, b) = (&spec.a, &spec.b);
    require_size(spec.kind, a, b)?;
    let (m1, n2) = (a.rows(), b.cols());
    let u = [
        spec.field("u1", &spec.u1, m1)?.to_vec(),
        spec.field("u2", &spec.u2, m1)?.to_vec(),
        spec.field("u3", &spec.u3, m1)?.to_vec(),
    ];
    let v = [
        spec.field("v1", &spec.v1, n2)?.to_vec(),
        spec.field("v2", &spec.v2, n2)?.to_vec(),
        spec.field("v3", &spec.v3, n2)?.to_vec(),
    ];
    let c = spec.c.clone().ok_or_else(|| ComposeError::Spec("three-sum requires `C`".into()))?;
    if c.shape() != (m1, n2) {
        return Err(ComposeError::Spec(format!("C is {}x{}, expected {m1}x{n2}", c.rows(), c.cols())));
    }
    for (name, vs) in [("u", &u), ("v", &v)] {
        let len = vs[0].len();
        if (0..len).any(|i| vs[0][i] as i128 + vs[1][i] as i128 + vs[2][i] as i128 != 0) {
            return Err(ComposeError::Spec(format!("{name}1 + {name}2 + {name}3 is not zero")));
        }
    }
    for (l, vl) in v.iter().enumerate() {
        if vl.iter().all(|&x| x == 0) {
            return Err(ComposeError::Spec(format!("v{} is zero, so row classes of C are ambiguous", l + 1)));
        }
        for (k, vk) in v.iter().enumerate().skip(l + 1) {
            if vl == vk || *vl == neg_vec(vk) {
                return Err(ComposeError::Spec(format!("v{} = ±v{}, so row classes of C are ambiguous", l + 1, k + 1)));
            }
        }
    }
    let allowed = |set: &[Vec<i64>; 3], x: &[i64]| {
        x.iter().all(|&e| e == 0) || set.iter().any(|s| s == x || neg_vec(s) == x)
    };
    for j in 0..n2 {
        if !allowed(&u, &c.column(j)) {
            return Err(ComposeError::Spec(format!("column {j} of C is not ±u1, ±u2, ±u3 or 0")));
        }
    }
    for i in 0..m1 {
        if !allowed(&v, c.row(i)) {
            return Err(ComposeError::Spec(format!("row {i} of C is not ±v1, ±v2, ±v3 or 0")));
        }
    }
    Ok(Glue { u, v, c })
}

/// Row class of each row of `C`: `Some((l, sign))` when the row is
/// `sign * v_l^T`, `None` for a zero row.
fn row_classes(c: &IntMatrix, v: &[Vec<i64>; 3]) -> Vec<Option<(usize, i64)>> {
    (0..c.rows())
        .map(|i| {
            let r = c.row(i);
            v.iter().enumerate().find_map(|(l, vl)| {
                if r == vl.as_slice() {
                    Some((l, 1))
                } else if r == neg_vec(vl).as_slice() {
                    Some((l, -1))
                } else {
                    None
                }
            })
        })
        .collect()
}

pub fn compose_with(spec: &SumSpec, budget: &TuBudget) -> Result<SumReport, ComposeError> {
    let fs = factors(spec)?;
    for (k, f) in fs.iter().enumerate() {
        require_tu(k + 1, f, budget)?;
    }
    let (a, b) = (&spec.a, &spec.b);
    let lower = IntMatrix::zeros(b.rows(), a.cols());
    let (matrix, one_sum_shaped, two_sum_shaped) = match spec.kind {
        SumKind::OneSum => (one_sum(a, b), false, false),
        SumKind::TwoSum => {
            let glue = outer(spec.u.as_deref().unwrap_or_default(), spec.v.as_deref().unwrap_or_default());
            (blocks(a, &glue, &lower, b)?, false, false)
        }
        SumKind::ThreeSum => {
            let g = three_sum_glue(spec)?;
            let classes = row_classes(&g.c, &g.v);
            let used: std::collections::BTreeSet<usize> = classes.iter().flatten().map(|&(l, _)| l).collect();
            (blocks(a, &g.c, &lower, b)?, used.is_empty(), used.len() == 1)
        }
        SumKind::DeltaSum => {
            let upper = outer(spec.u_prime.as_deref().unwrap_or_default(), spec.v.as_deref().unwrap_or_default());
            let lower = outer(spec.v_prime.as_deref().unwrap_or_default(), spec.u.as_deref().unwrap_or_default());
            (blocks(a, &upper, &lower, b)?, false, false)
        }
    };
    Ok(SumReport { kind: spec.kind, matrix, factors: fs, one_sum_shaped, two_sum_shaped })
}

/// A transported functional together with the factor it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportedFunctional {
    pub factor: IntMatrix,
    pub functional: Functional,
    /// The part of `w` the factor is valued on.
    pub w: Vec<i64>,
    /// Distinct columns inherited from the composed matrix.
    pub distinct_columns: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transport {
    pub kind: SumKind,
    /// `f'` for 2- and 3-sums; `f'` and `f''` for Δ-sums.
    pub functionals: Vec<TransportedFunctional>,
}

/// Transports a functional `f` with `f M = w` to the factor(s) named by the
/// lemma, then re-verifies certification, coordinate agreement and column
/// distinctness.
pub fn transport_functional(spec: &SumSpec, f: &Functional, w: &[i64]) -> Result<Transport, ComposeError> {
    let report = compose_with(spec, &TuBudget::unlimited())?;
    let m = &report.matrix;
    if f.is_zero() || !f.certifies(m, w)? {
        return Err(ComposeError::NotCertified);
    }
    let (a, b) = (&spec.a, &spec.b);
    let (m1, n1) = a.shape();
    let f = f.coeffs();
    let (f1, f2) = f.split_at(m1);
    let (w1, w2) = w.split_at(n1);
    let dot = |x: &[i64], y: &[i64]| crate::matrix::dot(x, y);

    let mut out = Vec::new();
    match spec.kind {
        SumKind::OneSum => return Err(ComposeError::Unsupported(SumKind::OneSum)),
        SumKind::TwoSum => {
            let u = spec.u.as_deref().unwrap_or_default();
            let mut fp = vec![dot(f1, u)?];
            fp.extend_from_slice(f2);
            let factor = report.factors[1].clone();
            agree(&fp[1..], f2, "f'(e_j) = f(e_{m1+j-1})")?;
            out.push(finish(factor, fp, w2)?);
        }
        SumKind::ThreeSum => {
            let g = three_sum_glue(spec)?;
            let classes = row_classes(&g.c, &g.v);
            let mut sums = [0i64; 3];
            for (t, class) in classes.iter().enumerate() {
                if let Some((l, sign)) = *class {
                    sums[l] = sums[l].checked_add(sign * f1[t]).ok_or(MatrixError::Overflow)?;
                }
            }
            for l in 0..2 {
                if !classes.iter().flatten().any(|&(k, _)| k == l) {
                    return Err(ComposeError::Hypothesis(format!("±v{}^T does not appear as a row of C", l + 1)));
                }
            }
            let mut fp = vec![
                sums[0].checked_sub(sums[2]).ok_or(MatrixError::Overflow)?,
                sums[1].checked_sub(sums[2]).ok_or(MatrixError::Overflow)?,
            ];
            fp.extend_from_slice(f2);
            let factor = IntMatrix::from_rows(&[&g.v[0], &g.v[1]])?.vconcat(b)?;
            agree(&fp[2..], f2, "f'(e_j) = f(e_{m1+j-2})")?;
            out.push(finish(factor, fp, w2)?);
        }
        SumKind::DeltaSum => {
            let u = spec.u.as_deref().unwrap_or_default();
            let v = spec.v.as_deref().unwrap_or_default();
            let vp = spec.v_prime.as_deref().unwrap_or_default();
            let up = spec.u_prime.as_deref().unwrap_or_default();
            let mut fp = f1.to_vec();
            fp.push(dot(f2, vp)?);
            agree(&fp[..m1], f1, "f'(e_j) = f(e_j)")?;
            out.push(finish(a.push_row(u)?, fp, w1)?);
            let mut fpp = vec![dot(f1, up)?];
            fpp.extend_from_slice(f2);
            agree(&fpp[1..], f2, "f''(e_j) = f(e_{m1+j-1})")?;
            out.push(finish(IntMatrix::from_rows(&[v])?.vconcat(b)?, fpp, w2)?);
        }
    }
    Ok(Transport { kind: spec.kind, functionals: out })
}

fn agree(x: &[i64], y: &[i64], what: &str) -> Result<(), ComposeError> {
    if x == y {
        Ok(())
    } else {
        Err(ComposeError::Transport(format!("coordinate agreement {what} fails")))
    }
}

fn finish(factor: IntMatrix, fp: Vec<i64>, w: &[i64]) -> Result<TransportedFunctional, ComposeError> {
    let functional = Functional(fp);
    if !functional.certifies(&factor, w)? {
        return Err(ComposeError::Transport("transported functional does not evaluate to w".into()));
    }
    Ok(TransportedFunctional { distinct_columns: factor.columns_distinct(), factor, functional, w: w.to_vec() })
}
