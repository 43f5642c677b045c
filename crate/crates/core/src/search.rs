//! Exhaustive search for the largest sets of distinct columns keeping a
//! matrix totally unimodular, in three normalizations: column sums 1 after an
//! implicit identity block, all ternary columns, and positive odd column sums
//! after an implicit identity block.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_tu_with, CertifyError, TuBudget};
use crate::families::h;
use crate::matrix::{bareiss_determinant, IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("m = {m} is outside the supported range {min}..={max} for {mode} search")]
    OutOfRange { m: usize, min: usize, max: usize, mode: SearchMode },
    #[error("incremental and full TU checks disagree on columns {0:?}")]
    ShadowMismatch(Vec<usize>),
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

impl From<MatrixError> for SearchError {
    fn from(e: MatrixError) -> Self {
        SearchError::Certify(CertifyError::Matrix(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Polytopal,
    Heller,
    OddSums,
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::Polytopal => "polytopal",
            SearchMode::Heller => "heller",
            SearchMode::OddSums => "odd-sums",
        })
    }
}

impl SearchMode {
    fn implicit_identity(self) -> bool {
        self != SearchMode::Heller
    }

    fn default_max_rows(self) -> usize {
        match self {
            SearchMode::Heller => 3,
            _ => 6,
        }
    }
}

/// Largest `m` accepted even with an explicit override.
pub const ABSOLUTE_MAX_ROWS: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Branch-and-bound against the known target plus row-symmetry reduction.
    pub fast: bool,
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Test only minors through the newest columns; otherwise re-certify the
    /// whole candidate matrix at every step.
    pub incremental: bool,
    /// Explore candidates in reverse order.
    pub reversed: bool,
    /// Run both the incremental and the full check and fail on disagreement.
    pub shadow_check: bool,
    /// Overrides the per-mode row limit (6, or 3 for the Heller mode).
    pub max_rows: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            fast: false,
            max_nodes: None,
            max_seconds: None,
            threads: None,
            incremental: true,
            reversed: false,
            shadow_check: false,
            max_rows: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub m: usize,
    pub mode: SearchMode,
    pub max_columns: usize,
    pub witness: IntMatrix,
    pub nodes: u64,
    pub complete: bool,
    pub seconds: f64,
    /// `h(m)` for the polytopal mode, `m^2 + m + 1` for the Heller mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
}

impl SearchResult {
    /// Agreement with the expected value, for complete runs with one.
    pub fn matches_expected(&self) -> Option<bool> {
        match (self.complete, self.expected) {
            (true, Some(e)) => Some(e == self.max_columns),
            _ => None,
        }
    }
}

/// Candidate columns of each mode in lexicographic order (`-1 < 0 < 1`).
pub fn candidate_columns(m: usize, mode: SearchMode) -> Vec<Vec<i64>> {
    let all = (0..m).map(|_| [-1i64, 0, 1]).multi_cartesian_product();
    let is_basis = |v: &[i64]| v.iter().filter(|&&x| x != 0).count() == 1 && v.contains(&1);
    let cols: Vec<Vec<i64>> = if m == 0 { vec![Vec::new()] } else { all.collect() };
    cols.into_iter()
        .filter(|v| {
            let s: i64 = v.iter().sum();
            match mode {
                SearchMode::Heller => true,
                SearchMode::Polytopal => s == 1 && !is_basis(v),
                SearchMode::OddSums => s > 0 && s % 2 == 1 && !is_basis(v),
            }
        })
        .collect()
}

fn det(k: usize, rows: &[usize], cols: &[&[i64]]) -> Result<i128, MatrixError> {
    let mut buf = Vec::with_capacity(k * k);
    for &r in rows {
        for c in cols {
            buf.push(i128::from(c[r]));
        }
    }
    bareiss_determinant(k, &mut buf)
}

/// All square minors using every column in `must` (indices into `cols`)
/// lie in `{-1, 0, 1}`.
fn minors_through(m: usize, cols: &[&[i64]], must: &[usize]) -> Result<bool, MatrixError> {
    let others: Vec<usize> = (0..cols.len()).filter(|j| !must.contains(j)).collect();
    for k in must.len().max(1)..=m.min(cols.len()) {
        for extra in others.iter().copied().combinations(k - must.len()) {
            let chosen: Vec<&[i64]> = must.iter().chain(&extra).map(|&j| cols[j]).collect();
            for rows in (0..m).combinations(k) {
                if det(k, &rows, &chosen)?.abs() > 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// For a TU matrix `M'`, decides whether `(M' | v)` is TU by testing only the
/// minors through `v`.
pub fn is_extension_tu(m_prime: &IntMatrix, v: &[i64]) -> Result<bool, MatrixError> {
    if v.len() != m_prime.rows() {
        return Err(MatrixError::DimensionMismatch(format!(
            "column of length {} for {} rows",
            v.len(),
            m_prime.rows()
        )));
    }
    let owned: Vec<Vec<i64>> = m_prime.columns().collect();
    let mut cols: Vec<&[i64]> = owned.iter().map(Vec::as_slice).collect();
    cols.push(v);
    minors_through(v.len(), &cols, &[cols.len() - 1])
}

struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    exhausted: AtomicBool,
    done: AtomicBool,
    start: Instant,
    max_nodes: Option<u64>,
    max_seconds: Option<f64>,
    target: Option<usize>,
}

impl Shared {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.max_nodes.is_some_and(|cap| n > cap)
            || (n.is_multiple_of(1024) && self.max_seconds.is_some_and(|s| self.start.elapsed().as_secs_f64() > s))
        {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted.load(Ordering::Relaxed) && !self.done.load(Ordering::Relaxed)
    }
}

struct Ctx<'a> {
    m: usize,
    cands: &'a [Vec<i64>],
    pair_ok: &'a [Vec<bool>],
    options: &'a SearchOptions,
    shared: &'a Shared,
}

#[derive(Default)]
struct Branch {
    best: Vec<usize>,
    error: Option<SearchError>,
}

impl Ctx<'_> {
    fn full_check(&self, set: &[usize]) -> Result<bool, SearchError> {
        let cols: Vec<&[i64]> = set.iter().map(|&j| self.cands[j].as_slice()).collect();
        let m = IntMatrix::from_columns(self.m, &cols)?;
        Ok(certify_tu_with(&m, &TuBudget::unlimited())?.is_tu)
    }

    /// `S + c + c'` is TU, given that `S + c` and `S + c'` are.
    fn compatible(&self, set: &[usize], c: usize, next: usize) -> Result<bool, SearchError> {
        if !self.pair_ok[c][next] {
            return Ok(false);
        }
        let mut all = set.to_vec();
        all.push(next);
        if !self.options.incremental {
            return self.full_check(&all);
        }
        let cols: Vec<&[i64]> = all.iter().map(|&j| self.cands[j].as_slice()).collect();
        let k = cols.len();
        let fast = minors_through(self.m, &cols, &[k - 2, k - 1])?;
        if self.options.shadow_check && fast != self.full_check(&all)? {
            return Err(SearchError::ShadowMismatch(all));
        }
        Ok(fast)
    }

    fn dfs(&self, set: &mut Vec<usize>, compat: &[usize], out: &mut Branch) -> Result<(), SearchError> {
        if !self.shared.tick() {
            return Ok(());
        }
        if set.len() > out.best.len() {
            out.best = set.clone();
            self.shared.best.fetch_max(set.len(), Ordering::Relaxed);
            if self.options.fast && self.shared.target.is_some_and(|t| set.len() >= t) {
                self.shared.done.store(true, Ordering::Relaxed);
                return Ok(());
            }
        }
        for (i, &c) in compat.iter().enumerate() {
            let potential = set.len() + compat.len() - i;
            if potential <= out.best.len() || potential < self.shared.best.load(Ordering::Relaxed) {
                break;
            }
            let mut next = Vec::with_capacity(compat.len() - i - 1);
            set.push(c);
            for &d in &compat[i + 1..] {
                if self.compatible(set, c, d)? {
                    next.push(d);
                }
            }
            self.dfs(set, &next, out)?;
            set.pop();
            if self.shared.done.load(Ordering::Relaxed) || self.shared.exhausted.load(Ordering::Relaxed) {
                break;
            }
        }
        Ok(())
    }

    /// Search rooted at candidate `root`, choosing further columns from `allowed`.
    fn branch(&self, root: usize, allowed: &[usize]) -> Branch {
        let mut out = Branch::default();
        let compat: Vec<usize> = allowed.iter().copied().filter(|&d| self.pair_ok[root][d]).collect();
        let mut set = vec![root];
        if let Err(e) = self.dfs(&mut set, &compat, &mut out) {
            out.error = Some(e);
        }
        out
    }
}

/// Row permutations (and, in the Heller mode, row sign changes) as maps on
/// candidate indices.
fn symmetry_orbits(m: usize, mode: SearchMode, cands: &[Vec<i64>]) -> Vec<usize> {
    let index: std::collections::HashMap<&Vec<i64>, usize> = cands.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let signs: Vec<Vec<i64>> = if mode == SearchMode::Heller {
        (0..m).map(|_| [1i64, -1]).multi_cartesian_product().collect()
    } else {
        vec![vec![1; m]]
    };
    let mut orbit = vec![usize::MAX; cands.len()];
    for i in 0..cands.len() {
        if orbit[i] != usize::MAX {
            continue;
        }
        for perm in (0..m).permutations(m) {
            for s in &signs {
                let img: Vec<i64> = (0..m).map(|r| s[r] * cands[i][perm[r]]).collect();
                if let Some(&j) = index.get(&img) {
                    if orbit[j] == usize::MAX {
                        orbit[j] = i;
                    }
                }
            }
        }
    }
    orbit
}

pub fn search(m: usize, mode: SearchMode, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    let min = if mode == SearchMode::Heller { 1 } else { 2 };
    let max = options.max_rows.unwrap_or(mode.default_max_rows()).min(ABSOLUTE_MAX_ROWS);
    if m < min || m > max {
        return Err(SearchError::OutOfRange { m, min, max, mode });
    }
    match options.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| SearchError::ThreadPool(e.to_string()))?
            .install(|| run(m, mode, options)),
        None => run(m, mode, options),
    }
}

fn run(m: usize, mode: SearchMode, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let mut cands = candidate_columns(m, mode);
    if options.reversed {
        cands.reverse();
    }
    let n = cands.len();
    let pair_ok: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| a == b || minors_through(m, &[&cands[a], &cands[b]], &[0, 1]).unwrap_or(false)).collect())
        .collect();
    let offset = if mode.implicit_identity() { m } else { 0 };
    let expected = match mode {
        SearchMode::Polytopal => Some(h(m as i64).expect("m >= 2") as usize),
        SearchMode::Heller => Some(m * m + m + 1),
        SearchMode::OddSums => None,
    };
    let shared = Shared {
        best: AtomicUsize::new(0),
        nodes: AtomicU64::new(0),
        exhausted: AtomicBool::new(false),
        done: AtomicBool::new(false),
        start,
        max_nodes: options.max_nodes,
        max_seconds: options.max_seconds,
        target: expected.map(|e| e.saturating_sub(offset)),
    };
    let ctx = Ctx { m, cands: &cands, pair_ok: &pair_ok, options, shared: &shared };

    // Roots and the candidates allowed below each root.
    let roots: Vec<(usize, Vec<usize>)> = if options.fast {
        let orbit = symmetry_orbits(m, mode, &cands);
        let mut reps: Vec<usize> = (0..n).filter(|&i| orbit[i] == i).collect();
        reps.sort_unstable();
        reps.iter()
            .enumerate()
            .map(|(k, &r)| {
                let earlier = &reps[..k];
                let allowed = (0..n).filter(|&j| j != r && !earlier.contains(&orbit[j])).collect();
                (r, allowed)
            })
            .collect()
    } else {
        (0..n).map(|r| (r, (r + 1..n).collect())).collect()
    };
    let branches: Vec<Branch> = roots.par_iter().map(|(r, allowed)| ctx.branch(*r, allowed)).collect();
    if let Some(e) = branches.iter().find_map(|b| b.error.clone()) {
        return Err(e);
    }
    let mut best: Vec<usize> = Vec::new();
    for b in &branches {
        if b.best.len() > best.len() {
            best = b.best.clone();
        }
    }
    let mut cols: Vec<Vec<i64>> = Vec::new();
    if mode.implicit_identity() {
        cols.extend((0..m).map(|i| (0..m).map(|r| i64::from(r == i)).collect()));
    }
    cols.extend(best.iter().map(|&j| cands[j].clone()));
    let witness = IntMatrix::from_columns(m, &cols)?;
    Ok(SearchResult {
        m,
        mode,
        max_columns: witness.cols(),
        witness,
        nodes: shared.nodes.load(Ordering::Relaxed),
        complete: !shared.exhausted.load(Ordering::Relaxed),
        seconds: start.elapsed().as_secs_f64(),
        expected,
    })
}

pub fn max_polytopal_tu_columns(m: usize, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    search(m, SearchMode::Polytopal, options)
}

pub fn max_tu_columns(m: usize, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    search(m, SearchMode::Heller, options)
}

pub fn max_odd_sum_tu_columns(m: usize, options: &SearchOptions) -> Result<SearchResult, SearchError> {
    search(m, SearchMode::OddSums, options)
}
