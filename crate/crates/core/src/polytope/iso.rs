//! Lattice isomorphism of point sets and isomorphism-invariant fingerprints.

use std::collections::HashSet;

use itertools::Itertools;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{simplex_determinant, PointSet};
use crate::matrix::{bareiss_determinant, IntMatrix, MatrixError};

/// Invariants of a point set under affine lattice isomorphisms, computed in
/// intrinsic coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub dimension: usize,
    pub vertex_count: usize,
    /// Sorted lattice lengths of all segments between two points.
    pub distances: Vec<i64>,
    /// Number of affinely independent `k`-subsets for `k = 1..=dimension+1`.
    pub independent_subsets: Vec<usize>,
    /// Sorted normalized volumes of all full-dimensional simplices.
    pub volumes: Vec<i64>,
    /// Per point, the number of full-dimensional simplices containing it; sorted.
    pub simplex_degrees: Vec<usize>,
}

fn lattice_length(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).fold(0i64, |g, (x, y)| g.gcd(&(x - y)))
}

fn rank_of(points: &[Vec<i64>], subset: &[usize]) -> Result<usize, MatrixError> {
    if subset.len() <= 1 {
        return Ok(0);
    }
    let base = &points[subset[0]];
    let cols: Vec<Vec<i64>> = subset[1..].iter().map(|&k| points[k].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    IntMatrix::from_columns(base.len(), &cols)?.rank()
}

pub fn fingerprint(p: &PointSet) -> Result<Fingerprint, MatrixError> {
    let q = p.intrinsic()?;
    let pts = q.points();
    let n = pts.len();
    let d = q.dimension();
    let distances = (0..n).tuple_combinations().map(|(i, j)| lattice_length(&pts[i], &pts[j])).sorted().collect();
    let mut independent_subsets = Vec::with_capacity(d + 1);
    for k in 1..=d + 1 {
        let mut count = 0;
        for s in (0..n).combinations(k) {
            if rank_of(&pts, &s)? == k - 1 {
                count += 1;
            }
        }
        independent_subsets.push(count);
    }
    let mut volumes = Vec::new();
    let mut degrees = vec![0usize; n];
    if n > d {
        for s in (0..n).combinations(d + 1) {
            let det = simplex_determinant(&pts, &s)?;
            if det != 0 {
                volumes.push(crate::matrix::to_i64(det.abs())?);
                for &i in &s {
                    degrees[i] += 1;
                }
            }
        }
    }
    volumes.sort_unstable();
    degrees.sort_unstable();
    Ok(Fingerprint { dimension: d, vertex_count: n, distances, independent_subsets, volumes, simplex_degrees: degrees })
}

/// Leftmost affinely independent spanning subset, greedily.
fn leftmost_frame(pts: &[Vec<i64>], d: usize) -> Result<Vec<usize>, MatrixError> {
    let mut frame = vec![0];
    for j in 1..pts.len() {
        if frame.len() == d + 1 {
            break;
        }
        let mut trial = frame.clone();
        trial.push(j);
        if rank_of(pts, &trial)? == trial.len() - 1 {
            frame = trial;
        }
    }
    Ok(frame)
}

/// Adjugate of a square `i128` matrix given row-major.
fn adjugate(n: usize, a: &[i128]) -> Result<Vec<i128>, MatrixError> {
    if n == 1 {
        return Ok(vec![1]);
    }
    let mut adj = vec![0i128; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for r in (0..n).filter(|&r| r != i) {
                for c in (0..n).filter(|&c| c != j) {
                    minor.push(a[r * n + c]);
                }
            }
            let m = bareiss_determinant(n - 1, &mut minor)?;
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adj[j][i] = cofactor(i, j)
            adj[j * n + i] = sign * m;
        }
    }
    Ok(adj)
}

/// Per-point sorted lattice lengths to every other point.
fn local_invariants(pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    pts.iter()
        .map(|p| pts.iter().filter(|q| *q != p).map(|q| lattice_length(p, q)).sorted().collect())
        .collect()
}

/// True when an affine lattice isomorphism between the affine hulls maps `p`
/// onto `q`. Ambient dimensions may differ.
pub fn lattice_isomorphic(p: &PointSet, q: &PointSet) -> Result<bool, MatrixError> {
    if p.len() != q.len() {
        return Ok(false);
    }
    let (p, q) = (p.intrinsic()?, q.intrinsic()?);
    if p.dimension() != q.dimension() {
        return Ok(false);
    }
    let d = p.dimension();
    let n = p.len();
    if n <= 1 {
        return Ok(true);
    }
    let pp = p.points();
    let qp = q.points();
    let frame = leftmost_frame(&pp, d)?;
    // Difference matrix of the P frame, columns p_k - p_0.
    let mut dp = vec![0i128; d * d];
    for (c, &k) in frame[1..].iter().enumerate() {
        for r in 0..d {
            dp[r * d + c] = i128::from(pp[k][r] - pp[frame[0]][r]);
        }
    }
    let delta = bareiss_determinant(d, &mut dp.clone())?;
    let adj = adjugate(d, &dp)?;
    let lp = local_invariants(&pp);
    let lq = local_invariants(&qp);
    let target: HashSet<&Vec<i64>> = qp.iter().collect();

    let candidates: Vec<Vec<usize>> =
        frame.iter().map(|&f| (0..n).filter(|&j| lq[j] == lp[f]).collect()).collect();
    let mut chosen = Vec::with_capacity(d + 1);
    let mut ctx = Search { pp: &pp, qp: &qp, frame: &frame, adj: &adj, delta, d, target: &target, candidates: &candidates };
    ctx.extend(&mut chosen)
}

struct Search<'a> {
    pp: &'a [Vec<i64>],
    qp: &'a [Vec<i64>],
    frame: &'a [usize],
    adj: &'a [i128],
    delta: i128,
    d: usize,
    target: &'a HashSet<&'a Vec<i64>>,
    candidates: &'a [Vec<usize>],
}

impl Search<'_> {
    fn extend(&mut self, chosen: &mut Vec<usize>) -> Result<bool, MatrixError> {
        let k = chosen.len();
        if k == self.d + 1 {
            return self.try_map(chosen);
        }
        for &j in &self.candidates[k] {
            if chosen.contains(&j) {
                continue;
            }
            let consistent = chosen.iter().enumerate().all(|(i, &c)| {
                lattice_length(&self.qp[c], &self.qp[j]) == lattice_length(&self.pp[self.frame[i]], &self.pp[self.frame[k]])
            });
            if !consistent {
                continue;
            }
            chosen.push(j);
            if self.extend(chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    fn try_map(&self, chosen: &[usize]) -> Result<bool, MatrixError> {
        let d = self.d;
        let q0 = &self.qp[chosen[0]];
        let mut dq = vec![0i128; d * d];
        for (c, &k) in chosen[1..].iter().enumerate() {
            for r in 0..d {
                dq[r * d + c] = i128::from(self.qp[k][r] - q0[r]);
            }
        }
        // T = DQ adj(DP) / det(DP) must be integral.
        let mut t = vec![0i128; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut s = 0i128;
                for k in 0..d {
                    s = s
                        .checked_add(dq[r * d + k].checked_mul(self.adj[k * d + c]).ok_or(MatrixError::Overflow)?)
                        .ok_or(MatrixError::Overflow)?;
                }
                if s % self.delta != 0 {
                    return Ok(false);
                }
                t[r * d + c] = s / self.delta;
            }
        }
        if bareiss_determinant(d, &mut t.clone())?.abs() != 1 {
            return Ok(false);
        }
        let p0 = &self.pp[self.frame[0]];
        let mut image = HashSet::with_capacity(self.pp.len());
        for p in self.pp {
            let mut x = Vec::with_capacity(d);
            for r in 0..d {
                let mut s = i128::from(q0[r]);
                for c in 0..d {
                    s += t[r * d + c] * i128::from(p[c] - p0[c]);
                }
                x.push(crate::matrix::to_i64(s)?);
            }
            if !self.target.contains(&x) {
                return Ok(false);
            }
            image.insert(x);
        }
        Ok(image.len() == self.pp.len())
    }
}
