//! Enumeration of full-dimensional unimodular 0/1-polytopes up to lattice
//! isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::iso::{fingerprint, lattice_isomorphic, Fingerprint};
use super::{cube_point, is_unimodular_polytope, simplex_determinant, vertex_bound, vertex_hull, PointSet, PolytopeError};
use crate::matrix::MatrixError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Allow dimension 5.
    pub stretch: bool,
    /// Hereditary determinant pruning with the vertex ceiling `h(d+1)`.
    /// The unpruned mode tests every subset independently and is limited to
    /// `d <= 3`.
    pub pruned: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { stretch: false, pruned: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolytopeClass {
    pub dimension: usize,
    pub vertex_count: usize,
    /// Vertices of a canonical 0/1 representative, in cube-code order.
    pub vertices: Vec<Vec<i64>>,
    pub fingerprint: Fingerprint,
}

impl PolytopeClass {
    pub fn point_set(&self) -> PointSet {
        PointSet::from_points(self.dimension, &self.vertices).expect("class vertices are distinct")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub dimension: usize,
    pub count: usize,
    /// Unimodular full-dimensional subsets containing the origin.
    pub candidates: usize,
    /// Orbits of candidates under the symmetry group of the cube.
    pub orbits: usize,
    pub pruned: bool,
    pub classes: Vec<PolytopeClass>,
}

/// Permutation of cube codes for each of the `d! 2^d` cube symmetries.
fn cube_symmetries(d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for perm in (0..d).permutations(d) {
        for flips in 0..1u32 << d {
            let table = (0..1u32 << d)
                .map(|code| {
                    let p = cube_point(d, code);
                    (0..d).fold(0u32, |acc, i| {
                        let bit = (p[perm[i]] as u32) ^ (flips >> i & 1);
                        acc | bit << (d - 1 - i)
                    })
                })
                .collect();
            out.push(table);
        }
    }
    out
}

fn canonical(mask: u64, symmetries: &[Vec<u32>]) -> u64 {
    symmetries
        .iter()
        .map(|t| (0..t.len()).filter(|&c| mask >> c & 1 == 1).fold(0u64, |acc, c| acc | 1 << t[c]))
        .min()
        .unwrap_or(mask)
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&c| mask >> c & 1 == 1).collect()
}

fn full_dimensional(points: &[Vec<i64>], mask: u64, d: usize) -> Result<bool, MatrixError> {
    let set = PointSet::from_points(d, &members(mask).iter().map(|&c| points[c].clone()).collect::<Vec<_>>())
        .expect("cube points are distinct");
    Ok(set.affine_dimension()? == Some(d))
}

/// Depth-first search over subsets containing the origin, adding cube codes in
/// increasing order; every new point must keep all simplex determinants in
/// `{-1, 0, 1}`.
fn pruned_candidates(d: usize, points: &[Vec<i64>]) -> Result<Vec<u64>, MatrixError> {
    let cap = vertex_bound(d);
    let mut out = Vec::new();
    let mut current = vec![0usize];
    fn go(
        d: usize,
        cap: usize,
        points: &[Vec<i64>],
        current: &mut Vec<usize>,
        out: &mut Vec<u64>,
    ) -> Result<(), MatrixError> {
        if current.len() > d {
            let mask = current.iter().fold(0u64, |m, &c| m | 1 << c);
            if full_dimensional(points, mask, d)? {
                out.push(mask);
            }
        }
        if current.len() == cap {
            return Ok(());
        }
        let start = current.last().map_or(0, |&c| c + 1);
        for next in start..points.len() {
            let mut ok = true;
            if current.len() >= d {
                for sub in current.iter().copied().combinations(d) {
                    let mut s = sub;
                    s.push(next);
                    if simplex_determinant(points, &s)?.abs() > 1 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                current.push(next);
                go(d, cap, points, current, out)?;
                current.pop();
            }
        }
        Ok(())
    }
    go(d, cap, points, &mut current, &mut out)?;
    Ok(out)
}

/// Every subset containing the origin, each tested from scratch.
fn unpruned_candidates(d: usize, points: &[Vec<i64>]) -> Result<Vec<u64>, PolytopeError> {
    let n = points.len();
    let mut out = Vec::new();
    for rest in 0..1u64 << (n - 1) {
        let mask = rest << 1 | 1;
        if (mask.count_ones() as usize) <= d || !full_dimensional(points, mask, d)? {
            continue;
        }
        let idx = members(mask);
        let set = PointSet::from_points(d, &idx.iter().map(|&c| points[c].clone()).collect::<Vec<_>>())?;
        let hull = vertex_hull(&set)?;
        let membership = hull.cube_membership.expect("0/1 input");
        let closed = (0..n).all(|c| membership[c] == (mask >> c & 1 == 1));
        if closed && hull.non_vertices.is_empty() && is_unimodular_polytope(&set)?.unimodular {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Classes of full-dimensional unimodular polytopes of dimension `d`, each
/// represented by a 0/1-polytope.
pub fn classify_unimodular(d: usize, options: &ClassifyOptions) -> Result<Classification, PolytopeError> {
    if d == 0 || d > 5 {
        return Err(PolytopeError::Scale(d, ""));
    }
    if d == 5 && !options.stretch {
        return Err(PolytopeError::Scale(d, " without the stretch option"));
    }
    if !options.pruned && d > 3 {
        return Err(PolytopeError::Scale(d, " in unpruned mode"));
    }
    let points: Vec<Vec<i64>> = (0..1u32 << d).map(|c| cube_point(d, c)).collect();
    // Cube flips are lattice automorphisms, so every orbit meets the sets containing the origin.
    let candidates =
        if options.pruned { pruned_candidates(d, &points)? } else { unpruned_candidates(d, &points)? };
    let symmetries = cube_symmetries(d);
    let orbits: BTreeSet<u64> = candidates.par_iter().map(|&m| canonical(m, &symmetries)).collect();
    let fingerprinted: Vec<(Fingerprint, u64)> = orbits
        .par_iter()
        .map(|&m| {
            let set = PointSet::from_points(d, &members(m).iter().map(|&c| points[c].clone()).collect::<Vec<_>>())
                .expect("cube points are distinct");
            fingerprint(&set).map(|f| (f, m))
        })
        .collect::<Result<_, _>>()?;
    let mut groups: BTreeMap<Fingerprint, Vec<u64>> = BTreeMap::new();
    for (f, m) in fingerprinted {
        groups.entry(f).or_default().push(m);
    }
    let group_reps: Vec<Vec<PolytopeClass>> = groups
        .into_par_iter()
        .map(|(f, masks)| {
            let mut reps: Vec<PolytopeClass> = Vec::new();
            for m in masks {
                let class = PolytopeClass {
                    dimension: d,
                    vertex_count: m.count_ones() as usize,
                    vertices: members(m).iter().map(|&c| points[c].clone()).collect(),
                    fingerprint: f.clone(),
                };
                let set = class.point_set();
                let mut known = false;
                for r in &reps {
                    if lattice_isomorphic(&r.point_set(), &set)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    reps.push(class);
                }
            }
            Ok(reps)
        })
        .collect::<Result<_, MatrixError>>()?;
    let mut classes: Vec<PolytopeClass> = group_reps.into_iter().flatten().collect();
    classes.sort_by(|a, b| (&a.fingerprint, &a.vertices).cmp(&(&b.fingerprint, &b.vertices)));
    Ok(Classification {
        dimension: d,
        count: classes.len(),
        candidates: candidates.len(),
        orbits: orbits.len(),
        pruned: options.pruned,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_group_size() {
        assert_eq!(cube_symmetries(3).len(), 48);
        for t in cube_symmetries(2) {
            assert_eq!(t.iter().copied().sorted().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn small_dimensions() {
        for (d, expected) in [(1, 1), (2, 2), (3, 4)] {
            let pruned = classify_unimodular(d, &ClassifyOptions::default()).unwrap();
            let full = classify_unimodular(d, &ClassifyOptions { pruned: false, stretch: false }).unwrap();
            assert_eq!(pruned.count, expected);
            assert_eq!(full.count, expected);
            assert_eq!(pruned.classes, full.classes);
        }
    }

    #[test]
    fn dimension_four() {
        let c = classify_unimodular(4, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.count, 13);
        assert_eq!(c.classes.iter().map(|k| k.vertex_count).max(), Some(10));
    }

    #[test]
    fn scale_errors() {
        assert!(matches!(classify_unimodular(5, &ClassifyOptions::default()), Err(PolytopeError::Scale(5, _))));
        assert!(matches!(classify_unimodular(0, &ClassifyOptions::default()), Err(PolytopeError::Scale(0, _))));
        let unpruned = ClassifyOptions { pruned: false, stretch: false };
        assert!(matches!(classify_unimodular(4, &unpruned), Err(PolytopeError::Scale(4, _))));
    }
}
