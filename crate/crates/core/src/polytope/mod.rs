//! Lattice point sets and unimodular polytopes: convex position, unimodular
//! certification, standard forms of unimodular matrices, edge polytopes and
//! products of simplices.

mod classify;
mod iso;

pub use classify::{classify_unimodular, ClassifyOptions, Classification, PolytopeClass};
pub use iso::{fingerprint, lattice_isomorphic, Fingerprint};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_tu, is_unimodular, polytopal_certificate, CertifyError};
use crate::lattice::{integer_kernel, solve_integer, unimodular_inverse, IntegerSolution};
use crate::lp::in_convex_hull;
use crate::matrix::{bareiss_determinant, IntMatrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("point {0} is not a vertex of the convex hull")]
    NotConvexPosition(usize),
    #[error("point set has affine dimension {affine} in ambient dimension {ambient}")]
    NotFullDimensional { affine: usize, ambient: usize },
    #[error("edge ({0}, {1}) lies inside one part")]
    NotBipartite(usize, usize),
    #[error("vertex {vertex} out of range for {vertices} vertices")]
    VertexOutOfRange { vertex: usize, vertices: usize },
    #[error("classification in dimension {0} is not supported{1}")]
    Scale(usize, &'static str),
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("matrix has no polytopal certificate")]
    NotPolytopal,
    #[error("standard form failed re-certification")]
    Recertification,
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

impl From<MatrixError> for PolytopeError {
    fn from(e: MatrixError) -> Self {
        PolytopeError::Certify(CertifyError::Matrix(e))
    }
}

/// Pairwise distinct lattice points, stored as the columns of a `d x n` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct PointSet {
    points: IntMatrix,
}

impl TryFrom<IntMatrix> for PointSet {
    type Error = PolytopeError;

    fn try_from(points: IntMatrix) -> Result<Self, PolytopeError> {
        PointSet::new(points)
    }
}

impl From<PointSet> for IntMatrix {
    fn from(p: PointSet) -> IntMatrix {
        p.points
    }
}

impl PointSet {
    pub fn new(points: IntMatrix) -> Result<Self, PolytopeError> {
        if let Some((i, j)) = points.first_duplicate_columns() {
            return Err(PolytopeError::DuplicatePoint(i, j));
        }
        Ok(PointSet { points })
    }

    pub fn from_points(dim: usize, points: &[Vec<i64>]) -> Result<Self, PolytopeError> {
        PointSet::new(IntMatrix::from_columns(dim, points)?)
    }

    pub fn dimension(&self) -> usize {
        self.points.rows()
    }

    pub fn len(&self) -> usize {
        self.points.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.cols() == 0
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.points
    }

    pub fn point(&self, j: usize) -> Vec<i64> {
        self.points.column(j)
    }

    pub fn points(&self) -> Vec<Vec<i64>> {
        self.points.columns().collect()
    }

    /// Differences `p_j - p_0` for `j >= 1`, as columns.
    fn differences(&self) -> Result<IntMatrix, MatrixError> {
        let p0 = self.point(0);
        let cols: Vec<Vec<i64>> = (1..self.len())
            .map(|j| {
                self.point(j)
                    .iter()
                    .zip(&p0)
                    .map(|(a, b)| a.checked_sub(*b).ok_or(MatrixError::Overflow))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        IntMatrix::from_columns(self.dimension(), &cols)
    }

    /// Dimension of the affine hull; `None` for the empty set.
    pub fn affine_dimension(&self) -> Result<Option<usize>, MatrixError> {
        if self.is_empty() {
            return Ok(None);
        }
        Ok(Some(self.differences()?.rank()?))
    }

    /// Coordinates with respect to `p_0` and a basis of the lattice
    /// `aff(P) ∩ Z^d - p_0`. The result is full-dimensional and lattice
    /// isomorphic to `self`.
    pub fn intrinsic(&self) -> Result<PointSet, MatrixError> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let diff = self.differences()?;
        if diff.rank()? == self.dimension() {
            return Ok(self.clone());
        }
        // Saturation: integer vectors orthogonal to everything orthogonal to the differences.
        let normals = integer_kernel(&diff.transpose())?;
        let normal_matrix = IntMatrix::from_rows(&normals)?;
        let basis = integer_kernel(&normal_matrix)?;
        let b = IntMatrix::from_columns(self.dimension(), &basis)?;
        let mut coords = vec![vec![0; basis.len()]];
        for j in 0..diff.cols() {
            match solve_integer(&b, &diff.column(j))? {
                IntegerSolution::Solution { particular, .. } => coords.push(particular),
                _ => unreachable!("saturated lattice contains every difference"),
            }
        }
        Ok(PointSet { points: IntMatrix::from_columns(basis.len(), &coords)? })
    }

    pub fn is_zero_one(&self) -> bool {
        self.points.entries().iter().all(|&v| v == 0 || v == 1)
    }
}

/// Largest lattice box scanned by [`vertex_hull`].
pub const LATTICE_SCAN_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HullReport {
    pub vertices: PointSet,
    /// Indices into the input of points that are not vertices.
    pub non_vertices: Vec<usize>,
    /// Lattice points of the hull, by a bounding-box scan; `None` when the box
    /// exceeds [`LATTICE_SCAN_LIMIT`].
    pub lattice_points: Option<Vec<Vec<i64>>>,
    /// For 0/1 inputs, membership of every cube point (in binary order of
    /// the coordinate vector, first coordinate most significant).
    pub cube_membership: Option<Vec<bool>>,
}

/// Splits a point set into vertices and non-vertices by exact feasibility.
pub fn vertex_hull(s: &PointSet) -> Result<HullReport, MatrixError> {
    let n = s.len();
    let mut vertex_idx = Vec::new();
    let mut non_vertices = Vec::new();
    for j in 0..n {
        let others: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        if in_convex_hull(&s.points.select_columns(&others)?, &s.point(j))? {
            non_vertices.push(j);
        } else {
            vertex_idx.push(j);
        }
    }
    let vertices = PointSet { points: s.points.select_columns(&vertex_idx)? };
    let d = s.dimension();
    let lattice_points = if n == 0 {
        Some(Vec::new())
    } else if d == 0 {
        Some(vec![Vec::new()])
    } else {
        let lo: Vec<i64> = (0..d).map(|i| s.points.row(i).iter().copied().min().unwrap_or(0)).collect();
        let hi: Vec<i64> = (0..d).map(|i| s.points.row(i).iter().copied().max().unwrap_or(0)).collect();
        let volume = lo.iter().zip(&hi).try_fold(1u64, |acc, (l, h)| {
            acc.checked_mul(u64::try_from(i128::from(*h) - i128::from(*l) + 1).ok()?)
        });
        match volume {
            Some(v) if v <= LATTICE_SCAN_LIMIT => {
                let ranges = lo.iter().zip(&hi).map(|(&l, &h)| l..=h);
                let mut pts = Vec::new();
                for p in ranges.multi_cartesian_product() {
                    if in_convex_hull(&vertices.points, &p)? {
                        pts.push(p);
                    }
                }
                Some(pts)
            }
            _ => None,
        }
    };
    let cube_membership = if s.is_zero_one() && d <= 16 {
        let mut m = Vec::with_capacity(1 << d);
        for code in 0..1u32 << d {
            let p = cube_point(d, code);
            m.push(in_convex_hull(&vertices.points, &p)?);
        }
        Some(m)
    } else {
        None
    };
    Ok(HullReport { vertices, non_vertices, lattice_points, cube_membership })
}

/// Cube point with coordinate `i` equal to bit `d - 1 - i` of `code`.
pub fn cube_point(d: usize, code: u32) -> Vec<i64> {
    (0..d).map(|i| i64::from(code >> (d - 1 - i) & 1)).collect()
}

/// Determinant of the `d x d` matrix of differences `p_{s_k} - p_{s_0}`.
pub(crate) fn simplex_determinant(points: &[Vec<i64>], subset: &[usize]) -> Result<i128, MatrixError> {
    let d = subset.len() - 1;
    let base = &points[subset[0]];
    let mut buf = Vec::with_capacity(d * d);
    for i in 0..d {
        for &k in &subset[1..] {
            buf.push(i128::from(points[k][i]) - i128::from(base[i]));
        }
    }
    bareiss_determinant(d, &mut buf)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnimodularReport {
    pub unimodular: bool,
    /// First vertex subset (lexicographic) spanning a simplex of normalized
    /// volume other than 0 or 1, with its difference determinant.
    pub witness: Option<(Vec<usize>, i64)>,
}

/// Every full-dimensional simplex on the vertices has determinant `±1`.
pub fn is_unimodular_polytope(v: &PointSet) -> Result<UnimodularReport, PolytopeError> {
    let d = v.dimension();
    let affine = v.affine_dimension()?;
    if affine != Some(d) {
        return Err(PolytopeError::NotFullDimensional { affine: affine.unwrap_or(0), ambient: d });
    }
    let hull = vertex_hull(v)?;
    if let Some(&j) = hull.non_vertices.first() {
        return Err(PolytopeError::NotConvexPosition(j));
    }
    let pts = v.points();
    for subset in (0..v.len()).combinations(d + 1) {
        let det = simplex_determinant(&pts, &subset)?;
        if det.abs() > 1 {
            let det = crate::matrix::to_i64(det)?;
            return Ok(UnimodularReport { unimodular: false, witness: Some((subset, det)) });
        }
    }
    Ok(UnimodularReport { unimodular: true, witness: None })
}

/// Points `e_i + e_j` for the edges of a bipartite graph on parts
/// `0..a` and `a..a+b`.
pub fn edge_polytope(a: usize, b: usize, edges: &[(usize, usize)]) -> Result<PointSet, PolytopeError> {
    let n = a + b;
    let mut pts = Vec::with_capacity(edges.len());
    for &(x, y) in edges {
        for vertex in [x, y] {
            if vertex >= n {
                return Err(PolytopeError::VertexOutOfRange { vertex, vertices: n });
            }
        }
        if (x < a) == (y < a) {
            return Err(PolytopeError::NotBipartite(x, y));
        }
        let mut p = vec![0; n];
        p[x] = 1;
        p[y] = 1;
        pts.push(p);
    }
    PointSet::from_points(n, &pts)
}

/// Edges of `K_{a,b}` on parts `0..a` and `a..a+b`.
pub fn complete_bipartite_edges(a: usize, b: usize) -> Vec<(usize, usize)> {
    (0..a).cartesian_product(a..a + b).collect()
}

/// Vertices of `Δ_a × Δ_b` in `Z^{a+b}`, with `Δ_k = conv(0, e_1, ..., e_k)`.
pub fn simplex_product(a: usize, b: usize) -> PointSet {
    let unit = |k: usize, i: usize| -> Vec<i64> { (1..=k).map(|t| i64::from(t == i)).collect() };
    let pts: Vec<Vec<i64>> = (0..=a)
        .cartesian_product(0..=b)
        .map(|(i, j)| {
            let mut p = unit(a, i);
            p.extend(unit(b, j));
            p
        })
        .collect();
    PointSet::from_points(a + b, &pts).expect("simplex product vertices are distinct")
}

/// `(I | B)` form of a polytopal unimodular matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardForm {
    /// `R^{-1} M P = (I | B)`.
    pub matrix: IntMatrix,
    pub b: IntMatrix,
    /// Columns of `M` forming the leftmost lattice basis.
    pub transform: IntMatrix,
    /// Column order `P`: basis columns first, then the rest in order.
    pub column_order: Vec<usize>,
}

/// Brings a full-row-rank polytopal unimodular matrix into the form `(I | B)`
/// with all column sums 1; both `B` and `(I | B)` are re-certified TU.
pub fn normalize_standard_form(m: &IntMatrix) -> Result<StandardForm, PolytopeError> {
    if !is_unimodular(m)? {
        return Err(PolytopeError::NotUnimodular);
    }
    if polytopal_certificate(m)?.is_none() {
        return Err(PolytopeError::NotPolytopal);
    }
    let mut basis: Vec<usize> = Vec::new();
    for j in 0..m.cols() {
        if basis.len() == m.rows() {
            break;
        }
        let mut trial = basis.clone();
        trial.push(j);
        if m.select_columns(&trial)?.rank()? == trial.len() {
            basis = trial;
        }
    }
    let r = m.select_columns(&basis)?;
    let r_inv = unimodular_inverse(&r)?.ok_or(PolytopeError::NotUnimodular)?;
    let column_order: Vec<usize> = basis.iter().copied().chain((0..m.cols()).filter(|j| !basis.contains(j))).collect();
    let matrix = r_inv.mul(&m.select_columns(&column_order)?)?;
    let rest: Vec<usize> = (m.rows()..m.cols()).collect();
    let b = matrix.select_columns(&rest)?;
    let sums_ok = matrix.column_sums()?.iter().all(|&s| s == 1);
    if !sums_ok || !certify_tu(&matrix)?.is_tu || !certify_tu(&b)?.is_tu {
        return Err(PolytopeError::Recertification);
    }
    Ok(StandardForm { matrix, b, transform: r, column_order })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexBoundReport {
    pub dimension: usize,
    pub vertex_count: usize,
    pub unimodular: bool,
    /// 10 for dimension 4, otherwise `floor((d + 2)^2 / 4)`.
    pub bound: usize,
    pub tight: bool,
    pub ok: bool,
}

pub fn vertex_bound(d: usize) -> usize {
    if d == 4 {
        10
    } else {
        (d + 2) * (d + 2) / 4
    }
}

/// Vertex count of a unimodular polytope against the dimension bound.
/// Lower-dimensional inputs are measured in intrinsic coordinates.
pub fn vertex_bound_check(p: &PointSet) -> Result<VertexBoundReport, PolytopeError> {
    let q = p.intrinsic()?;
    let unimodular = is_unimodular_polytope(&q)?.unimodular;
    let dimension = q.dimension();
    let bound = vertex_bound(dimension);
    let vertex_count = q.len();
    Ok(VertexBoundReport {
        dimension,
        vertex_count,
        unimodular,
        bound,
        tight: vertex_count == bound,
        ok: !unimodular || vertex_count <= bound,
    })
}
