//! Network matrices of directed trees and digraphs, the identity extension
//! for transposed network matrices, and path patterns on trees.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{parse_token, tokens, IntMatrix, MatrixError, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("arc {arc} uses vertex {vertex}, but the graph has {vertices} vertices")]
    VertexOutOfRange { arc: usize, vertex: usize, vertices: usize },
    #[error("supplied realization does not reproduce the matrix")]
    WitnessMismatch,
    #[error("at most {MAX_VERTICES} vertices are supported, got {0}")]
    TooManyVertices(usize),
    #[error("at most 64 paths are supported, got {0}")]
    TooManyPaths(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Vertex-indexed tables are allocated eagerly, so counts are capped.
pub const MAX_VERTICES: usize = 1 << 20;

/// Vertices `0..vertices` and an ordered arc list. Arc order fixes the row or
/// column order of every derived matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcGraph {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl ArcGraph {
    pub fn new(vertices: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if vertices > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(vertices));
        }
        let g = ArcGraph { vertices, arcs };
        g.check_range(vertices)?;
        Ok(g)
    }

    fn check_range(&self, vertices: usize) -> Result<(), GraphError> {
        for (arc, &(s, t)) in self.arcs.iter().enumerate() {
            for vertex in [s, t] {
                if vertex >= vertices {
                    return Err(GraphError::VertexOutOfRange { arc, vertex, vertices });
                }
            }
        }
        Ok(())
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn reversed_arc(&self, k: usize) -> ArcGraph {
        let mut g = self.clone();
        let (s, t) = g.arcs[k];
        g.arcs[k] = (t, s);
        g
    }

    /// Graph text format: `vertices arcs` header, then one `tail head` line per arc.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertices, self.arcs.len());
        for (t, h) in &self.arcs {
            s.push_str(&format!("{t} {h}\n"));
        }
        s
    }

    /// Undirected 2-colouring of the underlying graph, if one exists.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(s, t) in &self.arcs {
            if s == t {
                return None;
            }
            adj[s].push(t);
            adj[t].push(s);
        }
        let mut side = vec![u8::MAX; self.vertices];
        for start in 0..self.vertices {
            if side[start] != u8::MAX {
                continue;
            }
            side[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[v];
                        queue.push_back(w);
                    } else if side[w] == side[v] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }
}

/// Parses the graph text format.
pub fn parse_graph(text: &str) -> Result<ArcGraph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let Some((hline, header)) = lines.next() else {
        return Err(ParseError::new(1, 1, "missing `vertices arcs` header"));
    };
    let head: Vec<_> = tokens(header).collect();
    if head.len() != 2 {
        return Err(ParseError::new(hline, 1, "header must be exactly `vertices arcs`"));
    }
    let vertices: usize = parse_token(hline, head[0].0, head[0].1, "vertex count")?;
    if vertices > MAX_VERTICES {
        return Err(ParseError::new(hline, head[0].0, format!("vertex count exceeds {MAX_VERTICES}")));
    }
    let arcs: usize = parse_token(hline, head[1].0, head[1].1, "arc count")?;
    if arcs > text.len() {
        return Err(ParseError::new(hline, head[1].0, "declared arc count exceeds the input size"));
    }
    let mut list = Vec::with_capacity(arcs);
    let mut last = hline;
    for k in 0..arcs {
        let Some((lno, line)) = lines.next() else {
            return Err(ParseError::new(last + 1, 1, format!("expected {arcs} arcs, found {k}")));
        };
        last = lno;
        list.push(parse_pair(lno, line, vertices, "vertex")?);
    }
    if let Some((lno, _)) = lines.next() {
        return Err(ParseError::new(lno, 1, "unexpected content after the last arc"));
    }
    Ok(ArcGraph { vertices, arcs: list })
}

fn parse_pair(lno: usize, line: &str, vertices: usize, what: &str) -> Result<(usize, usize), ParseError> {
    let toks: Vec<_> = tokens(line).collect();
    if toks.len() != 2 {
        let col = toks.get(2).map_or(line.len() + 1, |t| t.0);
        return Err(ParseError::new(lno, col, format!("expected two {what} indices")));
    }
    let mut pair = [0usize; 2];
    for (slot, &(col, tok)) in pair.iter_mut().zip(&toks) {
        let v: usize = parse_token(lno, col, tok, what)?;
        if v >= vertices {
            return Err(ParseError::new(lno, col, format!("{what} {v} out of range (0..{vertices})")));
        }
        *slot = v;
    }
    Ok((pair[0], pair[1]))
}

/// Parses a paths file: one `endpoint endpoint` pair per line. Endpoints are
/// checked against `vertices`.
pub fn parse_paths(text: &str, vertices: usize) -> Result<Vec<(usize, usize)>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_pair(i + 1, l, vertices, "endpoint"))
        .collect()
}

/// A directed tree rooted at vertex 0 with parent pointers.
#[derive(Debug, Clone)]
pub struct Tree {
    graph: ArcGraph,
    parent: Vec<usize>,
    /// Index of the arc joining a vertex to its parent.
    parent_arc: Vec<usize>,
    depth: Vec<usize>,
}

/// One step of a tree path: arc index and `+1` (traversed along its
/// orientation) or `-1`.
pub type PathStep = (usize, i64);

impl Tree {
    pub fn new(graph: ArcGraph) -> Result<Self, GraphError> {
        graph.check_range(graph.vertices)?;
        let n = graph.vertices;
        if n == 0 {
            return Err(GraphError::NotATree("no vertices".into()));
        }
        if graph.arcs.len() + 1 != n {
            return Err(GraphError::NotATree(format!("{} arcs on {n} vertices", graph.arcs.len())));
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, &(s, t)) in graph.arcs.iter().enumerate() {
            if s == t {
                return Err(GraphError::NotATree(format!("arc {k} is a loop")));
            }
            adj[s].push((t, k));
            adj[t].push((s, k));
        }
        let mut parent = vec![usize::MAX; n];
        let mut parent_arc = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(w, k) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    parent_arc[w] = k;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(GraphError::NotATree(format!("vertex {v} is not connected to vertex 0")));
        }
        Ok(Tree { graph, parent, parent_arc, depth })
    }

    pub fn graph(&self) -> &ArcGraph {
        &self.graph
    }

    pub fn vertices(&self) -> usize {
        self.graph.vertices
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arcs.len()
    }

    /// Arcs on the unique path from `s` to `t`, in order of traversal.
    pub fn path(&self, s: usize, t: usize) -> Vec<PathStep> {
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (s, t);
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let k = self.parent_arc[a];
                // Moving a -> parent(a).
                up.push((k, if self.graph.arcs[k].0 == a { 1 } else { -1 }));
                a = self.parent[a];
            } else {
                let k = self.parent_arc[b];
                // The final path moves parent(b) -> b.
                down.push((k, if self.graph.arcs[k].1 == b { 1 } else { -1 }));
                b = self.parent[b];
            }
        }
        down.reverse();
        up.extend(down);
        up
    }

    /// Network-matrix column of an arc `s -> t`.
    pub fn column(&self, s: usize, t: usize) -> Vec<i64> {
        let mut c = vec![0; self.arc_count()];
        for (k, sign) in self.path(s, t) {
            c[k] = sign;
        }
        c
    }
}

/// `|A0| x |A|` matrix whose column for `s -> t` records the orientation of
/// each tree arc along the tree path from `s` to `t`.
pub fn network_matrix(tree: &ArcGraph, digraph: &ArcGraph) -> Result<IntMatrix, GraphError> {
    let tree = Tree::new(tree.clone())?;
    network_matrix_of(&tree, digraph)
}

pub fn network_matrix_of(tree: &Tree, digraph: &ArcGraph) -> Result<IntMatrix, GraphError> {
    digraph.check_range(tree.vertices())?;
    let cols: Vec<Vec<i64>> = digraph.arcs.iter().map(|&(s, t)| tree.column(s, t)).collect();
    Ok(IntMatrix::from_columns(tree.arc_count(), &cols)?)
}

/// Tree and digraph realizing a network matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub tree: ArcGraph,
    pub digraph: ArcGraph,
}

/// Given `M'` with `M'^T = network_matrix(tree, digraph)`, builds the
/// realization of `(I | M')` as a transposed network matrix: for each digraph
/// arc `s -> t` a new vertex `v`, a tree arc `v -> s` and a digraph arc
/// `v -> t`. New tree arcs come first, in digraph-arc order.
pub fn transpose_extension(mprime: &IntMatrix, realization: &Realization) -> Result<(IntMatrix, Realization), GraphError> {
    let n = network_matrix(&realization.tree, &realization.digraph)?;
    if n.transpose() != *mprime {
        return Err(GraphError::WitnessMismatch);
    }
    let base = realization.tree.vertices;
    let new_arcs = realization.digraph.arcs.len();
    let mut tree_arcs = Vec::with_capacity(new_arcs + realization.tree.arcs.len());
    let mut digraph_arcs = Vec::with_capacity(new_arcs);
    for (k, &(s, t)) in realization.digraph.arcs.iter().enumerate() {
        tree_arcs.push((base + k, s));
        digraph_arcs.push((base + k, t));
    }
    tree_arcs.extend_from_slice(&realization.tree.arcs);
    let extended = Realization {
        tree: ArcGraph { vertices: base + new_arcs, arcs: tree_arcs },
        digraph: ArcGraph { vertices: base + new_arcs, arcs: digraph_arcs },
    };
    let m = IntMatrix::identity(new_arcs).hconcat(mprime)?;
    Ok((m, extended))
}

/// Set of path indices, one bit per path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern(pub u64);

impl Pattern {
    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }

    pub fn members(self) -> Vec<usize> {
        (0..64).filter(|&j| self.contains(j)).collect()
    }
}

/// Distinct nonempty patterns `{ j : e on path j }` over the tree edges.
/// Arc orientation is ignored.
pub fn edge_patterns(tree: &ArcGraph, paths: &[(usize, usize)]) -> Result<BTreeSet<Pattern>, GraphError> {
    if paths.len() > 64 {
        return Err(GraphError::TooManyPaths(paths.len()));
    }
    let tree = Tree::new(tree.clone())?;
    for (arc, &(s, t)) in paths.iter().enumerate() {
        for vertex in [s, t] {
            if vertex >= tree.vertices() {
                return Err(GraphError::VertexOutOfRange { arc, vertex, vertices: tree.vertices() });
            }
        }
    }
    let mut bits = vec![0u64; tree.arc_count()];
    for (j, &(s, t)) in paths.iter().enumerate() {
        for (k, _) in tree.path(s, t) {
            bits[k] |= 1 << j;
        }
    }
    Ok(bits.into_iter().filter(|&b| b != 0).map(Pattern).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternReport {
    pub paths: usize,
    pub count: usize,
    pub odd_count: usize,
    /// `3m - 3`, applicable for `m >= 2`.
    pub bound: Option<usize>,
    /// `3m - 5`, applicable for `m >= 3`.
    pub odd_bound: Option<usize>,
    pub bound_ok: bool,
    pub odd_bound_ok: bool,
}

pub fn verify_pattern_bounds(tree: &ArcGraph, paths: &[(usize, usize)]) -> Result<PatternReport, GraphError> {
    let patterns = edge_patterns(tree, paths)?;
    Ok(pattern_report(paths.len(), &patterns))
}

pub fn pattern_report(m: usize, patterns: &BTreeSet<Pattern>) -> PatternReport {
    let count = patterns.len();
    let odd_count = patterns.iter().filter(|p| p.size() % 2 == 1).count();
    let bound = (m >= 2).then(|| 3 * m - 3);
    let odd_bound = (m >= 3).then(|| 3 * m - 5);
    PatternReport {
        paths: m,
        count,
        odd_count,
        bound,
        odd_bound,
        bound_ok: bound.is_none_or(|b| count <= b),
        odd_bound_ok: odd_bound.is_none_or(|b| odd_count <= b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkBoundReport {
    /// Columns pairwise distinct with positive odd sums.
    pub applicable: bool,
    pub arcs: usize,
    pub tree_arcs: usize,
    /// `(|A0| + 1)^2 / 4` as a numerator over 4.
    pub bound_times_four: usize,
    pub bipartite: bool,
    pub equality: bool,
    /// At equality: `|A0|` odd and the underlying graph is complete bipartite
    /// with two parts of size `(|A0| + 1) / 2`.
    pub equality_structure_ok: bool,
    pub ok: bool,
}

/// Column bound for network matrices with distinct columns of positive odd
/// sum, together with the bipartiteness of the digraph that drives it.
pub fn verify_network_column_bound(tree: &ArcGraph, digraph: &ArcGraph) -> Result<NetworkBoundReport, GraphError> {
    let m = network_matrix(tree, digraph)?;
    let sums = m.column_sums()?;
    let applicable = m.columns_distinct() && sums.iter().all(|&s| s > 0 && s % 2 == 1);
    let tree_arcs = tree.arcs.len();
    let arcs = digraph.arcs.len();
    let bound_times_four = (tree_arcs + 1) * (tree_arcs + 1);
    let bipartition = digraph_on(tree.vertices, digraph).bipartition();
    let bipartite = bipartition.is_some();
    let equality = 4 * arcs == bound_times_four;
    let equality_structure_ok = !equality || complete_balanced_bipartite(tree.vertices, digraph, bipartition.as_deref());
    let ok = !applicable || (4 * arcs <= bound_times_four && bipartite && equality_structure_ok);
    Ok(NetworkBoundReport { applicable, arcs, tree_arcs, bound_times_four, bipartite, equality, equality_structure_ok, ok })
}

fn digraph_on(vertices: usize, d: &ArcGraph) -> ArcGraph {
    ArcGraph { vertices, arcs: d.arcs.clone() }
}

fn complete_balanced_bipartite(vertices: usize, d: &ArcGraph, sides: Option<&[u8]>) -> bool {
    let Some(sides) = sides else { return false };
    if !vertices.is_multiple_of(2) {
        return false;
    }
    let left = sides.iter().filter(|&&s| s == 0).count();
    let edges: HashSet<(usize, usize)> = d.arcs.iter().map(|&(s, t)| (s.min(t), s.max(t))).collect();
    left * 2 == vertices && edges.len() == left * left
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransposeBoundReport {
    pub arcs: usize,
    pub distinct_pos_rows: usize,
    pub distinct_pos_odd_rows: usize,
    /// `3|A| - 3`, compared only when `|A| >= 2`.
    pub bound: Option<usize>,
    /// `3|A| - 5`, compared only when `|A| >= 3`.
    pub odd_bound: Option<usize>,
    /// Distinct positive-sum rows remain distinct modulo 2.
    pub mod2_distinct: bool,
    pub bounds_ok: bool,
}

/// Row bounds for a network matrix with `|A|` columns.
pub fn verify_transpose_row_bound(m: &IntMatrix) -> Result<TransposeBoundReport, GraphError> {
    let arcs = m.cols();
    let sums = m.row_sums()?;
    let mut positive: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut positive_odd: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (i, &s) in sums.iter().enumerate() {
        if s > 0 {
            positive.insert(m.row(i).to_vec());
            if s % 2 != 0 {
                positive_odd.insert(m.row(i).to_vec());
            }
        }
    }
    let supports: BTreeSet<Vec<bool>> = positive.iter().map(|r| r.iter().map(|&v| v != 0).collect()).collect();
    let mod2_distinct = supports.len() == positive.len();
    let bound = (arcs >= 2).then(|| 3 * arcs - 3);
    let odd_bound = (arcs >= 3).then(|| 3 * arcs - 5);
    let bounds_ok =
        bound.is_none_or(|b| positive.len() <= b) && odd_bound.is_none_or(|b| positive_odd.len() <= b);
    Ok(TransposeBoundReport {
        arcs,
        distinct_pos_rows: positive.len(),
        distinct_pos_odd_rows: positive_odd.len(),
        bound,
        odd_bound,
        mod2_distinct,
        bounds_ok,
    })
}

/// AHU code of the tree rooted at `root`.
fn rooted_code(adj: &[Vec<usize>], root: usize, parent: usize) -> String {
    let mut children: Vec<String> =
        adj[root].iter().filter(|&&w| w != parent).map(|&w| rooted_code(adj, w, root)).collect();
    children.sort_unstable();
    format!("({})", children.concat())
}

/// Least rooted code over all roots; equal exactly for isomorphic trees.
fn tree_code(vertices: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); vertices];
    for &(s, t) in edges {
        adj[s].push(t);
        adj[t].push(s);
    }
    (0..vertices).map(|r| rooted_code(&adj, r, usize::MAX)).min().unwrap_or_default()
}

/// One representative of every isomorphism class of trees on `vertices`
/// vertices, with arcs oriented parent to child from vertex 0.
pub fn unlabeled_trees(vertices: usize) -> Vec<ArcGraph> {
    if vertices == 0 {
        return Vec::new();
    }
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for n in 2..=vertices {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for edges in &level {
            for attach in 0..n - 1 {
                let mut grown = edges.clone();
                grown.push((attach, n - 1));
                if seen.insert(tree_code(n, &grown)) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level.into_iter().map(|arcs| ArcGraph { vertices, arcs }).collect()
}
