//! Seeded random trees, digraphs, network matrices and valid sum specs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::compose::SumSpec;
use crate::graphical::{network_matrix, ArcGraph};
use crate::matrix::IntMatrix;

/// Random tree on `vertices >= 1` vertices with random arc orientations and
/// arc order.
pub fn random_tree<R: Rng>(rng: &mut R, vertices: usize) -> ArcGraph {
    let mut arcs: Vec<(usize, usize)> = (1..vertices)
        .map(|v| {
            let p = rng.gen_range(0..v);
            if rng.gen_bool(0.5) {
                (p, v)
            } else {
                (v, p)
            }
        })
        .collect();
    arcs.shuffle(rng);
    ArcGraph { vertices, arcs }
}

/// `arcs` uniformly random arcs; loops allowed.
pub fn random_digraph<R: Rng>(rng: &mut R, vertices: usize, arcs: usize) -> ArcGraph {
    let arcs = (0..arcs).map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices))).collect();
    ArcGraph { vertices, arcs }
}

/// Network matrix with `rows` tree arcs and `cols` random arcs, transposed
/// with probability one half when `rows == cols`.
pub fn random_tu_block<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> IntMatrix {
    let t = random_tree(rng, rows + 1);
    let d = random_digraph(rng, rows + 1, cols);
    let m = network_matrix(&t, &d).expect("tree is valid");
    if rows == cols && rng.gen_bool(0.5) {
        m.transpose()
    } else {
        m
    }
}

fn distinct3<R: Rng>(rng: &mut R, n: usize) -> [usize; 3] {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    [v[0], v[1], v[2]]
}

/// Network matrix `(M | a | b | c)` where the last three columns come from a
/// directed triangle and so sum to zero. Needs `rows >= 2`.
fn with_triangle<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> (IntMatrix, [Vec<i64>; 3]) {
    let t = random_tree(rng, rows + 1);
    let mut d = random_digraph(rng, rows + 1, cols);
    let [p, q, r] = distinct3(rng, rows + 1);
    d.arcs.extend([(p, q), (q, r), (r, p)]);
    let n = network_matrix(&t, &d).expect("tree is valid");
    let main = n.select_columns(&(0..cols).collect::<Vec<_>>()).expect("in range");
    (main, [n.column(cols), n.column(cols + 1), n.column(cols + 2)])
}

/// Random valid 2-sum with blocks of at most 4 rows and 4 columns.
pub fn random_two_sum<R: Rng>(rng: &mut R) -> SumSpec {
    let (m1, n1, m2, n2) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
    let f1 = random_tu_block(rng, m1, n1 + 1);
    let f2 = random_tu_block(rng, m2 + 1, n2);
    let a = f1.select_columns(&(0..n1).collect::<Vec<_>>()).expect("in range");
    let u = f1.column(n1);
    let v = f2.row(0).to_vec();
    let b = f2.select_rows(&(1..=m2).collect::<Vec<_>>()).expect("in range");
    SumSpec::two_sum(a, u, v, b)
}

/// Random valid 3-sum: `(A|u1|u2|u3)` is a network matrix with a triangle,
/// `(v1^T; v2^T; v3^T; B)` the transpose of one, and `C = u1 v2^T - u2 v1^T`.
pub fn random_three_sum<R: Rng>(rng: &mut R) -> SumSpec {
    let m1 = rng.gen_range(2..=4);
    let n1 = rng.gen_range(4 - m1.min(3)..=3);
    let n2 = rng.gen_range(2..=4);
    let m2 = rng.gen_range(4 - n2.min(3)..=3);
    let (a, u) = with_triangle(rng, m1, n1);
    let (bt, v) = with_triangle(rng, n2, m2);
    let b = bt.transpose();
    let c = glue(&u, &v);
    SumSpec::three_sum(a, u, v, b, c)
}

/// `u1 v2^T - u2 v1^T`; with ternary `u3` and `v3` every row and column lands
/// in the allowed sets.
pub fn glue(u: &[Vec<i64>; 3], v: &[Vec<i64>; 3]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..u[0].len())
        .map(|i| (0..v[0].len()).map(|j| u[0][i] * v[1][j] - u[1][i] * v[0][j]).collect())
        .collect();
    IntMatrix::from_rows(&rows).unwrap_or_else(|_| IntMatrix::zeros(u[0].len(), v[0].len()))
}

/// Network matrix `(A u' u'; u^T 0 x)`: the last tree arc joins a leaf `l` to
/// `p`, and the two extra digraph arcs run from `s` to `p` and to `l`.
fn delta_factor<R: Rng>(rng: &mut R, rows: usize, cols: usize, x: i64) -> (IntMatrix, Vec<i64>, Vec<i64>) {
    let mut t = random_tree(rng, rows + 1);
    let leaf = rows + 1;
    let p = rng.gen_range(0..=rows);
    t.vertices += 1;
    t.arcs.push(if x == 1 { (p, leaf) } else { (leaf, p) });
    let mut d = random_digraph(rng, rows + 2, cols);
    let s = loop {
        let s = rng.gen_range(0..=rows);
        if s != p {
            break s;
        }
    };
    d.arcs.extend([(s, p), (s, leaf)]);
    let n = network_matrix(&t, &d).expect("tree is valid");
    let top: Vec<usize> = (0..rows).collect();
    let a = n.select(&top, &(0..cols).collect::<Vec<_>>()).expect("in range");
    let u = n.row(rows)[..cols].to_vec();
    let u_prime = n.column(cols)[..rows].to_vec();
    (a, u, u_prime)
}

/// Random valid Δ-sum with blocks of size at least 4.
pub fn random_delta_sum<R: Rng>(rng: &mut R) -> SumSpec {
    let x = if rng.gen_bool(0.5) { 1 } else { -1 };
    let m1 = rng.gen_range(1..=3);
    let n1 = rng.gen_range(4 - m1..=3);
    let m2 = rng.gen_range(1..=3);
    let n2 = rng.gen_range(4 - m2..=3);
    let (a, u, u_prime) = delta_factor(rng, m1, n1, x);
    let (b, v, v_prime) = delta_factor(rng, m2, n2, x);
    SumSpec::delta_sum(a, u, u_prime, v, v_prime, b, x)
}
