//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Stretch runs are reported and never fail the run.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tumax::certify::{
    certify_tu, ghouila_houri_check_with, is_prepared, is_totally_unimodular_with, w_valued_certificate, Functional,
    TuBudget, TuMethod,
};
use tumax::compose::{compose, transport_functional, ComposeError, SumKind, SumSpec};
use tumax::families::{bipartite_extremal, ex4_matrix, h, heller_family, sporadic_5x10, verify_extralemma};
use tumax::graphical::{
    network_matrix, unlabeled_trees, verify_network_column_bound, verify_pattern_bounds, verify_transpose_row_bound,
    ArcGraph, Tree,
};
use tumax::polytope::{
    classify_unimodular, is_unimodular_polytope, lattice_isomorphic, normalize_standard_form, simplex_product,
    vertex_bound, vertex_bound_check, Classification, ClassifyOptions, PointSet,
};
use tumax::sample;
use tumax::search::{max_polytopal_tu_columns, max_tu_columns, SearchOptions};
use tumax::IntMatrix;

struct Run {
    failures: Vec<String>,
    passed: usize,
}

impl Run {
    fn record(&mut self, id: &str, title: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => {
                self.passed += 1;
                println!("PASS {id} {title}: {detail} ({elapsed:.2?})");
            }
            Err(detail) => {
                println!("FAIL {id} {title}: {detail} ({elapsed:.2?})");
                self.failures.push(id.to_string());
            }
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Laplace expansion; independent of the library's elimination.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Every square submatrix by brute force.
fn brute_tu(m: &IntMatrix) -> bool {
    let (r, c) = m.shape();
    for k in 1..=r.min(c) {
        for rows in (0..r).combinations(k) {
            for cols in (0..c).combinations(k) {
                let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j)).collect()).collect();
                if cofactor_det(&sub).abs() > 1 {
                    return false;
                }
            }
        }
    }
    true
}

fn oracle_pair(m: &IntMatrix) -> Result<(bool, bool), String> {
    let budget = TuBudget::unlimited();
    let a = is_totally_unimodular_with(m, TuMethod::MinorEnumeration, &budget).map_err(err)?.is_tu;
    let b = ghouila_houri_check_with(m, &budget).map_err(err)?.is_tu;
    Ok((a, b))
}

fn both_tu(m: &IntMatrix) -> Result<bool, String> {
    let (a, b) = oracle_pair(m)?;
    ensure(a == b, || format!("oracles disagree on\n{m}"))?;
    Ok(a)
}

fn distinct_columns(m: &IntMatrix) -> usize {
    m.columns().collect::<HashSet<_>>().len()
}

fn random_ternary(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1..=1)).collect()).expect("shape")
}

/// TU block, possibly with one entry changed.
fn mixed_sample(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    match rng.gen_range(0..3) {
        0 => random_ternary(rng, rows, cols),
        1 => sample::random_tu_block(rng, rows, cols),
        _ => {
            let m = sample::random_tu_block(rng, rows, cols);
            let mut e = m.entries().to_vec();
            let k = rng.gen_range(0..e.len());
            e[k] = [-1, 0, 1].into_iter().filter(|&v| v != e[k]).collect::<Vec<_>>()[rng.gen_range(0..2)];
            IntMatrix::new(rows, cols, e).expect("shape")
        }
    }
}

fn criterion_1() -> Result<String, String> {
    for m in 2..=6 {
        let hm = heller_family(m);
        ensure(distinct_columns(&hm) == m * m + m + 1 && hm.cols() == m * m + m + 1, || format!("heller({m}) columns"))?;
        ensure(certify_tu(&hm).map_err(err)?.is_tu, || format!("heller({m}) not TU"))?;
    }
    for m in (1..=9).filter(|&m| m != 5) {
        let b = bipartite_extremal(m).map_err(err)?;
        let target = (m + 1) * (m + 1) / 4;
        ensure(b.cols() == target && distinct_columns(&b) == target, || format!("bipartite({m}) has {} columns", b.cols()))?;
        ensure(is_prepared(&b).map_err(err)?, || format!("bipartite({m}) not prepared"))?;
    }
    let s = sporadic_5x10();
    ensure(s.cols() == 10 && is_prepared(&s).map_err(err)?, || "sporadic 5x10 not prepared".into())?;
    ensure(h(5).map_err(err)? == 10, || "h(5) != 10".into())?;
    Ok("heller m=2..6, bipartite m in 1..9 minus 5, sporadic 5x10".into())
}

fn criterion_2() -> Result<String, String> {
    let mut parts = Vec::new();
    for (m, expected) in [(2, 2), (3, 4), (4, 6), (5, 10)] {
        let r = max_polytopal_tu_columns(m, &SearchOptions::default()).map_err(err)?;
        ensure(r.complete && r.max_columns == expected, || format!("polytopal m={m}: {} complete={}", r.max_columns, r.complete))?;
        ensure(r.witness.cols() == expected && is_prepared(&r.witness).map_err(err)?, || format!("polytopal m={m} witness"))?;
        parts.push(format!("h({m})={}", r.max_columns));
    }
    for (m, expected) in [(1, 3), (2, 7), (3, 13)] {
        let r = max_tu_columns(m, &SearchOptions::default()).map_err(err)?;
        ensure(r.complete && r.max_columns == expected, || format!("heller m={m}: {} complete={}", r.max_columns, r.complete))?;
        ensure(distinct_columns(&r.witness) == expected && both_tu(&r.witness)?, || format!("heller m={m} witness"))?;
        parts.push(format!("heller({m})={}", r.max_columns));
    }
    Ok(parts.join(", "))
}

fn stretch_polytopal_six() -> String {
    let options = SearchOptions { max_seconds: Some(3600.0), ..Default::default() };
    match max_polytopal_tu_columns(6, &options) {
        Ok(r) => format!(
            "m=6 verify: max_columns={} complete={} nodes={} target 12 {}",
            r.max_columns,
            r.complete,
            r.nodes,
            if r.complete && r.max_columns == 12 { "reached" } else { "not confirmed" }
        ),
        Err(e) => format!("m=6 verify: {e}"),
    }
}

fn criterion_3() -> Result<String, String> {
    let reports = verify_extralemma(200).map_err(err)?;
    let expected: [&[(i64, i64)]; 4] = [&[], &[], &[(3, 1), (3, 3), (5, 1)], &[(2, 2), (2, 4), (4, 2)]];
    for (r, e) in reports.iter().zip(expected) {
        let e: BTreeSet<_> = e.iter().copied().collect();
        ensure(r.found == e && r.matches, || format!("part {}: found {:?}", r.part, r.found))?;
    }
    Ok("exception sets exact for x, y <= 200".into())
}

fn criterion_4(classes: &mut Vec<Classification>) -> Result<String, String> {
    let start = Instant::now();
    for (d, expected) in [(1, 1), (2, 2), (3, 4)] {
        let c = classify_unimodular(d, &ClassifyOptions::default()).map_err(err)?;
        let unpruned = classify_unimodular(d, &ClassifyOptions { pruned: false, stretch: false }).map_err(err)?;
        ensure(c.count == expected && unpruned.count == expected, || format!("d={d}: {} / {}", c.count, unpruned.count))?;
        ensure(c.classes == unpruned.classes, || format!("d={d}: pruned and unpruned classes differ"))?;
        classes.push(c);
    }
    let small = start.elapsed();
    ensure(small < Duration::from_secs(60), || format!("d<=3 took {small:.2?}"))?;
    let c4 = classify_unimodular(4, &ClassifyOptions::default()).map_err(err)?;
    ensure(c4.count == 13, || format!("d=4: {}", c4.count))?;
    classes.push(c4);
    // Equivalence relation on the d <= 3 classes: distinct classes are pairwise non-isomorphic.
    for c in &classes[..3] {
        for (i, a) in c.classes.iter().enumerate() {
            for (j, b) in c.classes.iter().enumerate() {
                let iso = lattice_isomorphic(&a.point_set(), &b.point_set()).map_err(err)?;
                ensure(iso == (i == j), || format!("d={}: classes {i} and {j}", c.dimension))?;
            }
        }
    }
    Ok(format!("counts {:?} (d<=3 in {small:.2?})", classes.iter().map(|c| c.count).collect::<Vec<_>>()))
}

fn criterion_5(classes: &[Classification]) -> Result<String, String> {
    ensure(classes.len() == 4, || "classification unavailable".into())?;
    let mut checked = 0;
    for c in classes {
        for k in &c.classes {
            let p = k.point_set();
            let r = vertex_bound_check(&p).map_err(err)?;
            ensure(r.unimodular && r.ok && r.vertex_count <= vertex_bound(c.dimension), || {
                format!("d={}: class with {} vertices", c.dimension, k.vertex_count)
            })?;
            // Unimodular polytopes have no lattice points besides vertices.
            let hull = tumax::polytope::vertex_hull(&p).map_err(err)?;
            let inside = hull.cube_membership.as_ref().map_or(0, |m| m.iter().filter(|&&b| b).count());
            ensure(inside == p.len() && hull.non_vertices.is_empty(), || format!("d={}: extra lattice points", c.dimension))?;
            checked += 1;
        }
    }
    let ex4 = PointSet::new(ex4_matrix()).map_err(err)?;
    let d4 = &classes[3];
    let attained: Vec<_> = d4.classes.iter().filter(|k| k.vertex_count == 10).collect();
    ensure(attained.len() == 1, || format!("{} classes with 10 vertices", attained.len()))?;
    ensure(lattice_isomorphic(&attained[0].point_set(), &ex4).map_err(err)?, || "10-vertex class is not ex4".into())?;
    let r = vertex_bound_check(&ex4).map_err(err)?;
    ensure(r.tight && r.ok, || "ex4 not tight".into())?;
    for d in [2usize, 3, 5, 6, 7] {
        let p = simplex_product(d.div_ceil(2), d / 2);
        let r = vertex_bound_check(&p).map_err(err)?;
        ensure(r.dimension == d && r.unimodular && r.tight, || format!("simplex product d={d}: {r:?}"))?;
    }
    Ok(format!("{checked} classes within bound, ex4 class attains 10, products tight for d in 2,3,5,6,7"))
}

fn criterion_6a(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut exhaustive = 0;
    for (r, c) in (1..=3).cartesian_product(1..=3) {
        for entries in (0..r * c).map(|_| [-1i64, 0, 1]).multi_cartesian_product() {
            let m = IntMatrix::new(r, c, entries).expect("shape");
            let (a, b) = oracle_pair(&m)?;
            let brute = brute_tu(&m);
            ensure(a == brute && b == brute, || format!("disagreement on\n{m}"))?;
            exhaustive += 1;
        }
    }
    let mut tu = 0;
    for _ in 0..1000 {
        let m = mixed_sample(rng, 5, 8);
        let (a, b) = oracle_pair(&m)?;
        ensure(a == b, || format!("disagreement on\n{m}"))?;
        tu += usize::from(a);
    }
    Ok(format!("{exhaustive} exhaustive, 1000 random 5x8 ({tu} TU)"))
}

fn criterion_6b(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut tu = 0;
    for _ in 0..500 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=6));
        let b = mixed_sample(rng, r, c);
        let ib = IntMatrix::identity(r).hconcat(&b).map_err(err)?;
        let with_identity = both_tu(&ib)?;
        let alone = brute_tu(&b);
        ensure(with_identity == alone, || format!("(I|B) vs B on\n{b}"))?;
        tu += usize::from(alone);
    }
    Ok(format!("500 samples ({tu} TU)"))
}

fn criterion_6c(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut counts = Vec::new();
    for kind in [SumKind::OneSum, SumKind::TwoSum, SumKind::ThreeSum, SumKind::DeltaSum] {
        for _ in 0..100 {
            let spec = match kind {
                SumKind::OneSum => {
                    let (r1, c1, r2, c2) =
                        (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
                    let a = sample::random_tu_block(rng, r1, c1);
                    let b = sample::random_tu_block(rng, r2, c2);
                    SumSpec::one_sum(a, b)
                }
                SumKind::TwoSum => sample::random_two_sum(rng),
                SumKind::ThreeSum => sample::random_three_sum(rng),
                SumKind::DeltaSum => sample::random_delta_sum(rng),
            };
            let r = compose(&spec).map_err(err)?;
            for f in &r.factors {
                ensure(both_tu(f)?, || format!("{kind}: factor not TU"))?;
            }
            ensure(both_tu(&r.matrix)?, || format!("{kind}: sum not TU\n{}", r.matrix))?;
        }
        counts.push(format!("{kind} 100"));
    }
    Ok(counts.join(", "))
}

fn nonzero_functional(rng: &mut ChaCha8Rng, len: usize) -> Functional {
    Functional((0..len).map(|_| [-2, -1, 1, 2][rng.gen_range(0..4)]).collect())
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_valued(factor: &IntMatrix, f: &[i64], w: &[i64], what: &str) -> Result<(), String> {
    ensure(factor.left_apply(f).map_err(err)? == w, || format!("{what}: f M != w"))?;
    ensure(w_valued_certificate(factor, w).map_err(err)?.is_some(), || format!("{what}: not w-valued"))
}

fn criterion_6d(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut done = [0usize; 4];
    let mut skipped = 0;
    let mut attempts = 0;
    while done.iter().any(|&d| d < 100) {
        attempts += 1;
        ensure(attempts < 5000, || format!("too few valid specs: {done:?}"))?;
        let part = (0..4).find(|&p| done[p] < 100).expect("unfinished part");
        let spec = match part {
            0 => sample::random_two_sum(rng),
            1 => sample::random_three_sum(rng),
            _ => sample::random_delta_sum(rng),
        };
        let m = compose(&spec).map_err(err)?.matrix;
        let f = nonzero_functional(rng, m.rows());
        let w = f.evaluate(&m).map_err(err)?;
        let t = match transport_functional(&spec, &f, &w) {
            Ok(t) => t,
            Err(ComposeError::Hypothesis(_)) if part == 1 => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("part {part}: {e}")),
        };
        let (m1, n1) = spec.a.shape();
        let (f1, f2) = f.coeffs().split_at(m1);
        let (w1, w2) = w.split_at(n1);
        match part {
            0 => {
                let u = spec.u.as_deref().expect("u");
                let v = spec.v.as_deref().expect("v");
                let factor = IntMatrix::from_rows(&[v]).map_err(err)?.vconcat(&spec.b).map_err(err)?;
                let fp = t.functionals[0].functional.coeffs();
                ensure(fp[0] == dot(f1, u) && &fp[1..] == f2, || "2-sum coordinates".into())?;
                check_valued(&factor, fp, w2, "2-sum")?;
                done[0] += 1;
            }
            1 => {
                let v1 = spec.v1.as_deref().expect("v1");
                let v2 = spec.v2.as_deref().expect("v2");
                let factor = IntMatrix::from_rows(&[v1, v2]).map_err(err)?.vconcat(&spec.b).map_err(err)?;
                let fp = t.functionals[0].functional.coeffs();
                ensure(&fp[2..] == f2, || "3-sum coordinates".into())?;
                check_valued(&factor, fp, w2, "3-sum")?;
                done[1] += 1;
            }
            _ => {
                let (u, v) = (spec.u.as_deref().expect("u"), spec.v.as_deref().expect("v"));
                let (up, vp) = (spec.u_prime.as_deref().expect("u'"), spec.v_prime.as_deref().expect("v'"));
                let first = spec.a.push_row(u).map_err(err)?;
                let second = IntMatrix::from_rows(&[v]).map_err(err)?.vconcat(&spec.b).map_err(err)?;
                let fp = t.functionals[0].functional.coeffs();
                let fpp = t.functionals[1].functional.coeffs();
                ensure(&fp[..m1] == f1 && fp[m1] == dot(f2, vp), || "delta f' coordinates".into())?;
                ensure(fpp[0] == dot(f1, up) && &fpp[1..] == f2, || "delta f'' coordinates".into())?;
                check_valued(&first, fp, w1, "delta f'")?;
                check_valued(&second, fpp, w2, "delta f''")?;
                done[2] += 1;
                done[3] += 1;
            }
        }
        if m.columns_distinct() && part != 0 {
            ensure(t.functionals.iter().all(|x| x.distinct_columns), || format!("part {part}: duplicate factor columns"))?;
        }
    }
    Ok(format!("2-sum {}, 3-sum {} ({skipped} outside hypothesis), delta f' {}, f'' {}", done[0], done[1], done[2], done[3]))
}

/// Independent 2-colouring by exhaustive assignment.
fn brute_bipartite(vertices: usize, arcs: &[(usize, usize)]) -> bool {
    (0..1u32 << vertices).any(|c| arcs.iter().all(|&(s, t)| (c >> s & 1) != (c >> t & 1)))
}

fn criterion_6e(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut equalities = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8);
        let tree = sample::random_tree(rng, n);
        let t = Tree::new(tree.clone()).map_err(err)?;
        let mut pool: Vec<(usize, usize)> = (0..n)
            .cartesian_product(0..n)
            .filter(|&(s, q)| {
                let s_ = t.column(s, q).iter().sum::<i64>();
                s_ > 0 && s_ % 2 == 1
            })
            .collect();
        pool.shuffle(rng);
        let take = rng.gen_range(1..=pool.len());
        let mut seen = HashSet::new();
        let arcs: Vec<_> = pool.into_iter().filter(|&(s, q)| seen.insert(t.column(s, q))).take(take).collect();
        let digraph = ArcGraph::new(n, arcs.clone()).map_err(err)?;
        let r = verify_network_column_bound(&tree, &digraph).map_err(err)?;
        let bound_ok = 4 * arcs.len() <= n * n;
        let bipartite = brute_bipartite(n, &arcs);
        ensure(r.applicable && r.ok && bound_ok && bipartite && r.bipartite == bipartite, || {
            format!("violation: tree {:?}, arcs {arcs:?}", tree.arcs)
        })?;
        equalities += usize::from(4 * arcs.len() == n * n);
    }
    Ok(format!("10000 applicable instances, {equalities} at equality"))
}

/// Edge sets of tree paths by breadth-first search, one bit per tree arc.
fn bfs_path_mask(tree: &ArcGraph, s: usize, t: usize) -> u64 {
    let mut adj = vec![Vec::new(); tree.vertices];
    for (k, &(a, b)) in tree.arcs.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let mut via = vec![None; tree.vertices];
    let mut queue = VecDeque::from([s]);
    let mut seen = vec![false; tree.vertices];
    seen[s] = true;
    while let Some(x) = queue.pop_front() {
        for &(y, k) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, k));
                queue.push_back(y);
            }
        }
    }
    let mut mask = 0;
    let mut x = t;
    while let Some((p, k)) = via[x] {
        mask |= 1 << k;
        x = p;
    }
    mask
}

fn criterion_6f(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let mut small_logged = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=13);
        let tree = sample::random_tree(rng, n);
        let arcs = rng.gen_range(1..=5);
        let digraph = sample::random_digraph(rng, n, arcs);
        let m = network_matrix(&tree, &digraph).map_err(err)?;
        let r = verify_transpose_row_bound(&m).map_err(err)?;
        let positive: HashSet<&[i64]> = (0..m.rows()).map(|i| m.row(i)).filter(|r| r.iter().sum::<i64>() > 0).collect();
        let odd = positive.iter().filter(|r| r.iter().sum::<i64>() % 2 != 0).count();
        ensure(r.distinct_pos_rows == positive.len() && r.distinct_pos_odd_rows == odd, || "row counts".into())?;
        if arcs >= 2 {
            ensure(positive.len() <= 3 * arcs - 3, || format!("3|A|-3 violated\n{m}"))?;
        } else {
            small_logged += 1;
        }
        if arcs >= 3 {
            ensure(odd <= 3 * arcs - 5, || format!("3|A|-5 violated\n{m}"))?;
        }
        ensure(r.bounds_ok && r.mod2_distinct, || format!("report flags\n{m}"))?;
    }
    let mut instances = 0u64;
    for n in 2..=8 {
        for tree in unlabeled_trees(n) {
            let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
            let masks: Vec<u64> = pairs.iter().map(|&(s, t)| bfs_path_mask(&tree, s, t)).collect();
            for m in 2..=4usize {
                for chosen in (0..pairs.len()).combinations(m) {
                    let patterns: BTreeSet<u64> = (0..tree.arcs.len())
                        .map(|e| chosen.iter().enumerate().fold(0u64, |acc, (j, &p)| acc | ((masks[p] >> e & 1) << j)))
                        .filter(|&b| b != 0)
                        .collect();
                    let odd = patterns.iter().filter(|b| b.count_ones() % 2 == 1).count();
                    ensure(patterns.len() <= 3 * m - 3, || format!("3m-3 violated: {:?} {chosen:?}", tree.arcs))?;
                    ensure(m < 3 || odd <= 3 * m - 5, || format!("3m-5 violated: {:?} {chosen:?}", tree.arcs))?;
                    if instances.is_multiple_of(97) {
                        let paths: Vec<_> = chosen.iter().map(|&p| pairs[p]).collect();
                        let r = verify_pattern_bounds(&tree, &paths).map_err(err)?;
                        ensure(r.count == patterns.len() && r.odd_count == odd && r.bound_ok && r.odd_bound_ok, || {
                            format!("library pattern count differs: {:?} {paths:?}", tree.arcs)
                        })?;
                    }
                    instances += 1;
                }
            }
        }
    }
    Ok(format!("10000 random ({small_logged} with |A| = 1 logged only), {instances} exhaustive path sets"))
}

/// Points with a row of ones appended.
fn homogenize(p: &PointSet) -> IntMatrix {
    p.matrix().vconcat(&IntMatrix::from_rows(&[vec![1; p.len()]]).expect("row")).expect("widths agree")
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut r = IntMatrix::identity(n);
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let mut e = IntMatrix::identity(n).entries().to_vec();
        if i != j {
            e[i * n + j] = if rng.gen_bool(0.5) { 1 } else { -1 };
        } else {
            e[i * n + i] = -1;
        }
        let step = IntMatrix::new(n, n, e).expect("shape");
        r = step.mul(&r).expect("square");
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    r.select_rows(&rows).expect("in range")
}

fn criterion_7(rng: &mut ChaCha8Rng, classes: &[Classification]) -> Result<String, String> {
    let mut bases: Vec<IntMatrix> = classes.iter().flat_map(|c| c.classes.iter().map(|k| homogenize(&k.point_set()))).collect();
    bases.extend([1, 2, 3, 4, 6, 7].map(|m| bipartite_extremal(m).expect("m != 5")));
    bases.push(sporadic_5x10());
    bases.push(homogenize(&PointSet::new(ex4_matrix()).map_err(err)?));
    for (a, b) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)] {
        bases.push(homogenize(&simplex_product(a, b)));
    }
    let mut isomorphic_checked = 0;
    for k in 0..200 {
        let base = &bases[k % bases.len()];
        let r = random_unimodular(rng, base.rows());
        let mut cols: Vec<usize> = (0..base.cols()).collect();
        cols.shuffle(rng);
        let m = r.mul(&base.select_columns(&cols).map_err(err)?).map_err(err)?;
        let sf = normalize_standard_form(&m).map_err(|e| format!("{e} on\n{m}"))?;
        let rows = m.rows();
        ensure(sf.matrix.select_columns(&(0..rows).collect::<Vec<_>>()).map_err(err)? == IntMatrix::identity(rows), || {
            "no identity block".into()
        })?;
        ensure(sf.matrix.column_sums().map_err(err)?.iter().all(|&s| s == 1), || "column sums".into())?;
        ensure(both_tu(&sf.matrix)? && both_tu(&sf.b)?, || format!("(I|B) not TU\n{}", sf.matrix))?;
        let reproduced = sf.transform.mul(&sf.matrix).map_err(err)?;
        ensure(reproduced == m.select_columns(&sf.column_order).map_err(err)?, || "R (I|B) != M P".into())?;
        if rows <= 5 {
            let before = PointSet::new(m.clone()).map_err(err)?;
            let after = PointSet::new(sf.matrix.clone()).map_err(err)?;
            ensure(lattice_isomorphic(&before, &after).map_err(err)?, || format!("conv not isomorphic\n{m}"))?;
            ensure(is_unimodular_polytope(&after.intrinsic().map_err(err)?).map_err(err)?.unimodular, || {
                "conv(I|B) not unimodular".into()
            })?;
            isomorphic_checked += 1;
        }
    }
    Ok(format!("200 matrices from {} bases, {isomorphic_checked} conv round trips", bases.len()))
}

fn main() {
    let mut run = Run { failures: Vec::new(), passed: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut classes = Vec::new();
    let minute = Duration::from_secs(60);

    run.record("1", "sharpness witnesses", Duration::from_secs(10), criterion_1);
    run.record("2", "exhaustive bound verification", 5 * minute, criterion_2);
    println!("INFO 2 stretch: {}", stretch_polytopal_six());
    run.record("3", "superadditivity exceptions", Duration::from_secs(1), criterion_3);
    run.record("4", "classification counts", 30 * minute, || criterion_4(&mut classes));
    run.record("5", "vertex bound", 5 * minute, || criterion_5(&classes));
    let suite = Instant::now();
    run.record("6a", "oracle agreement", 10 * minute, || criterion_6a(&mut rng));
    run.record("6b", "identity extension", 10 * minute, || criterion_6b(&mut rng));
    run.record("6c", "sums preserve TU", 10 * minute, || criterion_6c(&mut rng));
    run.record("6d", "functional transport", 10 * minute, || criterion_6d(&mut rng));
    run.record("6e", "network column bound", 10 * minute, || criterion_6e(&mut rng));
    run.record("6f", "transpose row and pattern bounds", 10 * minute, || criterion_6f(&mut rng));
    let suite = suite.elapsed();
    if suite > 10 * minute {
        println!("FAIL 6 property suites: {suite:.2?} total exceeds 10 min");
        run.failures.push("6".into());
    } else {
        println!("INFO 6 property suites total {suite:.2?}");
    }
    run.record("7", "standard form round trip", 10 * minute, || criterion_7(&mut rng, &classes));

    println!("{} passed, {} failed", run.passed, run.failures.len());
    if !run.failures.is_empty() {
        std::process::exit(1);
    }
}
