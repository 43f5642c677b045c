use std::collections::BTreeSet;
use std::fs;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use tumax::certify::{
    certify_tu_with, is_totally_unimodular_with, is_unimodular, polytopal_certificate, prepared_report, Functional,
    TuBudget, TuMethod,
};
use tumax::compose::{compose, transport_functional, SumKind, SumSpec};
use tumax::families;
use tumax::graphical::{
    network_matrix, parse_graph, parse_paths, unlabeled_trees, verify_network_column_bound, verify_pattern_bounds,
    verify_transpose_row_bound, ArcGraph,
};
use tumax::polytope::{
    classify_unimodular, complete_bipartite_edges, edge_polytope, is_unimodular_polytope, simplex_product,
    vertex_bound_check, ClassifyOptions, PointSet,
};
use tumax::sample;
use tumax::search::{search, SearchMode, SearchOptions};
use tumax::IntMatrix;

use crate::report::{parse_vector, read_text, to_value, Failure, Outcome, Status};
use crate::{
    CheckCommand, ClassifyArgs, Command, GenCommand, GenOut, MethodArg, NetworkCommand, Run, SearchArgs, SearchModeArg,
    SumCommand, TuArgs, VerifyCommand,
};

/// Echoed inputs, filled as files are read.
#[derive(Default)]
struct Inputs(Map<String, Value>);

impl Inputs {
    fn set(&mut self, key: &str, v: impl serde::Serialize) {
        self.0.insert(key.into(), to_value(v));
    }

    fn file(&mut self, key: &str, path: &str, text: &str) {
        self.set(key, json!({ "path": path, "text": text }));
    }

    fn matrix(&mut self, path: &str) -> Result<IntMatrix, Failure> {
        let text = read_text(path)?;
        self.file("file", path, &text);
        tumax::parse_matrix(&text).map_err(|e| Failure::parse(path, &e))
    }

    fn graph(&mut self, key: &str, path: &str) -> Result<ArcGraph, Failure> {
        let text = read_text(path)?;
        self.file(key, path, &text);
        parse_graph(&text).map_err(|e| Failure::parse(path, &e))
    }
}

pub fn run(command: &Command, seed: u64) -> Run {
    let mut inputs = Inputs::default();
    let mut raw = None;
    let outcome = match command {
        Command::Check(c) => check(c, &mut inputs),
        Command::Gen(c) => gen(c, &mut inputs, &mut raw),
        Command::Network(c) => network(c, &mut inputs, &mut raw),
        Command::Sum(c) => sum(c, &mut inputs),
        Command::Verify(c) => {
            inputs.set("seed", seed);
            verify(c, seed, &mut inputs)
        }
        Command::Classify(c) => classify(c, &mut inputs),
    };
    Run { inputs: Value::Object(inputs.0), outcome, raw }
}

fn check(c: &CheckCommand, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    match c {
        CheckCommand::Tu(args) => check_tu(args, inputs),
        CheckCommand::Unimodular(f) => {
            let m = inputs.matrix(&f.file)?;
            match is_unimodular(&m) {
                Ok(u) => Ok(Outcome::new(Status::holds(u), json!({ "unimodular": u }), format!("unimodular: {u}"))),
                Err(tumax::certify::CertifyError::RankDeficient { rank, rows }) => Ok(Outcome::new(
                    Status::PropertyFails,
                    json!({ "unimodular": false, "rank": rank, "rows": rows }),
                    format!("unimodular: false (rank {rank} < {rows} rows)"),
                )),
                Err(e) => Err(e.into()),
            }
        }
        CheckCommand::Polytopal(f) => {
            let m = inputs.matrix(&f.file)?;
            let cert = polytopal_certificate(&m)?;
            let summary = match &cert {
                Some(f) => format!("polytopal: true, functional {:?}", f.coeffs()),
                None => "polytopal: false".into(),
            };
            Ok(Outcome::new(
                Status::holds(cert.is_some()),
                json!({ "polytopal": cert.is_some(), "certificate": cert }),
                summary,
            ))
        }
        CheckCommand::Prepared(f) => {
            let m = inputs.matrix(&f.file)?;
            let r = prepared_report(&m)?;
            let ok = r.is_prepared();
            let mut result = to_value(&r);
            result["prepared"] = json!(ok);
            Ok(Outcome::new(Status::holds(ok), result, format!("prepared: {ok}")))
        }
        CheckCommand::UnimodularPolytope { input, intrinsic } => {
            let m = inputs.matrix(&input.file)?;
            inputs.set("intrinsic", intrinsic);
            let mut p = PointSet::new(m)?;
            if *intrinsic {
                p = p.intrinsic()?;
            }
            let r = is_unimodular_polytope(&p)?;
            let summary = match &r.witness {
                None => "unimodular polytope: true".to_string(),
                Some((s, d)) => format!("unimodular polytope: false, simplex {s:?} has determinant {d}"),
            };
            Ok(Outcome::new(Status::holds(r.unimodular), &r, summary))
        }
    }
}

fn check_tu(args: &TuArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let m = inputs.matrix(&args.input.file)?;
    let budget = TuBudget { max_minor_size: args.max_minor_size, max_signing_rows: args.max_signing_rows };
    let verdict = match args.method {
        MethodArg::Auto => certify_tu_with(&m, &budget)?,
        MethodArg::Minors => is_totally_unimodular_with(&m, TuMethod::MinorEnumeration, &budget)?,
        MethodArg::GhouilaHouri => is_totally_unimodular_with(&m, TuMethod::GhouilaHouri, &budget)?,
    };
    let summary = match &verdict.witness {
        None => format!("TU: {} ({})", verdict.is_tu, verdict.method),
        Some(w) => format!("TU: false, rows {:?} cols {:?} give minor {}", w.rows.as_slice(), w.cols.as_slice(), w.minor),
    };
    Ok(Outcome::new(Status::holds(verdict.is_tu), &verdict, summary))
}

/// Emits a generated matrix: raw text on stdout, or a file plus a report.
fn emit(m: &IntMatrix, out: &GenOut, inputs: &mut Inputs, raw: &mut Option<String>) -> Result<Outcome, Failure> {
    let text = m.to_text();
    match &out.out {
        Some(path) => {
            inputs.set("out", path);
            fs::write(path, &text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
        }
        None => *raw = Some(text.clone()),
    }
    let (rows, cols) = m.shape();
    Ok(Outcome::new(
        Status::Ok,
        json!({ "rows": rows, "cols": cols, "matrix": m, "text": text }),
        format!("{rows}x{cols} matrix"),
    ))
}

fn gen(c: &GenCommand, inputs: &mut Inputs, raw: &mut Option<String>) -> Result<Outcome, Failure> {
    let (m, out) = match c {
        GenCommand::Heller { m, out } => {
            inputs.set("m", m);
            if *m == 0 || *m > 12 {
                return Err(Failure::usage("heller: m must be in 1..=12"));
            }
            (families::heller_family(*m), out)
        }
        GenCommand::Bipartite { m, out } => {
            inputs.set("m", m);
            (families::bipartite_extremal(*m)?, out)
        }
        GenCommand::Sporadic5x10 { out } => (families::sporadic_5x10(), out),
        GenCommand::Sporadic5x5 { variant, out } => {
            inputs.set("variant", variant);
            (families::sporadic_5x5(*variant)?, out)
        }
        GenCommand::Ex4 { out } => (families::ex4_matrix(), out),
        GenCommand::SimplexProduct { a, b, out } => {
            inputs.set("a", a);
            inputs.set("b", b);
            if a + b == 0 || a + b > 12 {
                return Err(Failure::usage("simplex-product: a + b must be in 1..=12"));
            }
            (simplex_product(*a, *b).matrix().clone(), out)
        }
        GenCommand::EdgePolytope { a, b, graph, out } => {
            inputs.set("a", a);
            inputs.set("b", b);
            let edges = match graph {
                Some(path) => {
                    let g = inputs.graph("graph", path)?;
                    if g.vertices != a + b {
                        return Err(Failure::usage(format!("{path}: expected {} vertices, found {}", a + b, g.vertices)));
                    }
                    g.arcs
                }
                None => complete_bipartite_edges(*a, *b),
            };
            (edge_polytope(*a, *b, &edges)?.matrix().clone(), out)
        }
    };
    emit(&m, out, inputs, raw)
}

fn network(c: &NetworkCommand, inputs: &mut Inputs, raw: &mut Option<String>) -> Result<Outcome, Failure> {
    match c {
        NetworkCommand::Build { tree, digraph, out } => {
            let t = inputs.graph("tree", tree)?;
            let d = inputs.graph("digraph", digraph)?;
            let m = network_matrix(&t, &d)?;
            emit(&m, out, inputs, raw)
        }
        NetworkCommand::Patterns { tree, paths } => {
            let t = inputs.graph("tree", tree)?;
            let text = read_text(paths)?;
            inputs.file("paths", paths, &text);
            let p = parse_paths(&text, t.vertices).map_err(|e| Failure::parse(paths, &e))?;
            let patterns = tumax::graphical::edge_patterns(&t, &p)?;
            let r = verify_pattern_bounds(&t, &p)?;
            let ok = r.bound_ok && r.odd_bound_ok;
            let summary = format!("{} patterns ({} odd), bounds hold: {ok}", r.count, r.odd_count);
            let patterns: Vec<Vec<usize>> = patterns.iter().map(|p| p.members()).collect();
            let mut result = to_value(&r);
            result["patterns"] = json!(patterns);
            Ok(Outcome::new(Status::holds(ok), result, summary))
        }
        NetworkCommand::Bounds { tree, digraph } => {
            let t = inputs.graph("tree", tree)?;
            let d = inputs.graph("digraph", digraph)?;
            let column = verify_network_column_bound(&t, &d)?;
            let rows = verify_transpose_row_bound(&network_matrix(&t, &d)?)?;
            let ok = column.ok && rows.bounds_ok && rows.mod2_distinct;
            let summary = format!(
                "columns: applicable {} ok {}; rows: {} positive ({} odd) ok {}",
                column.applicable, column.ok, rows.distinct_pos_rows, rows.distinct_pos_odd_rows, rows.bounds_ok
            );
            Ok(Outcome::new(Status::holds(ok), json!({ "column_bound": column, "row_bound": rows }), summary))
        }
    }
}

fn read_spec(path: &str, inputs: &mut Inputs) -> Result<SumSpec, Failure> {
    let text = read_text(path)?;
    inputs.file("spec", path, &text);
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{path}:{}:{}: {e}", e.line(), e.column())))
}

fn sum(c: &SumCommand, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let (file, kind) = match c {
        SumCommand::One(f) => (f, Some(SumKind::OneSum)),
        SumCommand::Two(f) => (f, Some(SumKind::TwoSum)),
        SumCommand::Three(f) => (f, Some(SumKind::ThreeSum)),
        SumCommand::Delta(f) => (f, Some(SumKind::DeltaSum)),
        SumCommand::Transport { spec, .. } => (spec, None),
    };
    let spec = read_spec(&file.spec, inputs)?;
    if let Some(kind) = kind {
        if spec.kind != kind {
            return Err(Failure::usage(format!("{}: spec is a {}, expected {kind}", file.spec, spec.kind)));
        }
        let r = compose(&spec)?;
        let summary = format!("{} is TU by construction: {}x{}", kind, r.matrix.rows(), r.matrix.cols());
        return Ok(Outcome::new(Status::Ok, &r, summary));
    }
    let SumCommand::Transport { functional, w, .. } = c else { unreachable!("handled above") };
    let f = Functional(parse_vector("--functional", functional)?);
    inputs.set("functional", f.coeffs());
    let m = compose(&spec)?.matrix;
    if f.len() != m.rows() {
        return Err(Failure::usage(format!("--functional has {} entries, the sum has {} rows", f.len(), m.rows())));
    }
    let w = match w {
        Some(w) => parse_vector("--w", w)?,
        None => f.evaluate(&m)?,
    };
    inputs.set("w", &w);
    let t = transport_functional(&spec, &f, &w)?;
    let summary = t.functionals.iter().map(|t| format!("{:?}", t.functional.coeffs())).join(", ");
    Ok(Outcome::new(Status::Ok, &t, format!("transported: {summary}")))
}

fn search_options(args: &SearchArgs, inputs: &mut Inputs) -> Result<SearchOptions, Failure> {
    let env_nodes = match std::env::var("TUMAX_BUDGET_NODES") {
        Ok(v) => Some(v.parse().map_err(|_| Failure::usage(format!("TUMAX_BUDGET_NODES: `{v}` is not a count")))?),
        Err(_) => None,
    };
    let threads = match std::env::var("TUMAX_THREADS") {
        Ok(v) => Some(v.parse().map_err(|_| Failure::usage(format!("TUMAX_THREADS: `{v}` is not a count")))?),
        Err(_) => None,
    };
    let options = SearchOptions {
        fast: args.mode == SearchModeArg::Fast,
        max_nodes: args.max_nodes.or(env_nodes),
        max_seconds: args.max_seconds,
        threads,
        max_rows: args.max_rows,
        ..Default::default()
    };
    inputs.set("m", args.m);
    inputs.set("mode", if options.fast { "fast" } else { "verify" });
    inputs.set("max_nodes", options.max_nodes);
    inputs.set("max_seconds", options.max_seconds);
    Ok(options)
}

fn run_search(args: &SearchArgs, mode: SearchMode, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let options = search_options(args, inputs)?;
    inputs.set("search", mode);
    let r = search(args.m, mode, &options)?;
    let summary = format!(
        "m = {}: {} columns{} after {} nodes in {:.2}s",
        r.m,
        r.max_columns,
        r.expected.map(|e| format!(" (expected {e})")).unwrap_or_default(),
        r.nodes,
        r.seconds
    );
    if !r.complete {
        return Err(Failure {
            status: Status::BudgetExceeded,
            message: format!("search budget exhausted; best so far {} columns", r.max_columns),
            partial: Some(to_value(&r)),
        });
    }
    Ok(Outcome::new(Status::holds(r.matches_expected() != Some(false)), &r, summary))
}

fn verify(c: &VerifyCommand, seed: u64, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    match c {
        VerifyCommand::Extralemma { max } => {
            inputs.set("max", max);
            let reports = families::verify_extralemma(*max)?;
            let ok = reports.iter().all(|r| r.matches);
            Ok(Outcome::new(Status::holds(ok), &reports, format!("exception sets match: {ok}")))
        }
        VerifyCommand::PolytopalBound { search, odd_sums } => {
            let mode = if *odd_sums { SearchMode::OddSums } else { SearchMode::Polytopal };
            run_search(search, mode, inputs)
        }
        VerifyCommand::HellerBound { search } => run_search(search, SearchMode::Heller, inputs),
        VerifyCommand::TransposeBound { samples, max_tree_arcs, max_arcs, exhaustive_vertices } => {
            inputs.set("samples", samples);
            inputs.set("max_tree_arcs", max_tree_arcs);
            inputs.set("max_arcs", max_arcs);
            inputs.set("exhaustive_vertices", exhaustive_vertices);
            transpose_sweep(seed, *samples, *max_tree_arcs, *max_arcs, *exhaustive_vertices)
        }
        VerifyCommand::VertexBound { file, dimension } => match (file, dimension) {
            (Some(path), _) => {
                let p = PointSet::new(inputs.matrix(path)?)?;
                let r = vertex_bound_check(&p)?;
                let summary = format!("{} vertices, bound {} in dimension {}", r.vertex_count, r.bound, r.dimension);
                let status = Status::holds(r.unimodular && r.ok);
                Ok(Outcome::new(status, &r, summary))
            }
            (None, Some(d)) => {
                inputs.set("dimension", d);
                let c = classify_unimodular(*d, &ClassifyOptions::default())?;
                let reports: Vec<_> =
                    c.classes.iter().map(|k| vertex_bound_check(&k.point_set())).collect::<Result<_, _>>()?;
                let ok = reports.iter().all(|r| r.unimodular && r.ok);
                let max = reports.iter().map(|r| r.vertex_count).max().unwrap_or(0);
                let summary = format!("{} classes, at most {max} vertices, bound holds: {ok}", reports.len());
                Ok(Outcome::new(Status::holds(ok), &reports, summary))
            }
            (None, None) => Err(Failure::usage("vertex-bound needs a point set file or --dimension")),
        },
    }
}

fn transpose_sweep(seed: u64, samples: usize, max_tree_arcs: usize, max_arcs: usize, exhaustive: usize) -> Result<Outcome, Failure> {
    if max_tree_arcs == 0 || max_arcs == 0 || exhaustive > 8 {
        return Err(Failure::usage("need --max-tree-arcs >= 1, --max-arcs >= 1 and --exhaustive-vertices <= 8"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut single_arc = 0;
    for _ in 0..samples {
        let vertices = rng.gen_range(2..=max_tree_arcs + 1);
        let tree = sample::random_tree(&mut rng, vertices);
        let arcs = rng.gen_range(1..=max_arcs);
        let digraph = sample::random_digraph(&mut rng, tree.vertices, arcs);
        let r = verify_transpose_row_bound(&network_matrix(&tree, &digraph)?)?;
        single_arc += usize::from(arcs == 1);
        if !(r.bounds_ok && r.mod2_distinct) {
            violations.push(json!({ "tree": tree, "digraph": digraph, "report": r }));
        }
    }
    let mut path_sets = 0u64;
    for n in 2..=exhaustive {
        for tree in unlabeled_trees(n) {
            let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
            for m in 2..=4 {
                for chosen in pairs.iter().copied().combinations(m) {
                    let r = verify_pattern_bounds(&tree, &chosen)?;
                    path_sets += 1;
                    if !(r.bound_ok && r.odd_bound_ok) {
                        violations.push(json!({ "tree": tree, "paths": chosen, "report": r }));
                    }
                }
            }
        }
    }
    let ok = violations.is_empty();
    let count = violations.len();
    violations.truncate(20);
    let result = json!({
        "samples": samples,
        "single_arc_logged": single_arc,
        "exhaustive_path_sets": path_sets,
        "violations": count,
        "examples": violations,
    });
    let summary = format!("{samples} samples, {path_sets} exhaustive path sets, {count} violations");
    Ok(Outcome::new(Status::holds(ok), result, summary))
}

fn classify(c: &ClassifyArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    inputs.set("dimension", c.dimension);
    inputs.set("pruned", !c.unpruned);
    inputs.set("stretch", c.stretch);
    let r = classify_unimodular(c.dimension, &ClassifyOptions { stretch: c.stretch, pruned: !c.unpruned })?;
    let sizes: BTreeSet<usize> = r.classes.iter().map(|k| k.vertex_count).collect();
    let summary = format!("{} classes in dimension {} (vertex counts {sizes:?})", r.count, r.dimension);
    Ok(Outcome::new(Status::Ok, &r, summary))
}
