use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn tumax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tumax"))
        .args(args)
        .env_remove("TUMAX_BUDGET_NODES")
        .env_remove("TUMAX_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// Subcommand words, then fixture files, then trailing flags.
fn case(words: &[&str], files: &[&str], flags: &[&str]) -> Output {
    let files: Vec<String> = files.iter().map(|f| fixture(f)).collect();
    let mut args: Vec<&str> = words.to_vec();
    args.extend(files.iter().map(String::as_str));
    args.extend(flags);
    tumax(&args)
}

/// Subcommand words, fixture files, flags, expected exit code.
type Case<'a> = (&'a [&'a str], &'a [&'a str], &'a [&'a str], i32);

#[test]
fn golden_exit_codes() {
    #[rustfmt::skip]
    let cases: &[Case] = &[
        (&["check", "tu"], &["sporadic_5x10.txt"], &[], 0),
        (&["check", "prepared"], &["sporadic_5x10.txt"], &[], 0),
        (&["check", "tu"], &["ex4.txt"], &[], 1),
        (&["check", "unimodular-polytope"], &["ex4.txt"], &[], 0),
        (&["check", "tu"], &["heller_3.txt"], &[], 0),
        (&["check", "prepared"], &["heller_3.txt"], &[], 1),
        (&["check", "prepared"], &["bipartite_4.txt"], &[], 0),
        (&["check", "tu"], &["not_tu_2x2.txt"], &[], 1),
        (&["check", "tu"], &["not_tu_2x2.txt"], &["--method", "ghouila-houri"], 1),
        (&["check", "tu"], &["heller_3.txt"], &["--method", "minors", "--max-minor-size", "4"], 3),
        (&["check", "unimodular"], &["identity_3.txt"], &[], 0),
        (&["check", "unimodular"], &["rank_deficient.txt"], &[], 1),
        (&["check", "polytopal"], &["not_polytopal.txt"], &[], 1),
        (&["check", "polytopal"], &["square_lifted.txt"], &[], 0),
        (&["check", "tu"], &["bad_token.txt"], &[], 2),
        (&["check", "tu"], &["bad_short_row.txt"], &[], 2),
        (&["check", "tu"], &["empty.txt"], &[], 2),
        (&["check", "tu"], &["does_not_exist.txt"], &[], 2),
        (&["check", "unimodular-polytope"], &["segment_long.txt"], &[], 1),
        (&["check", "unimodular-polytope"], &["segment_with_midpoint.txt"], &[], 1),
        (&["check", "unimodular-polytope"], &["simplex_product_2_2.txt"], &[], 0),
        (&["check", "unimodular-polytope"], &["edge_k22.txt"], &[], 2),
        (&["check", "unimodular-polytope"], &["edge_k22.txt"], &["--intrinsic"], 0),
        (&["network", "build"], &["path_tree.txt", "digraph.txt"], &["--out", "/dev/null"], 0),
        (&["network", "build"], &["cycle.txt", "digraph.txt"], &[], 2),
        (&["network", "build"], &["path_tree.txt", "arc_out_of_range.txt"], &[], 2),
        (&["network", "bounds"], &["path_tree.txt", "digraph.txt"], &[], 0),
        (&["network", "patterns"], &["path_tree.txt", "paths.txt"], &[], 0),
        (&["sum", "two"], &["two_sum.json"], &[], 0),
        (&["sum", "three"], &["three_sum.json"], &[], 0),
        (&["sum", "delta"], &["delta_sum.json"], &[], 0),
        (&["sum", "three"], &["two_sum.json"], &[], 2),
        (&["sum", "two"], &["truncated.json"], &[], 2),
        (&["sum", "two"], &["non_tu_factor.json"], &[], 1),
        (&["verify", "vertex-bound"], &["ex4.txt"], &[], 0),
        (&["verify", "vertex-bound"], &["segment_long.txt"], &[], 1),
    ];
    for (words, files, flags, expected) in cases {
        let out = case(words, files, flags);
        let code = out.status.code().expect("exit code");
        assert_eq!(code, *expected, "{words:?} {files:?} {flags:?}\nstderr: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert_eq!(r["exit_status"], *expected);
        assert_eq!(r["command"], words.join(" "));
        if code == 2 {
            assert!(!out.stderr.is_empty());
        }
    }
}

#[test]
fn parse_errors_carry_positions() {
    let out = case(&["check", "tu"], &["bad_token.txt"], &[]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bad_token.txt:2:3:"), "{stderr}");
    let out = case(&["check", "tu"], &["bad_short_row.txt"], &[]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad_short_row.txt:3:"));
}

#[test]
fn documented_examples() {
    let r = report(&case(&["check", "tu"], &["sporadic_5x10.txt"], &[]));
    assert_eq!(r["result"]["is_tu"], true);
    let out = case(&["check", "tu"], &["ex4.txt"], &[]);
    let r = report(&out);
    assert_eq!(r["result"]["is_tu"], false);
    assert_eq!(r["result"]["witness"]["minor"].as_i64().map(i64::abs), Some(2));
    let out = tumax(&["verify", "polytopal-bound", "--m", "5", "--mode", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["max_columns"], 10);
    assert_eq!(r["result"]["complete"], true);
}

#[test]
fn gen_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pairs: &[(&[&str], &[&str])] = &[
        (&["heller", "--m", "3"], &["tu"]),
        (&["bipartite", "--m", "6"], &["prepared"]),
        (&["sporadic-5x10"], &["prepared"]),
        (&["sporadic-5x5", "--variant", "1"], &["tu"]),
        (&["sporadic-5x5", "--variant", "2"], &["tu"]),
        (&["ex4"], &["unimodular-polytope"]),
        (&["simplex-product", "--a", "3", "--b", "2"], &["unimodular-polytope"]),
        (&["edge-polytope", "--a", "2", "--b", "3"], &["unimodular-polytope", "--intrinsic"]),
    ];
    for (k, (gen, check)) in pairs.iter().enumerate() {
        let mut args = vec!["gen"];
        args.extend(*gen);
        let out = tumax(&args);
        assert_eq!(out.status.code(), Some(0), "{gen:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        let path = dir.path().join(format!("g{k}.txt"));
        std::fs::write(&path, &text).unwrap();
        let p = path.to_string_lossy().into_owned();

        let mut args = vec!["check", check[0], p.as_str()];
        args.extend(&check[1..]);
        let out = tumax(&args);
        assert_eq!(out.status.code(), Some(0), "{gen:?} -> {check:?}");
        assert_eq!(report(&out)["inputs"]["file"]["text"].as_str(), Some(text.as_str()));

        // `--out` writes the same bytes and reports them.
        let other = dir.path().join(format!("o{k}.txt"));
        let o = other.to_string_lossy().into_owned();
        let mut args = vec!["gen"];
        args.extend(*gen);
        args.extend(["--out", o.as_str()]);
        let out = tumax(&args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(std::fs::read_to_string(&other).unwrap(), text);
        assert_eq!(report(&out)["result"]["text"].as_str(), Some(text.as_str()));
    }
}

#[test]
fn transport_and_sweeps() {
    let out = case(&["sum", "transport"], &["delta_sum.json"], &[]);
    assert_eq!(out.status.code(), Some(2), "missing --functional is a usage error");
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(fixture("delta_sum.json")).unwrap()).unwrap();
    let rows = spec["A"].as_array().unwrap().len() + spec["B"].as_array().unwrap().len();
    let f = vec!["1"; rows].join(",");
    let out = case(&["sum", "transport"], &["delta_sum.json"], &["--functional", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["result"]["functionals"].as_array().unwrap().len(), 2);
    let out = case(&["sum", "transport"], &["delta_sum.json"], &["--functional", "1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = tumax(&["--seed", "3", "verify", "transpose-bound", "--samples", "300", "--exhaustive-vertices", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["inputs"]["seed"], 3);
    assert_eq!(r["result"]["violations"], 0);
    assert_eq!(tumax(&["verify", "extralemma", "--max", "60"]).status.code(), Some(0));
    assert_eq!(tumax(&["verify", "extralemma", "--max", "3"]).status.code(), Some(2));
}

#[test]
fn budgets_and_search() {
    let out = tumax(&["verify", "heller-bound", "--m", "3", "--max-nodes", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert!(r["result"]["partial"]["max_columns"].as_u64().is_some());
    let out = Command::new(env!("CARGO_BIN_EXE_tumax"))
        .args(["verify", "heller-bound", "--m", "2"])
        .env("TUMAX_BUDGET_NODES", "1")
        .env("TUMAX_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = tumax(&["verify", "heller-bound", "--m", "2", "--mode", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["max_columns"], 7);
    assert_eq!(tumax(&["verify", "polytopal-bound", "--m", "9"]).status.code(), Some(2));
    let out = tumax(&["verify", "polytopal-bound", "--m", "4", "--odd-sums"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["result"]["max_columns"].as_u64().unwrap() >= 6);
}

#[test]
fn classify_and_text_format() {
    let out = tumax(&["classify", "--dimension", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["count"], 4);
    assert_eq!(r["result"]["classes"].as_array().unwrap().len(), 4);
    assert_eq!(tumax(&["classify", "--dimension", "5"]).status.code(), Some(2));
    assert_eq!(tumax(&["classify", "--dimension", "4", "--unpruned"]).status.code(), Some(2));
    let out = tumax(&["verify", "vertex-bound", "--dimension", "3"]);
    assert_eq!(out.status.code(), Some(0));

    let out = tumax(&["--format", "text", "check", "tu", &fixture("ex4.txt")]);
    assert_eq!(out.status.code(), Some(1));
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with("check tu: TU: false"), "{line}");
    assert_eq!(tumax(&["check", "frobnicate"]).status.code(), Some(2));
    assert_eq!(tumax(&[]).status.code(), Some(2));
}
