//! `tumax` command-line front end.
//!
//! Every command writes a JSON report `{command, inputs, result, exit_status}`
//! to stdout (or a short summary with `--format text`) and diagnostics to
//! stderr. Exit status: 0 holds, 1 property fails, 2 usage or format error,
//! 3 budget exceeded.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{CommandReport, Failure, Outcome};

#[derive(Parser)]
#[command(name = "tumax", version, about = "Totally unimodular matrices and unimodular polytopes")]
struct Cli {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a property of a matrix or point set file.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Generate an extremal matrix or polytope in the matrix text format.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Network matrices and tree path patterns.
    #[command(subcommand)]
    Network(NetworkCommand),
    /// Compose a sum from a JSON specification.
    #[command(subcommand)]
    Sum(SumCommand),
    /// Exhaustive and randomized bound verification.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Classify unimodular 0/1-polytopes of one dimension.
    Classify(ClassifyArgs),
}

#[derive(Args)]
pub struct MatrixFile {
    /// Matrix text file: `rows cols` header, then one line per row.
    pub file: String,
}

#[derive(Args)]
pub struct TuArgs {
    #[command(flatten)]
    pub input: MatrixFile,
    /// Oracle; `auto` picks by size.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Largest `rows + cols` for minor enumeration.
    #[arg(long, default_value_t = 16)]
    pub max_minor_size: usize,
    /// Largest row count for the Ghouila-Houri check.
    #[arg(long, default_value_t = 20)]
    pub max_signing_rows: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Minors,
    GhouilaHouri,
}

#[derive(Subcommand)]
pub enum CheckCommand {
    /// Total unimodularity, with a violating minor on failure.
    Tu(TuArgs),
    /// Full row rank with all maximal minors in {-1, 0, 1}.
    Unimodular(MatrixFile),
    /// Integral functional equal to 1 on every column.
    Polytopal(MatrixFile),
    /// Distinct columns, TU and polytopal.
    Prepared(MatrixFile),
    /// Columns as points: convex position and unimodular simplices.
    UnimodularPolytope {
        #[command(flatten)]
        input: MatrixFile,
        /// Use coordinates of the affine hull lattice when not full-dimensional.
        #[arg(long)]
        intrinsic: bool,
    },
}

#[derive(Args)]
pub struct GenOut {
    /// Write the matrix here and print the report; otherwise print the matrix.
    #[arg(long, short)]
    pub out: Option<String>,
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// m^2 + m + 1 distinct columns, TU.
    Heller {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// floor((m+1)^2/4) columns, prepared; m != 5.
    Bipartite {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Prepared 5x10 matrix.
    #[command(name = "sporadic-5x10")]
    Sporadic5x10 {
        #[command(flatten)]
        out: GenOut,
    },
    /// One of the two sporadic 5x5 matrices.
    #[command(name = "sporadic-5x5")]
    Sporadic5x5 {
        #[arg(long, default_value_t = 1)]
        variant: u8,
        #[command(flatten)]
        out: GenOut,
    },
    /// Vertices of the 4-dimensional unimodular 0/1-polytope with 10 vertices.
    Ex4 {
        #[command(flatten)]
        out: GenOut,
    },
    /// Vertices of the product of simplices of dimensions a and b.
    SimplexProduct {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Points e_i + e_j of a bipartite graph on parts 0..a and a..a+b.
    EdgePolytope {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        /// Graph file with the edges; the complete bipartite graph by default.
        #[arg(long)]
        graph: Option<String>,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Subcommand)]
pub enum NetworkCommand {
    /// Network matrix of a directed tree and a digraph.
    Build {
        tree: String,
        digraph: String,
        #[command(flatten)]
        out: GenOut,
    },
    /// Distinct edge patterns of a path family against the 3m-3 and 3m-5 bounds.
    Patterns { tree: String, paths: String },
    /// Column bound for odd positive sums and row bounds of the network matrix.
    Bounds { tree: String, digraph: String },
}

#[derive(Args)]
pub struct SpecFile {
    /// JSON sum specification.
    pub spec: String,
}

#[derive(Subcommand)]
pub enum SumCommand {
    One(SpecFile),
    Two(SpecFile),
    Three(SpecFile),
    Delta(SpecFile),
    /// Transport a functional `f` with `f M = w` to the factors.
    Transport {
        #[command(flatten)]
        spec: SpecFile,
        /// Comma-separated coefficients, one per row of the sum.
        #[arg(long, allow_hyphen_values = true)]
        functional: String,
        /// Comma-separated values; `f M` by default.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchModeArg {
    Verify,
    Fast,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub m: usize,
    /// `verify` discovers the maximum; `fast` prunes against the known value.
    #[arg(long, value_enum, default_value_t = SearchModeArg::Verify)]
    pub mode: SearchModeArg,
    /// Node budget; defaults to TUMAX_BUDGET_NODES when set.
    #[arg(long)]
    pub max_nodes: Option<u64>,
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// Raise the row limit up to 7.
    #[arg(long)]
    pub max_rows: Option<usize>,
}

#[derive(Subcommand)]
pub enum VerifyCommand {
    /// Superadditivity exceptions of h up to `--max`.
    Extralemma {
        #[arg(long, default_value_t = 200)]
        max: i64,
    },
    /// Largest prepared matrix with m rows.
    PolytopalBound {
        #[command(flatten)]
        search: SearchArgs,
        /// Search positive odd column sums instead of column sum 1.
        #[arg(long)]
        odd_sums: bool,
    },
    /// Largest TU matrix with m rows and distinct columns.
    HellerBound {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Randomized row bounds for network matrices, optionally with an
    /// exhaustive pattern sweep over small trees.
    TransposeBound {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        max_tree_arcs: usize,
        #[arg(long, default_value_t = 5)]
        max_arcs: usize,
        /// Sweep all trees with at most this many vertices (at most 8).
        #[arg(long, default_value_t = 0)]
        exhaustive_vertices: usize,
    },
    /// Vertex bound for a point set file or for every class of a dimension.
    VertexBound {
        file: Option<String>,
        #[arg(long, conflicts_with = "file")]
        dimension: Option<usize>,
    },
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub dimension: usize,
    /// Test every subset without the vertex ceiling (d <= 3).
    #[arg(long)]
    pub unpruned: bool,
    /// Allow dimension 5.
    #[arg(long)]
    pub stretch: bool,
}

fn command_name(c: &Command) -> String {
    let (group, name): (&str, &str) = match c {
        Command::Check(k) => (
            "check",
            match k {
                CheckCommand::Tu(_) => "tu",
                CheckCommand::Unimodular(_) => "unimodular",
                CheckCommand::Polytopal(_) => "polytopal",
                CheckCommand::Prepared(_) => "prepared",
                CheckCommand::UnimodularPolytope { .. } => "unimodular-polytope",
            },
        ),
        Command::Gen(k) => (
            "gen",
            match k {
                GenCommand::Heller { .. } => "heller",
                GenCommand::Bipartite { .. } => "bipartite",
                GenCommand::Sporadic5x10 { .. } => "sporadic-5x10",
                GenCommand::Sporadic5x5 { .. } => "sporadic-5x5",
                GenCommand::Ex4 { .. } => "ex4",
                GenCommand::SimplexProduct { .. } => "simplex-product",
                GenCommand::EdgePolytope { .. } => "edge-polytope",
            },
        ),
        Command::Network(k) => (
            "network",
            match k {
                NetworkCommand::Build { .. } => "build",
                NetworkCommand::Patterns { .. } => "patterns",
                NetworkCommand::Bounds { .. } => "bounds",
            },
        ),
        Command::Sum(k) => (
            "sum",
            match k {
                SumCommand::One(_) => "one",
                SumCommand::Two(_) => "two",
                SumCommand::Three(_) => "three",
                SumCommand::Delta(_) => "delta",
                SumCommand::Transport { .. } => "transport",
            },
        ),
        Command::Verify(k) => (
            "verify",
            match k {
                VerifyCommand::Extralemma { .. } => "extralemma",
                VerifyCommand::PolytopalBound { .. } => "polytopal-bound",
                VerifyCommand::HellerBound { .. } => "heller-bound",
                VerifyCommand::TransposeBound { .. } => "transpose-bound",
                VerifyCommand::VertexBound { .. } => "vertex-bound",
            },
        ),
        Command::Classify(_) => return "classify".into(),
    };
    format!("{group} {name}")
}

/// Result of running a command: the report payload plus, for `gen` without
/// `--out`, raw text that replaces the report on stdout.
pub struct Run {
    pub inputs: Value,
    pub outcome: Result<Outcome, Failure>,
    pub raw: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = command_name(&cli.command);
    let run = commands::run(&cli.command, cli.seed);
    let (status, result, summary) = match run.outcome {
        Ok(o) => (o.status, o.result, o.summary),
        Err(f) => {
            eprintln!("error: {}", f.message);
            let result = json!({ "error": f.message, "partial": f.partial });
            (f.status, result, f.message)
        }
    };
    if let (Some(raw), report::Status::Ok) = (&run.raw, status) {
        print!("{raw}");
        return ExitCode::from(0);
    }
    let exit_status = status.code();
    match cli.format {
        Format::Json => {
            let report = CommandReport { command, inputs: run.inputs, result, exit_status };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Format::Text => println!("{command}: {summary}"),
    }
    ExitCode::from(exit_status as u8)
}
