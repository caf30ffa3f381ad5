//! The `delegraph` command: parse a delegation graph, tally it, explain
//! voter totals, answer what-if queries.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 validation/parse/input error, 2 solver error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use delegraph::extensions::DecayConfig;
use delegraph::formats::{self, InputFormat};
use delegraph::graph::{validate, DelegationGraph, NodeId};
use delegraph::pipeline::{
    report_to_csv, run_explain, run_pipeline, run_whatif, to_json, AttributionSelect,
    PipelineConfig,
};
use delegraph::solver::{MethodChoice, SolveConfig};
use delegraph::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

#[derive(Parser)]
#[command(
    name = "delegraph",
    version,
    about = "Resolve multi-proxy transitive vote delegation graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tally the graph and emit a report
    Solve(SolveArgs),
    /// Show where a voter's votes came from
    Explain(ExplainArgs),
    /// Votes a node would receive if it voted itself
    Whatif(WhatifArgs),
    /// Validate the input and report every issue
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input file: JSON or edge list (format sniffed by content)
    file: PathBuf,

    /// Force the input format instead of sniffing
    #[arg(long, value_enum)]
    input_format: Option<FormatArg>,
}

#[derive(Args)]
struct SolverArgs {
    /// Convergence tolerance (max norm) for the iterative solver
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    /// Solver route
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,

    /// Decay factor in (0, 1]: every delegation weight is multiplied by it
    #[arg(long, default_value_t = 1.0)]
    decay: f64,

    /// Solve over exact rationals and print p/q values (small graphs)
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// Report format on stdout
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Embed attribution rows: `all`, `none`, or a comma-separated voter list
    #[arg(long, default_value = "none")]
    attributions: String,

    /// Write the simplified graph as Graphviz DOT to this path
    #[arg(long)]
    dot: Option<PathBuf>,

    /// Include the raw solution vector (labelled debugging output: raw `S`
    /// entries of non-voters are not would-have-voted counts)
    #[arg(long = "debug-s")]
    debug_s: bool,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// The voter to explain
    #[arg(long)]
    voter: String,
}

#[derive(Args)]
struct WhatifArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// The node to flip to voting
    #[arg(long)]
    node: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Edgelist,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Direct,
    Neumann,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Invalid(_)
        | Error::Parse { .. }
        | Error::EmptyResult
        | Error::NotAVoter(_)
        | Error::UnknownNode(_)
        | Error::UnknownEdge { .. } => EXIT_INPUT,
        Error::SingularSystem | Error::NoConvergence { .. } | Error::TooLarge { .. } => EXIT_SOLVER,
    }
}

fn load_graph(common: &CommonArgs) -> Result<DelegationGraph, (i32, String)> {
    let raw = fs::read_to_string(&common.file).map_err(|e| {
        (
            EXIT_INPUT,
            format!("cannot read {}: {e}", common.file.display()),
        )
    })?;
    let format = match common.input_format {
        Some(FormatArg::Json) => InputFormat::Json,
        Some(FormatArg::Edgelist) => InputFormat::EdgeList,
        None => formats::detect_format(&raw),
    };
    formats::parse_input(&raw, format).map_err(|e| (exit_code_for(&e), e.to_string()))
}

fn pipeline_config(solver: &SolverArgs) -> Result<PipelineConfig, (i32, String)> {
    let decay =
        DecayConfig::new(solver.decay).map_err(|e| (EXIT_INPUT, format!("--decay: {e}")))?;
    Ok(PipelineConfig {
        solve: SolveConfig {
            method: match solver.method {
                MethodArg::Auto => MethodChoice::Auto,
                MethodArg::Direct => MethodChoice::Direct,
                MethodArg::Neumann => MethodChoice::Neumann,
            },
            tol: solver.tol,
            ..Default::default()
        },
        decay,
        exact: solver.exact,
        ..Default::default()
    })
}

fn parse_attributions(arg: &str) -> AttributionSelect {
    match arg {
        "none" => AttributionSelect::None,
        "all" => AttributionSelect::All,
        ids => AttributionSelect::Ids(
            ids.split(',')
                .filter(|s| !s.is_empty())
                .map(NodeId::from)
                .collect(),
        ),
    }
}

/// Runs the CLI against explicit streams; returns the process exit code.
pub fn run(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };

    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args, stdout, stderr),
        Command::Explain(args) => cmd_explain(args, stdout),
        Command::Whatif(args) => cmd_whatif(args, stdout),
        Command::Check(args) => cmd_check(args, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err((code, message)) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}

type CmdResult = Result<i32, (i32, String)>;

fn cmd_solve(args: SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let graph = load_graph(&args.common)?;
    let mut cfg = pipeline_config(&args.solver)?;
    cfg.attributions = parse_attributions(&args.attributions);
    cfg.include_raw_s = args.debug_s;

    let output = run_pipeline(&graph, &cfg).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    for issue in output.simplified.report().waste_warnings() {
        let _ = writeln!(
            stderr,
            "warning: PARTIAL_WASTE({}): {}",
            issue.element, issue.message
        );
    }

    if let Some(path) = &args.dot {
        fs::write(path, formats::to_dot(&output.simplified))
            .map_err(|e| (EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
    }

    let rendered = match args.format {
        OutputFormat::Json => to_json(&output.report),
        OutputFormat::Csv => report_to_csv(&output.report),
    };
    let _ = stdout.write_all(rendered.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_explain(args: ExplainArgs, stdout: &mut dyn Write) -> CmdResult {
    let graph = load_graph(&args.common)?;
    let cfg = pipeline_config(&args.solver)?;
    let report = run_explain(&graph, &NodeId::from(args.voter.as_str()), &cfg)
        .map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let _ = stdout.write_all(to_json(&report).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_whatif(args: WhatifArgs, stdout: &mut dyn Write) -> CmdResult {
    let graph = load_graph(&args.common)?;
    let cfg = pipeline_config(&args.solver)?;
    let report = run_whatif(&graph, &NodeId::from(args.node.as_str()), &cfg)
        .map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let _ = stdout.write_all(to_json(&report).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_check(args: CommonArgs, stdout: &mut dyn Write) -> CmdResult {
    let raw = fs::read_to_string(&args.file).map_err(|e| {
        (
            EXIT_INPUT,
            format!("cannot read {}: {e}", args.file.display()),
        )
    })?;
    let format = match args.input_format {
        Some(FormatArg::Json) => InputFormat::Json,
        Some(FormatArg::Edgelist) => InputFormat::EdgeList,
        None => formats::detect_format(&raw),
    };
    match formats::parse_input(&raw, format) {
        Ok(graph) => {
            let report = validate(&graph);
            let code = if report.is_ok() { EXIT_OK } else { EXIT_INPUT };
            let _ = stdout.write_all(to_json(&report).as_bytes());
            Ok(code)
        }
        // Structural failures still yield a machine-readable report.
        Err(Error::Invalid(report)) => {
            let _ = stdout.write_all(to_json(&report).as_bytes());
            Ok(EXIT_INPUT)
        }
        Err(e) => Err((exit_code_for(&e), e.to_string())),
    }
}
