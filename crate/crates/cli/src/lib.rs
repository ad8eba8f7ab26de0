//! Command-line frontend for the degree sequence solver.
//!
//! Every command renders its report into a `String` so the binary and the
//! tests share one code path. Timing goes to stderr only; stdout is a pure
//! function of the inputs and the seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use degseq_core::generate::{self, GenParams, GraphKind};
use degseq_core::io;
use degseq_core::oracle::{self, MAX_ORACLE_EDGES};
use degseq_core::pipeline::{self, CrosscheckConfig};
use degseq_core::treedecomp::NiceDecomposition;
use degseq_core::{
    min_fill_decompose, solve_instance, to_nice, validate_nice, validate_td, CostModel, Error, Graph, NodeKind,
    PipelineOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_WIDTH: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "degseq", version, about = "Exact degree sequence optimization on bounded-treewidth graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance: decompose, run the DP, reconstruct, report.
    Solve(SolveArgs),
    /// Print a min-fill tree decomposition in .td format.
    Decompose(DecomposeArgs),
    /// Check a .td file against a graph.
    ValidateTd(ValidateArgs),
    /// Generate a graph in .gr format.
    Gen(GenArgs),
    /// Solve by exhaustive search over all edge subsets.
    Oracle(OracleArgs),
    /// Compare the DP against exhaustive search on random instances.
    Crosscheck(CrosscheckArgs),
    /// Run the solver on generated graphs and emit CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub costs: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Use this decomposition instead of min-fill.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long)]
    pub max_width: Option<usize>,
    /// Write the solution file here.
    #[arg(long)]
    pub emit_solution: Option<PathBuf>,
    /// Also run exhaustive search (when within its edge limit) and require agreement.
    #[arg(long)]
    pub check_oracle: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub max_width: Option<usize>,
    /// Print the nice decomposition node by node instead of the .td file.
    #[arg(long)]
    pub nice: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub td: PathBuf,
    #[arg(long)]
    pub max_width: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// path, cycle, ktree, series-parallel or random
    #[arg(long)]
    pub kind: GraphKind,
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long, default_value_t = 2)]
    pub k: usize,
    /// Edge probability for `random`.
    #[arg(short, long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write uniform random cost tables to this file.
    #[arg(long)]
    pub emit_costs: Option<PathBuf>,
    #[arg(long, default_value_t = -9, allow_hyphen_values = true)]
    pub cost_min: i64,
    #[arg(long, default_value_t = 9, allow_hyphen_values = true)]
    pub cost_max: i64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub emit_solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    /// Check this one instance instead of a random suite.
    #[arg(long, requires = "costs")]
    pub graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    pub costs: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub min_n: usize,
    #[arg(long, default_value_t = 9)]
    pub max_n: usize,
    #[arg(short, long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub kind: GraphKind,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(short, long, default_value_t = 2)]
    pub k: usize,
    #[arg(short, long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leave the wall_ms column empty so output is reproducible.
    #[arg(long)]
    pub no_timings: bool,
}

/// Outcome of one command: stdout text, diagnostics for stderr, exit code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            ..Default::default()
        }
    }
}

/// A failure with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WidthExceeded { .. } => EXIT_WIDTH,
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    io::parse_graph(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_instance(args: &InstanceArgs) -> Result<(Graph, CostModel), Failure> {
    let g = load_graph(&args.graph)?;
    let m = io::parse_costs(&read(&args.costs)?, g.n())
        .map_err(|e| input(format!("{}: {e}", args.costs.display())))?;
    Ok((g, m))
}

fn load_td(path: &Path, g: &Graph) -> Result<degseq_core::TreeDecomposition, Failure> {
    let file = io::parse_td(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
    if file.n != g.n() {
        return Err(input(format!(
            "{}: decomposition is for {} vertices, graph has {}",
            path.display(),
            file.n,
            g.n()
        )));
    }
    Ok(file.decomposition)
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let started = Instant::now();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::ValidateTd(a) => cmd_validate_td(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Crosscheck(a) => cmd_crosscheck(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(mut out) => {
            if matches!(cli.command, Command::Solve(_) | Command::Oracle(_)) {
                let _ = writeln!(out.stderr, "wall_ms {}", started.elapsed().as_millis());
            }
            out
        }
        Err(f) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
            code: f.code,
        },
    }
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Outcome, Failure> {
    let (g, m) = load_instance(&a.instance)?;
    let decomposition = a.td.as_deref().map(|p| load_td(p, &g)).transpose()?;
    let opts = PipelineOptions {
        decomposition,
        max_width: a.max_width,
        check_oracle: a.check_oracle,
    };
    let (report, solution) = solve_instance(&g, &m, &opts)?;
    if let Some(path) = &a.emit_solution {
        write(path, &io::write_solution(report.optimum, &solution))?;
    }
    let mut out = Outcome::ok(report.render());
    if a.check_oracle && report.oracle.is_none() {
        out.stderr = format!("oracle skipped: {} edges exceed the limit of {MAX_ORACLE_EDGES}\n", g.m());
    }
    Ok(out)
}

pub fn cmd_decompose(a: &DecomposeArgs) -> Result<Outcome, Failure> {
    let g = load_graph(&a.graph)?;
    let (td, report) = min_fill_decompose(&g);
    if let Some(limit) = a.max_width {
        if report.width > limit as isize {
            return Err(Error::WidthExceeded {
                width: report.width as usize,
                limit,
            }
            .into());
        }
    }
    let text = if a.nice {
        render_nice(&to_nice(&td, &g)?)
    } else {
        io::write_td(&td, g.n())
    };
    let histogram: Vec<String> = report.histogram.iter().map(ToString::to_string).collect();
    Ok(Outcome {
        stdout: text,
        stderr: format!("width {} bag sizes {}\n", report.width, histogram.join(" ")),
        code: EXIT_OK,
    })
}

/// One line per node in post-order: `<id> <kind> [vertex] : <bag> -> <children>`.
pub fn render_nice(ntd: &NiceDecomposition) -> String {
    let mut out = format!("nice {} nodes, width {}, root {}\n", ntd.len(), ntd.width(), ntd.root() + 1);
    for (id, node) in ntd.nodes().iter().enumerate() {
        let kind = match node.kind {
            NodeKind::Leaf => "leaf".to_string(),
            NodeKind::Introduce(x) => format!("introduce {}", x + 1),
            NodeKind::Forget(x) => format!("forget {}", x + 1),
            NodeKind::Join => "join".to_string(),
        };
        let bag: Vec<String> = node.bag.iter().map(|x| (x + 1).to_string()).collect();
        let children: Vec<String> = node.children.iter().map(|c| (c + 1).to_string()).collect();
        let _ = writeln!(out, "{} {kind} : {} -> {}", id + 1, bag.join(" "), children.join(" "));
    }
    out
}

pub fn cmd_validate_td(a: &ValidateArgs) -> Result<Outcome, Failure> {
    let g = load_graph(&a.graph)?;
    let td = load_td(&a.td, &g)?;
    if let Err(violations) = validate_td(&g, &td) {
        let lines: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(input(format!("invalid decomposition\n{}", lines.join("\n"))));
    }
    let width = td.width();
    if let Some(limit) = a.max_width {
        if width > limit as isize {
            return Err(Error::WidthExceeded {
                width: width as usize,
                limit,
            }
            .into());
        }
    }
    let ntd = to_nice(&td, &g)?;
    if let Err(v) = validate_nice(&g, &ntd, width.max(0) as usize) {
        let lines: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::Internal(format!("nice conversion broke an invariant: {}", lines.join("; "))).into());
    }
    Ok(Outcome::ok(format!(
        "valid width {width} bags {} nice_nodes {}\n",
        td.len(),
        ntd.len()
    )))
}

pub fn cmd_gen(a: &GenArgs) -> Result<Outcome, Failure> {
    let params = GenParams {
        kind: a.kind,
        n: a.n,
        k: a.k,
        p: a.p,
        seed: a.seed,
    };
    let g = generate::generate(&params)?;
    if let Some(path) = &a.emit_costs {
        if a.cost_min > a.cost_max {
            return Err(input("--cost-min exceeds --cost-max"));
        }
        // Costs draw from their own stream so the graph does not depend on them.
        let mut rng = generate::rng(a.seed ^ 0x9e37_79b9_7f4a_7c15);
        let m = generate::random_costs(g.n(), a.cost_min, a.cost_max, &mut rng);
        write(path, &io::write_costs(&m))?;
    }
    Ok(Outcome::ok(io::write_graph(&g)))
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<Outcome, Failure> {
    let (g, m) = load_instance(&a.instance)?;
    let r = oracle::brute_force_solve(&g, &m)?;
    let witness = oracle::witness_subgraph(&g, &r)?;
    let value = r
        .optimum
        .finite()
        .ok_or_else(|| Failure::from(Error::Internal("exhaustive optimum is infinite".into())))?;
    if let Some(path) = &a.emit_solution {
        write(path, &io::write_solution(value, &witness))?;
    }
    let mut text = format!("optimum {value}\n");
    let degrees: Vec<String> = witness.degrees().iter().map(ToString::to_string).collect();
    let _ = writeln!(text, "degrees {}", degrees.join(" "));
    let _ = writeln!(text, "edges {}", witness.len());
    for e in witness.edges() {
        let _ = writeln!(text, "edge {} {}", e.u + 1, e.v + 1);
    }
    Ok(Outcome::ok(text))
}

pub fn cmd_crosscheck(a: &CrosscheckArgs) -> Result<Outcome, Failure> {
    if let (Some(graph), Some(costs)) = (&a.graph, &a.costs) {
        let (g, m) = load_instance(&InstanceArgs {
            graph: graph.clone(),
            costs: costs.clone(),
        })?;
        let expected = oracle::brute_force_solve(&g, &m)?.optimum;
        let got = pipeline::dp_optimum(&g, &m)?;
        return if got == expected {
            Ok(Outcome::ok("1/1 match\n".into()))
        } else {
            Ok(Outcome {
                stdout: format!("0/1 match\nsolver {got}, oracle {expected}\n"),
                stderr: String::new(),
                code: EXIT_INTERNAL,
            })
        };
    }
    if a.min_n == 0 || a.min_n > a.max_n {
        return Err(input("need 1 ≤ --min-n ≤ --max-n"));
    }
    if !(0.0..=1.0).contains(&a.p) {
        return Err(input(format!("edge probability {} outside [0, 1]", a.p)));
    }
    let cfg = CrosscheckConfig {
        count: a.count,
        seed: a.seed,
        min_n: a.min_n,
        max_n: a.max_n,
        edge_probability: a.p,
        ..CrosscheckConfig::default()
    };
    let summary = pipeline::crosscheck(&cfg, pipeline::dp_optimum)?;
    Ok(Outcome {
        stdout: summary.render(),
        stderr: String::new(),
        code: if summary.passed() { EXIT_OK } else { EXIT_INTERNAL },
    })
}

pub const BENCH_HEADER: &str = "kind,n,k,m,width,nice_nodes,total_states,max_states,state_bound,optimum,wall_ms";

pub fn cmd_bench(a: &BenchArgs) -> Result<Outcome, Failure> {
    let kind = match a.kind {
        GraphKind::Path => "path",
        GraphKind::Cycle => "cycle",
        GraphKind::KTree => "ktree",
        GraphKind::SeriesParallel => "series-parallel",
        GraphKind::Random => "random",
    };
    let mut csv = format!("{BENCH_HEADER}\n");
    for (i, &n) in a.sizes.iter().enumerate() {
        let seed = a.seed.wrapping_add(i as u64);
        let g = generate::generate(&GenParams {
            kind: a.kind,
            n,
            k: a.k,
            p: a.p,
            seed,
        })?;
        let m = generate::random_costs(n, -9, 9, &mut generate::rng(seed));
        let started = Instant::now();
        let (r, _) = solve_instance(&g, &m, &PipelineOptions::default())?;
        let wall = if a.no_timings {
            String::new()
        } else {
            started.elapsed().as_millis().to_string()
        };
        let _ = writeln!(
            csv,
            "{kind},{n},{},{},{},{},{},{},{},{},{wall}",
            a.k,
            g.m(),
            r.width,
            r.nice_nodes,
            r.total_states,
            r.max_states,
            r.state_bound,
            r.optimum
        );
    }
    Ok(Outcome::ok(csv))
}
