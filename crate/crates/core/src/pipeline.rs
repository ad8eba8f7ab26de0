//! End-to-end solve: decompose, convert to nice form, run the DP,
//! reconstruct, and report.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::cost::{CostModel, ExtendedCost};
use crate::dp::{self, SolveOptions};
use crate::error::{Error, Result};
use crate::generate;
use crate::graph::{Graph, Subgraph};
use crate::io;
use crate::oracle::{self, MAX_ORACLE_EDGES};
use crate::treedecomp::{min_fill_decompose, to_nice, validate_nice, validate_td, TreeDecomposition};

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// Use this decomposition instead of running min-fill.
    pub decomposition: Option<TreeDecomposition>,
    pub max_width: Option<usize>,
    /// Compare against exhaustive search when the instance is small enough.
    pub check_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub optimum: i64,
    /// 1-based endpoints in canonical order.
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    pub width: isize,
    pub nice_nodes: usize,
    pub total_states: u128,
    pub max_states: usize,
    pub state_bound: u128,
    pub oracle: Option<i64>,
}

impl RunReport {
    /// Line-oriented text form. Contains no timing data.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "optimum {}", self.optimum);
        let _ = writeln!(out, "width {}", self.width);
        let _ = writeln!(out, "nice_nodes {}", self.nice_nodes);
        let _ = writeln!(out, "states_total {}", self.total_states);
        let _ = writeln!(out, "states_max {}", self.max_states);
        let _ = writeln!(out, "states_bound {}", self.state_bound);
        if let Some(o) = self.oracle {
            let _ = writeln!(out, "oracle {o}");
        }
        let degrees: Vec<String> = self.degrees.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "degrees {}", degrees.join(" "));
        let _ = writeln!(out, "edges {}", self.edges.len());
        for (u, v) in &self.edges {
            let _ = writeln!(out, "edge {u} {v}");
        }
        out
    }
}

/// Runs the whole pipeline and returns the report with the optimal subgraph.
pub fn solve_instance<'g>(
    graph: &'g Graph,
    model: &CostModel,
    opts: &PipelineOptions,
) -> Result<(RunReport, Subgraph<'g>)> {
    if graph.n() != model.n() {
        return Err(Error::DimensionMismatch {
            graph: graph.n(),
            model: model.n(),
        });
    }
    let td = match &opts.decomposition {
        Some(td) => {
            if let Err(v) = validate_td(graph, td) {
                let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::InvalidDecomposition(msg.join("; ")));
            }
            td.clone()
        }
        None => min_fill_decompose(graph).0,
    };
    let width = td.width();
    if let Some(limit) = opts.max_width {
        if width > limit as isize {
            return Err(Error::WidthExceeded {
                width: width as usize,
                limit,
            });
        }
    }
    let ntd = to_nice(&td, graph)?;
    if let Err(v) = validate_nice(graph, &ntd, width.max(0) as usize) {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::Internal(format!("nice conversion broke an invariant: {}", msg.join("; "))));
    }
    let (optimum, tables) = dp::solve(graph, model, &ntd, SolveOptions::default())?;
    let solution = dp::reconstruct(graph, &tables, &ntd)?;
    let value = optimum
        .finite()
        .ok_or_else(|| Error::Internal("root value is infinite".into()))?;
    if model.evaluate(&solution)? != optimum {
        return Err(Error::Internal(
            "reconstructed subgraph does not attain the optimum".into(),
        ));
    }
    let oracle = if opts.check_oracle && graph.m() <= MAX_ORACLE_EDGES {
        let r = oracle::brute_force_solve(graph, model)?;
        if r.optimum != optimum {
            return Err(Error::Internal(format!(
                "oracle disagrees: dp {optimum}, exhaustive {}",
                r.optimum
            )));
        }
        r.optimum.finite()
    } else {
        None
    };
    let counts = tables.state_count_report();
    let report = RunReport {
        optimum: value,
        edges: solution.edges().map(|e| (e.u + 1, e.v + 1)).collect(),
        degrees: solution.degrees(),
        width,
        nice_nodes: ntd.len(),
        total_states: counts.total_states,
        max_states: counts.max_states,
        state_bound: counts.total_bound,
        oracle,
    };
    Ok((report, solution))
}

/// DP optimum via min-fill and nice conversion, without reconstruction.
pub fn dp_optimum(graph: &Graph, model: &CostModel) -> Result<ExtendedCost> {
    let (td, _) = min_fill_decompose(graph);
    let ntd = to_nice(&td, graph)?;
    let opts = SolveOptions {
        retain_tables: false,
        ..SolveOptions::default()
    };
    Ok(dp::solve(graph, model, &ntd, opts)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosscheckConfig {
    pub count: usize,
    pub seed: u64,
    pub min_n: usize,
    pub max_n: usize,
    pub edge_probability: f64,
    pub cost_min: i64,
    pub cost_max: i64,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        CrosscheckConfig {
            count: 500,
            seed: 1,
            min_n: 2,
            max_n: 9,
            edge_probability: 0.5,
            cost_min: -9,
            cost_max: 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub index: usize,
    pub graph: String,
    pub costs: String,
    pub solver: std::result::Result<ExtendedCost, String>,
    pub oracle: ExtendedCost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckSummary {
    pub total: usize,
    pub matched: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl CrosscheckSummary {
    pub fn passed(&self) -> bool {
        self.matched == self.total
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}/{} match\n", self.matched, self.total);
        if let Some(m) = &self.first_mismatch {
            let solver = match &m.solver {
                Ok(v) => v.to_string(),
                Err(e) => format!("error: {e}"),
            };
            let _ = writeln!(out, "first mismatch at instance {}: solver {solver}, oracle {}", m.index, m.oracle);
            let _ = write!(out, "c graph\n{}c costs\n{}", m.graph, m.costs);
        }
        out
    }
}

/// The seeded random instances used by [`crosscheck`], in order.
pub fn random_instances(cfg: &CrosscheckConfig) -> impl Iterator<Item = (Graph, CostModel)> {
    let mut rng = generate::rng(cfg.seed);
    let cfg = *cfg;
    (0..cfg.count).map(move |_| {
        let n = rng.gen_range(cfg.min_n..=cfg.max_n);
        // Redraw graphs the exhaustive oracle refuses.
        let g = loop {
            let g = generate::gnp(n, cfg.edge_probability, &mut rng);
            if g.m() <= MAX_ORACLE_EDGES {
                break g;
            }
        };
        let m = generate::random_costs(n, cfg.cost_min, cfg.cost_max, &mut rng);
        (g, m)
    })
}

/// Compares `solver` with exhaustive search on seeded random instances.
pub fn crosscheck<F>(cfg: &CrosscheckConfig, solver: F) -> Result<CrosscheckSummary>
where
    F: Fn(&Graph, &CostModel) -> Result<ExtendedCost>,
{
    let mut matched = 0;
    let mut first_mismatch = None;
    for (index, (g, m)) in random_instances(cfg).enumerate() {
        let expected = oracle::brute_force_solve(&g, &m)?.optimum;
        let got = solver(&g, &m);
        if got.as_ref() == Ok(&expected) {
            matched += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(Mismatch {
                index,
                graph: io::write_graph(&g),
                costs: io::write_costs(&m),
                solver: got.map_err(|e| e.to_string()),
                oracle: expected,
            });
        }
    }
    Ok(CrosscheckSummary {
        total: cfg.count,
        matched,
        first_mismatch,
    })
}
