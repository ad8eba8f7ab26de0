//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Tolerances are the constants below.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{exit, Command};
use std::time::{Duration, Instant};

use degseq_core::dp::{self, SolveOptions};
use degseq_core::generate::{self, rng};
use degseq_core::oracle::{self, MAX_ORACLE_EDGES, MAX_STATE_EDGES};
use degseq_core::pipeline::{random_instances, CrosscheckConfig};
use degseq_core::{
    min_fill_decompose, solve_instance, to_nice, validate_nice, validate_td, BagState, CostModel, ExtendedCost,
    Graph, PipelineOptions, Subgraph,
};
use rand::Rng;

const GLOBAL_COUNT: usize = 500;
const GLOBAL_LIMIT: Duration = Duration::from_secs(60);
const STATE_COUNT: usize = 50;
const STATE_MAX_N: usize = 7;
const FACTOR_COUNT: usize = 100;
const CUBIC_COUNT: usize = 50;
const REDUCTION_MAX_N: usize = 8;
const DECOMP_COUNT: usize = 200;
const DECOMP_MAX_N: usize = 20;
const DECOMP_P: f64 = 0.3;
const PATH_N: usize = 10_000;
const PATH_LIMIT: Duration = Duration::from_secs(5);
const TWO_TREE_N: usize = 200;
const TWO_TREE_SEEDS: u64 = 5;
const TWO_TREE_LIMIT: Duration = Duration::from_secs(60);

struct Gate {
    failed: usize,
}

impl Gate {
    fn check(&mut self, name: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("PASS  {name:<32} {detail}"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL  {name:<32} {detail}");
            }
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

/// Solution edges lie in `E(H)` and evaluate exactly to `optimum`.
fn sound(g: &Graph, m: &CostModel, sol: &Subgraph<'_>, optimum: i64) -> Result<(), String> {
    if let Some(e) = sol.edges().find(|e| !g.has_edge(e.u, e.v)) {
        return Err(format!("edge {e} not in the host"));
    }
    match m.evaluate(sol) {
        Ok(ExtendedCost::Finite(v)) if v == optimum => Ok(()),
        other => Err(format!("solution evaluates to {other:?}, optimum {optimum}")),
    }
}

/// Global oracle equivalence plus reconstruction soundness on the same suite.
fn global_suite() -> (Result<String, String>, Result<String, String>) {
    let cfg = CrosscheckConfig::default();
    assert_eq!((cfg.count, cfg.seed, cfg.min_n, cfg.max_n), (GLOBAL_COUNT, 1, 2, 9));
    let start = Instant::now();
    let mut matched = 0;
    let mut first_bad = None;
    let mut unsound = None;
    for (i, (g, m)) in random_instances(&cfg).enumerate() {
        let expected = oracle::brute_force_solve(&g, &m).expect("within guard").optimum;
        match solve_instance(&g, &m, &PipelineOptions::default()) {
            Ok((r, sol)) => {
                if ExtendedCost::Finite(r.optimum) == expected {
                    matched += 1;
                } else if first_bad.is_none() {
                    first_bad = Some(format!("instance {i}: dp {}, oracle {expected}", r.optimum));
                }
                if let Err(e) = sound(&g, &m, &sol, r.optimum) {
                    unsound.get_or_insert(format!("instance {i}: {e}"));
                }
            }
            Err(e) => {
                first_bad.get_or_insert(format!("instance {i}: {e}"));
                unsound.get_or_insert(format!("instance {i}: {e}"));
            }
        }
    }
    let took = start.elapsed();
    let summary = format!("{matched}/{GLOBAL_COUNT} match in {} (limit {})", secs(took), secs(GLOBAL_LIMIT));
    let equivalence = match first_bad {
        None if took < GLOBAL_LIMIT => Ok(summary),
        None => Err(summary),
        Some(b) => Err(format!("{summary}; first mismatch {b}")),
    };
    let soundness = match unsound {
        None => Ok(format!("{GLOBAL_COUNT} reconstructions exact")),
        Some(e) => Err(e),
    };
    (equivalence, soundness)
}

fn state_instances() -> Vec<(Graph, CostModel)> {
    let mut r = rng(2);
    (0..STATE_COUNT)
        .map(|_| {
            let n = r.gen_range(2..=STATE_MAX_N);
            // Every cone must stay within the per-node enumeration limit.
            let g = loop {
                let g = generate::gnp(n, 0.5, &mut r);
                if g.m() <= MAX_STATE_EDGES {
                    break g;
                }
            };
            let m = generate::random_costs(n, -9, 9, &mut r);
            (g, m)
        })
        .collect()
}

/// Absent states to probe: degree vectors within the caps, with the stored
/// edge sets, that the table does not hold.
fn absent_probes(g: &Graph, stored: &BTreeSet<BagState>, bag: &[usize]) -> Vec<BagState> {
    let mut out = Vec::new();
    for s in stored.iter().take(4) {
        for (p, &x) in bag.iter().enumerate() {
            let mut t = s.clone();
            t.degrees[p] += 1;
            if t.degrees[p] <= g.degree(x) && !stored.contains(&t) {
                out.push(t);
            }
        }
    }
    out.truncate(4);
    out
}

/// State-level equivalence plus reconstruction soundness on the same suite.
fn state_suite() -> (Result<String, String>, Result<String, String>) {
    let mut nodes = 0usize;
    let mut entries = 0usize;
    let mut probes = 0usize;
    let mut unsound = None;
    for (i, (g, m)) in state_instances().into_iter().enumerate() {
        let (td, _) = min_fill_decompose(&g);
        let ntd = to_nice(&td, &g).expect("nice conversion");
        let (opt, tables) = dp::solve(&g, &m, &ntd, SolveOptions::default()).expect("solve");
        for v in 0..ntd.len() {
            let table = tables.table(v).expect("tables retained");
            let got: Vec<(BagState, i64)> = table.states(&g);
            let exact = oracle::brute_force_node_states(&g, &ntd, v, &m).expect("within guard");
            let got_keys: BTreeSet<BagState> = got.iter().map(|(s, _)| s.clone()).collect();
            let exact_keys: BTreeSet<BagState> = exact.keys().cloned().collect();
            if got_keys != exact_keys {
                return (
                    Err(format!("instance {i} node {v}: stored {} states, feasible {}", got_keys.len(), exact_keys.len())),
                    Err("not checked".into()),
                );
            }
            for (s, value) in &got {
                if exact[s] != *value {
                    return (
                        Err(format!("instance {i} node {v}: {s:?} stored {value}, exact {}", exact[s])),
                        Err("not checked".into()),
                    );
                }
            }
            // Spot checks through the single-state oracle, both directions.
            for (s, value) in got.iter().take(3) {
                let direct = oracle::brute_force_state(&g, &ntd, v, s, &m).expect("within guard");
                if direct != ExtendedCost::Finite(*value) {
                    return (Err(format!("instance {i} node {v}: direct {direct} vs {value}")), Err("not checked".into()));
                }
                probes += 1;
            }
            for s in absent_probes(&g, &got_keys, &ntd.node(v).bag) {
                let direct = oracle::brute_force_state(&g, &ntd, v, &s, &m).expect("within guard");
                if direct != ExtendedCost::Infinite || table.lookup(&g, &s) != ExtendedCost::Infinite {
                    return (Err(format!("instance {i} node {v}: absent {s:?} is {direct}")), Err("not checked".into()));
                }
                probes += 1;
            }
            nodes += 1;
            entries += got.len();
        }
        let optimum = opt.finite().expect("finite optimum");
        match dp::reconstruct(&g, &tables, &ntd) {
            Ok(sol) => {
                if let Err(e) = sound(&g, &m, &sol, optimum) {
                    unsound.get_or_insert(format!("instance {i}: {e}"));
                }
            }
            Err(e) => {
                unsound.get_or_insert(format!("instance {i}: {e}"));
            }
        }
    }
    let equivalence = Ok(format!(
        "{STATE_COUNT} instances, {nodes} nodes, {entries} entries exact, key sets equal, {probes} direct probes"
    ));
    let soundness = match unsound {
        None => Ok(format!("{STATE_COUNT} reconstructions exact")),
        Some(e) => Err(e),
    };
    (equivalence, soundness)
}

fn dp_value(g: &Graph, m: &CostModel) -> i64 {
    solve_instance(g, m, &PipelineOptions::default())
        .expect("solve")
        .0
        .optimum
}

fn small_graph<R: Rng>(r: &mut R, min_n: usize) -> Graph {
    let n = r.gen_range(min_n..=REDUCTION_MAX_N);
    loop {
        let g = generate::gnp(n, 0.5, r);
        if g.m() <= MAX_ORACLE_EDGES {
            return g;
        }
    }
}

fn factor_reduction() -> Result<String, String> {
    let mut r = rng(3);
    let mut yes = 0;
    for i in 0..FACTOR_COUNT {
        let g = small_graph(&mut r, 2);
        let sets = generate::random_degree_sets(g.n(), &mut r);
        let m = CostModel::from_factor(g.n(), &sets).map_err(|e| e.to_string())?;
        let zero = dp_value(&g, &m) == 0;
        let exists = oracle::factor_exists(&g, &sets).map_err(|e| e.to_string())?;
        if zero != exists {
            return Err(format!("pair {i}: optimum zero {zero}, factor exists {exists}"));
        }
        yes += usize::from(exists);
    }
    Ok(format!("{FACTOR_COUNT} pairs agree ({yes} with a factor)"))
}

fn cycle_matching() -> Result<String, String> {
    for n in 4..=12 {
        let c = generate::cycle(n).map_err(|e| e.to_string())?;
        let m = CostModel::from_b_matching(n, &vec![1; n]).map_err(|e| e.to_string())?;
        let got = dp_value(&c, &m);
        let want = (n % 2) as i64;
        if got != want {
            return Err(format!("C_{n}: optimum {got}, expected {want}"));
        }
    }
    Ok("C_4..C_12: 0 for even, 1 for odd".into())
}

fn cubic_min(g: &Graph) -> i64 {
    (0..g.n())
        .map(|i| dp_value(g, &CostModel::cubic_gadget(g.n(), i).expect("n ≥ 4")))
        .min()
        .expect("nonempty")
}

fn cubic_reduction() -> Result<String, String> {
    if cubic_min(&generate::complete(4)) != 0 {
        return Err("K_4 does not reach 0".into());
    }
    let mut r = rng(4);
    let mut yes = 0;
    for i in 0..CUBIC_COUNT {
        let g = small_graph(&mut r, 4);
        let zero = cubic_min(&g) == 0;
        let exists = oracle::cubic_subgraph_exists(&g).map_err(|e| e.to_string())?;
        if zero != exists {
            return Err(format!("graph {i}: min optimum zero {zero}, cubic subgraph {exists}"));
        }
        yes += usize::from(exists);
    }
    Ok(format!("K_4 gives 0; {CUBIC_COUNT} graphs agree ({yes} with a cubic subgraph)"))
}

fn check_decomposition(g: &Graph) -> Result<isize, String> {
    let (td, report) = min_fill_decompose(g);
    validate_td(g, &td).map_err(|v| format!("{v:?}"))?;
    let ntd = to_nice(&td, g).map_err(|e| e.to_string())?;
    validate_nice(g, &ntd, report.width.max(0) as usize).map_err(|v| format!("{v:?}"))?;
    Ok(report.width)
}

fn decomposition_validity() -> Result<String, String> {
    let mut r = rng(5);
    for i in 0..DECOMP_COUNT {
        let n = r.gen_range(1..=DECOMP_MAX_N);
        let g = generate::gnp(n, DECOMP_P, &mut r);
        check_decomposition(&g).map_err(|e| format!("random graph {i}: {e}"))?;
    }
    let mut ktrees = 0;
    for k in 1..=4usize {
        for n in (k + 2..=50).step_by(3) {
            let g = generate::ktree(n, k, &mut rng(n as u64 * 10 + k as u64)).map_err(|e| e.to_string())?;
            let w = check_decomposition(&g).map_err(|e| format!("{k}-tree n={n}: {e}"))?;
            if w != k as isize {
                return Err(format!("{k}-tree n={n}: width {w}"));
            }
            ktrees += 1;
        }
    }
    Ok(format!("{DECOMP_COUNT} random graphs valid; {ktrees} k-trees (k ≤ 4, n ≤ 50) valid with width k"))
}

/// Per-node and total state counts stay within `Π (cap_i + 1) · 2^{|E(H[bag])|}`.
fn within_bound(g: &Graph, m: &CostModel) -> Result<(u128, u128), String> {
    let (td, _) = min_fill_decompose(g);
    let ntd = to_nice(&td, g).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        retain_tables: false,
        ..SolveOptions::default()
    };
    let (_, tables) = dp::solve(g, m, &ntd, opts).map_err(|e| e.to_string())?;
    let report = tables.state_count_report();
    if let Some(c) = report.nodes.iter().find(|c| c.states as u128 > c.bound) {
        return Err(format!("node {} holds {} states, bound {}", c.node, c.states, c.bound));
    }
    if report.total_states > report.total_bound {
        return Err(format!("total {} above bound {}", report.total_states, report.total_bound));
    }
    Ok((report.total_states, report.total_bound))
}

fn path_scaling() -> Result<String, String> {
    let g = generate::path(PATH_N);
    let m = generate::random_costs(PATH_N, -9, 9, &mut rng(6));
    let start = Instant::now();
    let (r, sol) = solve_instance(&g, &m, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    sound(&g, &m, &sol, r.optimum)?;
    let (states, bound) = within_bound(&g, &m)?;
    let detail = format!("P_{PATH_N} in {} (limit {}); states {states} ≤ {bound}", secs(took), secs(PATH_LIMIT));
    if took < PATH_LIMIT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn two_tree_scaling() -> Result<String, String> {
    let mut slowest = Duration::ZERO;
    for seed in 0..TWO_TREE_SEEDS {
        let g = generate::ktree(TWO_TREE_N, 2, &mut rng(seed)).map_err(|e| e.to_string())?;
        let m = generate::random_costs(TWO_TREE_N, -9, 9, &mut rng(seed + 100));
        let start = Instant::now();
        let (r, sol) = solve_instance(&g, &m, &PipelineOptions::default()).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        sound(&g, &m, &sol, r.optimum)?;
        within_bound(&g, &m).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    let detail = format!(
        "{TWO_TREE_SEEDS} 2-trees n={TWO_TREE_N}, slowest {} (limit {}); states within bound",
        secs(slowest),
        secs(TWO_TREE_LIMIT)
    );
    if slowest < TWO_TREE_LIMIT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn state_bound_everywhere() -> Result<String, String> {
    let mut runs = 0;
    let cfg = CrosscheckConfig {
        count: 100,
        ..CrosscheckConfig::default()
    };
    for (g, m) in random_instances(&cfg) {
        within_bound(&g, &m)?;
        runs += 1;
    }
    for k in 1..=3 {
        let g = generate::ktree(20, k, &mut rng(k as u64)).map_err(|e| e.to_string())?;
        let m = generate::random_costs(20, -9, 9, &mut rng(k as u64));
        within_bound(&g, &m)?;
        runs += 1;
    }
    Ok(format!("{runs} further runs within the per-node and total bound"))
}

/// Every command run twice with the same inputs gives identical stdout and
/// identical emitted files.
fn determinism() -> Result<String, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let run = |args: &[String]| -> Result<Vec<u8>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_degseq"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("{args:?} exited {:?}", o.status.code()));
        }
        Ok(o.stdout)
    };
    let sv = |xs: &[&str]| -> Vec<String> { xs.iter().map(|s| s.to_string()).collect() };

    let graph = run(&sv(&["gen", "--kind", "ktree", "-n", "30", "-k", "3", "--seed", "9", "--emit-costs", &p("g.costs")]))?;
    fs::write(p("g.gr"), &graph).map_err(|e| e.to_string())?;
    let small = run(&sv(&["gen", "--kind", "random", "-n", "8", "--seed", "9", "--emit-costs", &p("s.costs")]))?;
    fs::write(p("s.gr"), &small).map_err(|e| e.to_string())?;
    let td = run(&sv(&["decompose", "--graph", &p("g.gr")]))?;
    fs::write(p("g.td"), &td).map_err(|e| e.to_string())?;

    let commands: Vec<(Vec<String>, Option<String>)> = vec![
        (sv(&["gen", "--kind", "series-parallel", "-n", "40", "--seed", "3", "--emit-costs", &p("sp.costs")]), Some(p("sp.costs"))),
        (sv(&["solve", "--graph", &p("g.gr"), "--costs", &p("g.costs"), "--emit-solution", &p("g.sol")]), Some(p("g.sol"))),
        (sv(&["solve", "--graph", &p("s.gr"), "--costs", &p("s.costs"), "--check-oracle", "--td", &p("g.td")]), None),
        (sv(&["decompose", "--graph", &p("g.gr"), "--nice"]), None),
        (sv(&["validate-td", "--graph", &p("g.gr"), "--td", &p("g.td")]), None),
        (sv(&["oracle", "--graph", &p("s.gr"), "--costs", &p("s.costs"), "--emit-solution", &p("s.sol")]), Some(p("s.sol"))),
        (sv(&["crosscheck", "--count", "40", "--seed", "7"]), None),
        (sv(&["bench", "--kind", "ktree", "--sizes", "20,40", "-k", "2", "--seed", "5", "--no-timings"]), None),
    ];
    let read = |f: &Option<String>| f.as_ref().map(|f| fs::read(Path::new(f)).unwrap_or_default());
    let mut checked = 0;
    for (args, file) in &commands {
        // The --td here belongs to another graph; that run must fail identically.
        if args.iter().any(|a| a.ends_with("g.td")) && args.iter().any(|a| a.ends_with("s.gr")) {
            let twice: Vec<_> = (0..2)
                .map(|_| {
                    Command::new(env!("CARGO_BIN_EXE_degseq"))
                        .args(args)
                        .output()
                        .map(|o| (o.status.code(), o.stdout, o.stderr))
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            if twice[0] != twice[1] {
                return Err(format!("{args:?} differs between runs"));
            }
            checked += 1;
            continue;
        }
        let first = (run(args)?, read(file));
        let second = (run(args)?, read(file));
        if first != second {
            return Err(format!("{} differs between runs", args[0]));
        }
        checked += 1;
    }
    Ok(format!("{checked} command runs byte-identical across repeats"))
}

fn main() {
    let mut gate = Gate { failed: 0 };
    let (global, global_sound) = global_suite();
    gate.check("global oracle equivalence", global);
    let (state, state_sound) = state_suite();
    gate.check("state-level equivalence", state);
    gate.check("reconstruction soundness (global)", global_sound);
    gate.check("reconstruction soundness (state)", state_sound);
    gate.check("reduction: general factor", factor_reduction());
    gate.check("reduction: perfect matching cycles", cycle_matching());
    gate.check("reduction: cubic gadget", cubic_reduction());
    gate.check("decomposition validity", decomposition_validity());
    gate.check("scaling: path", path_scaling());
    gate.check("scaling: 2-trees", two_tree_scaling());
    gate.check("scaling: state bound", state_bound_everywhere());
    gate.check("determinism", determinism());
    if gate.failed > 0 {
        println!("{} criteria failed", gate.failed);
        exit(1);
    }
    println!("all criteria passed");
}
