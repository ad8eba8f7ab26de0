//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes the same text formats as the command-line tool and
//! returns JSON. The inner functions are plain Rust so they can be tested
//! natively.

use degseq_core::generate::{self, GenParams, GraphKind};
use degseq_core::{io, min_fill_decompose, solve_instance, to_nice, NodeKind, PipelineOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
struct SolveView {
    optimum: i64,
    /// 1-based endpoints.
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    width: isize,
    nice_nodes: usize,
    total_states: String,
    state_bound: String,
}

#[derive(Debug, Serialize)]
struct NiceView {
    kind: &'static str,
    vertex: Option<usize>,
    bag: Vec<usize>,
    children: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct DecomposeView {
    width: isize,
    td: String,
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
    nice: Vec<NiceView>,
}

#[derive(Debug, Serialize)]
struct InstanceView {
    graph: String,
    costs: String,
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Solves the instance and reports the optimum with the chosen edges.
pub fn solve_text(graph: &str, costs: &str, max_width: Option<usize>) -> Result<String, String> {
    let g = io::parse_graph(graph).map_err(|e| format!("graph: {e}"))?;
    let m = io::parse_costs(costs, g.n()).map_err(|e| format!("costs: {e}"))?;
    let opts = PipelineOptions {
        max_width,
        ..Default::default()
    };
    let (r, _) = solve_instance(&g, &m, &opts).map_err(|e| e.to_string())?;
    json(&SolveView {
        optimum: r.optimum,
        edges: r.edges,
        degrees: r.degrees,
        width: r.width,
        nice_nodes: r.nice_nodes,
        // u128 does not fit a JS number.
        total_states: r.total_states.to_string(),
        state_bound: r.state_bound.to_string(),
    })
}

/// Min-fill decomposition, its `.td` text, and the nice form node by node.
pub fn decompose_text(graph: &str) -> Result<String, String> {
    let g = io::parse_graph(graph).map_err(|e| format!("graph: {e}"))?;
    let (td, report) = min_fill_decompose(&g);
    let ntd = to_nice(&td, &g).map_err(|e| e.to_string())?;
    let one = |xs: &[usize]| xs.iter().map(|x| x + 1).collect::<Vec<_>>();
    let nice = ntd
        .nodes()
        .iter()
        .map(|node| {
            let (kind, vertex) = match node.kind {
                NodeKind::Leaf => ("leaf", None),
                NodeKind::Introduce(x) => ("introduce", Some(x + 1)),
                NodeKind::Forget(x) => ("forget", Some(x + 1)),
                NodeKind::Join => ("join", None),
            };
            NiceView {
                kind,
                vertex,
                bag: one(&node.bag),
                children: one(&node.children),
            }
        })
        .collect();
    json(&DecomposeView {
        width: report.width,
        td: io::write_td(&td, g.n()),
        bags: td.bags().iter().map(|b| one(b)).collect(),
        tree_edges: td.tree_edges().iter().map(|&(a, b)| (a + 1, b + 1)).collect(),
        nice,
    })
}

/// A generated graph with random costs in −9..=9, both as file text.
pub fn generate_text(kind: &str, n: usize, k: usize, seed: u64) -> Result<String, String> {
    let kind: GraphKind = kind.parse().map_err(|e: degseq_core::Error| e.to_string())?;
    let g = generate::generate(&GenParams {
        kind,
        n,
        k,
        p: 0.4,
        seed,
    })
    .map_err(|e| e.to_string())?;
    let m = generate::random_costs(g.n(), -9, 9, &mut generate::rng(seed));
    json(&InstanceView {
        graph: io::write_graph(&g),
        costs: io::write_costs(&m),
    })
}

#[wasm_bindgen]
pub fn solve(graph: &str, costs: &str, max_width: Option<u32>) -> Result<String, JsValue> {
    solve_text(graph, costs, max_width.map(|w| w as usize)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn decompose(graph: &str) -> Result<String, JsValue> {
    decompose_text(graph).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn generate(kind: &str, n: u32, k: u32, seed: u32) -> Result<String, JsValue> {
    generate_text(kind, n as usize, k as usize, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_triangle() {
        let out = solve_text("p tw 3 3\n1 2\n2 3\n1 3\n", "default table 0 -1 -2\n", None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["optimum"], -6);
        assert_eq!(v["edges"].as_array().unwrap().len(), 3);
        assert_eq!(v["width"], 2);
    }

    #[test]
    fn errors_are_messages() {
        let e = solve_text("p tw 2 1\n1 1\n", "default table 0 0\n", None).unwrap_err();
        assert!(e.starts_with("graph: "));
        let e = solve_text("p tw 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n", "default table 0 0 0 0\n", Some(2)).unwrap_err();
        assert!(e.contains("exceeds limit 2"));
        assert!(generate_text("blob", 5, 2, 0).is_err());
    }

    #[test]
    fn decompose_cycle() {
        let out = decompose_text("p tw 5 5\n1 2\n2 3\n3 4\n4 5\n1 5\n").unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["width"], 2);
        assert!(v["td"].as_str().unwrap().starts_with("s td "));
        let nice = v["nice"].as_array().unwrap();
        assert_eq!(nice[0]["kind"], "leaf");
        assert_eq!(nice.last().unwrap()["bag"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn generated_instance_solves() {
        let out = generate_text("ktree", 12, 2, 5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let solved = solve_text(v["graph"].as_str().unwrap(), v["costs"].as_str().unwrap(), None).unwrap();
        assert!(solved.contains("\"width\":2"));
        // Same seed, same instance.
        assert_eq!(out, generate_text("ktree", 12, 2, 5).unwrap());
    }
}
