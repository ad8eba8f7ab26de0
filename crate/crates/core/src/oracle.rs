//! Exhaustive reference solvers for small instances.

use std::collections::BTreeMap;

use crate::cost::{CostModel, ExtendedCost};
use crate::dp::BagState;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Subgraph};
use crate::treedecomp::NiceDecomposition;

/// Edge limit for whole-graph enumeration.
pub const MAX_ORACLE_EDGES: usize = 25;
/// Edge limit for enumeration inside a cone `H[I(T_v)]`.
pub const MAX_STATE_EDGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: ExtendedCost,
    /// Host edge ids of the first optimal subset in enumeration order.
    pub witness: Vec<usize>,
}

fn guard(edges: usize, limit: usize) -> Result<()> {
    if edges > limit {
        Err(Error::OracleGuard { edges, limit })
    } else {
        Ok(())
    }
}

/// Visits every subset of `m` edges in Gray-code order, keeping the degree
/// vector current. `visit` receives the subset mask, the degrees, and the
/// edge just flipped with whether it was added.
fn for_each_subset(n: usize, edges: &[Edge], mut visit: impl FnMut(u64, &[usize], Option<(Edge, bool)>)) {
    let m = edges.len();
    let mut deg = vec![0usize; n];
    let mut mask = 0u64;
    visit(mask, &deg, None);
    for step in 1u64..(1u64 << m) {
        let bit = step.trailing_zeros() as usize;
        let e = edges[bit];
        mask ^= 1 << bit;
        let added = mask >> bit & 1 == 1;
        if added {
            deg[e.u] += 1;
            deg[e.v] += 1;
        } else {
            deg[e.u] -= 1;
            deg[e.v] -= 1;
        }
        visit(mask, &deg, Some((e, added)));
    }
}

/// Minimum of `Σ f_i(d_i(G))` over all `2^|E|` subgraphs. Ties go to the
/// numerically smallest edge-subset mask.
pub fn brute_force_solve(graph: &Graph, model: &CostModel) -> Result<OracleResult> {
    guard(graph.m(), MAX_ORACLE_EDGES)?;
    if graph.n() != model.n() {
        return Err(Error::DimensionMismatch {
            graph: graph.n(),
            model: model.n(),
        });
    }
    let mut total: i64 = (0..graph.n()).map(|i| model.cost(i, 0)).sum();
    let mut prev = vec![0usize; graph.n()];
    let mut best = (i64::MAX, u64::MAX);
    for_each_subset(graph.n(), graph.edges(), |mask, deg, flipped| {
        if let Some((e, _)) = flipped {
            for x in [e.u, e.v] {
                total += model.cost(x, deg[x]) - model.cost(x, prev[x]);
                prev[x] = deg[x];
            }
        }
        if (total, mask) < best {
            best = (total, mask);
        }
    });
    let witness = (0..graph.m()).filter(|b| best.1 >> b & 1 == 1).collect();
    Ok(OracleResult {
        optimum: ExtendedCost::Finite(best.0),
        witness,
    })
}

/// Every feasible state of node `v` with its exact value, found by
/// enumerating all subgraphs of `H[I(T_v)]`.
pub fn brute_force_node_states(
    graph: &Graph,
    ntd: &NiceDecomposition,
    v: usize,
    model: &CostModel,
) -> Result<BTreeMap<BagState, i64>> {
    let cone = ntd.cone(v);
    let bag = ntd.node(v).bag.clone();
    let ids = graph.induced_edge_ids(&cone);
    guard(ids.len(), MAX_STATE_EDGES)?;
    let edges: Vec<Edge> = ids.iter().map(|&id| graph.edge(id)).collect();
    let bag_edge_bits: Vec<usize> = (0..edges.len())
        .filter(|&b| bag.contains(&edges[b].u) && bag.contains(&edges[b].v))
        .collect();
    let mut out: BTreeMap<BagState, i64> = BTreeMap::new();
    for_each_subset(graph.n(), &edges, |mask, deg, _| {
        let value: i64 = cone.iter().map(|&i| model.cost(i, deg[i])).sum();
        let s = BagState {
            bag: bag.clone(),
            degrees: bag.iter().map(|&i| deg[i]).collect(),
            edges: bag_edge_bits
                .iter()
                .filter(|&&b| mask >> b & 1 == 1)
                .map(|&b| edges[b])
                .collect(),
        };
        out.entry(s)
            .and_modify(|x| *x = (*x).min(value))
            .or_insert(value);
    });
    Ok(out)
}

/// `g(v, state)` by constrained enumeration; `Infinite` when no subgraph
/// of `H[I(T_v)]` has the required bag edges and bag degrees.
pub fn brute_force_state(
    graph: &Graph,
    ntd: &NiceDecomposition,
    v: usize,
    state: &BagState,
    model: &CostModel,
) -> Result<ExtendedCost> {
    let cone = ntd.cone(v);
    let ids = graph.induced_edge_ids(&cone);
    guard(ids.len(), MAX_STATE_EDGES)?;
    if state.bag != ntd.node(v).bag || state.degrees.len() != state.bag.len() {
        return Ok(ExtendedCost::Infinite);
    }
    let bag = &state.bag;
    let edges: Vec<Edge> = ids.iter().map(|&id| graph.edge(id)).collect();
    let mut want = 0u64;
    let mut bag_mask = 0u64;
    for (b, e) in edges.iter().enumerate() {
        if bag.contains(&e.u) && bag.contains(&e.v) {
            bag_mask |= 1 << b;
            if state.edges.contains(e) {
                want |= 1 << b;
            }
        }
    }
    if state.edges.iter().any(|e| !edges.contains(e)) {
        return Ok(ExtendedCost::Infinite);
    }
    let mut best = ExtendedCost::Infinite;
    for_each_subset(graph.n(), &edges, |mask, deg, _| {
        if mask & bag_mask != want {
            return;
        }
        if bag.iter().zip(&state.degrees).any(|(&i, &d)| deg[i] != d) {
            return;
        }
        let value: i64 = cone.iter().map(|&i| model.cost(i, deg[i])).sum();
        best = best.min(ExtendedCost::Finite(value));
    });
    Ok(best)
}

/// True iff some nonempty edge subset has every degree in `{0, 3}`.
pub fn cubic_subgraph_exists(graph: &Graph) -> Result<bool> {
    guard(graph.m(), MAX_ORACLE_EDGES)?;
    let mut found = false;
    let mut bad = 0usize;
    for_each_subset(graph.n(), graph.edges(), |mask, deg, flipped| {
        if let Some((e, added)) = flipped {
            // Count of vertices with degree outside {0, 3}; only e's ends moved.
            for x in [e.u, e.v] {
                let now = deg[x];
                let before = if added { now - 1 } else { now + 1 };
                bad -= usize::from(before != 0 && before != 3);
                bad += usize::from(now != 0 && now != 3);
            }
        }
        if mask != 0 && bad == 0 {
            found = true;
        }
    });
    Ok(found)
}

/// True iff some edge subset has `d_i ∈ sets[i]` for every vertex. Checks
/// set membership directly, without going through cost tables.
pub fn factor_exists(graph: &Graph, sets: &[Vec<usize>]) -> Result<bool> {
    guard(graph.m(), MAX_ORACLE_EDGES)?;
    if sets.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            graph: graph.n(),
            model: sets.len(),
        });
    }
    let mut found = false;
    for_each_subset(graph.n(), graph.edges(), |_, deg, _| {
        if !found && deg.iter().zip(sets).all(|(d, b)| b.contains(d)) {
            found = true;
        }
    });
    Ok(found)
}

/// The witness as a subgraph of the host.
pub fn witness_subgraph<'g>(graph: &'g Graph, result: &OracleResult) -> Result<Subgraph<'g>> {
    Subgraph::from_edge_ids(graph, result.witness.iter().copied())
}
