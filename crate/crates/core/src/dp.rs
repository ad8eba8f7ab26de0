//! Dynamic program over a nice tree decomposition.
//!
//! For every node `v` the table holds `g(v, c, F)`: the least cost
//! `Σ_{i ∈ I(T_v)} f_i(d_i(G))` over subgraphs `G ⊆ H[I(T_v)]` whose edges
//! inside the bag are exactly `F` and whose bag degrees are `c`. Infeasible
//! states are not stored.
//!
//! A state is packed into two integers. The degree vector is a mixed-radix
//! number over the bag (first bag vertex most significant, radix
//! `cap_i + 1`), so numeric order is lexicographic order on degree vectors.
//! `F` is a bitmask over the bag-induced edges of `H` in canonical order.

use std::collections::HashMap;

use serde::Serialize;

use crate::cost::{CostModel, ExtendedCost};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Subgraph};
use crate::treedecomp::{validate_nice, NiceDecomposition, NodeKind};

/// Upper bound on the degree a bag vertex may take in a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeCaps {
    /// `min(n − 1, deg_H(i))`.
    #[default]
    Local,
    /// `n − 1` for every vertex.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub caps: DegreeCaps,
    /// Keep every table for reconstruction and inspection. When false, a
    /// child's table is dropped as soon as its parent is built.
    pub retain_tables: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            caps: DegreeCaps::Local,
            retain_tables: true,
        }
    }
}

/// Bag vertices with their radices and induced edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLayout {
    bag: Vec<usize>,
    radix: Vec<u32>,
    place: Vec<u128>,
    edges: Vec<usize>,
}

impl NodeLayout {
    fn new(bag: &[usize], graph: &Graph, caps: &[u32]) -> Result<Self> {
        let edges = graph.induced_edge_ids(bag);
        if edges.len() > 64 {
            return Err(Error::StateSpace {
                bag: bag.len(),
                reason: "more than 64 edges inside one bag",
            });
        }
        let radix: Vec<u32> = bag.iter().map(|&x| caps[x] + 1).collect();
        let mut place = vec![1u128; bag.len()];
        let mut acc = 1u128;
        for p in (0..bag.len()).rev() {
            place[p] = acc;
            acc = acc
                .checked_mul(u128::from(radix[p]))
                .ok_or(Error::StateSpace {
                    bag: bag.len(),
                    reason: "degree vectors overflow 128 bits",
                })?;
        }
        Ok(NodeLayout {
            bag: bag.to_vec(),
            radix,
            place,
            edges,
        })
    }

    pub fn bag(&self) -> &[usize] {
        &self.bag
    }

    /// Global edge ids of `H[bag]`, ascending.
    pub fn edge_ids(&self) -> &[usize] {
        &self.edges
    }

    #[inline]
    fn digit(&self, key: u128, pos: usize) -> u32 {
        ((key / self.place[pos]) % u128::from(self.radix[pos])) as u32
    }

    fn digits(&self, key: u128) -> Vec<u32> {
        (0..self.bag.len()).map(|p| self.digit(key, p)).collect()
    }

    /// `Π (cap_i + 1) · 2^{|E(H[bag])|}`, saturating.
    pub fn state_bound(&self) -> u128 {
        let degrees = self
            .radix
            .iter()
            .fold(1u128, |acc, &r| acc.saturating_mul(u128::from(r)));
        degrees.saturating_mul(1u128 << self.edges.len())
    }

    fn position(&self, vertex: usize) -> Option<usize> {
        self.bag.binary_search(&vertex).ok()
    }

    fn encode(&self, graph: &Graph, state: &BagState) -> Option<(u128, u64)> {
        if state.bag != self.bag || state.degrees.len() != self.bag.len() {
            return None;
        }
        let mut key = 0u128;
        for (p, &d) in state.degrees.iter().enumerate() {
            if d >= self.radix[p] as usize {
                return None;
            }
            key += d as u128 * self.place[p];
        }
        let mut mask = 0u64;
        for e in &state.edges {
            let id = graph.edge_id(e.u, e.v)?;
            let bit = self.edges.binary_search(&id).ok()?;
            mask |= 1 << bit;
        }
        Some((key, mask))
    }
}

/// A decoded DP state: degrees aligned with the sorted bag, and the chosen
/// bag-induced edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BagState {
    pub bag: Vec<usize>,
    pub degrees: Vec<usize>,
    pub edges: Vec<Edge>,
}

/// How a stored state was reached; indices point into the child tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    LeafBase,
    /// `added` is the mask (in this node's edge bits) of `F_v \ F_u`.
    IntroduceFrom { child: u32, added: u64 },
    ForgetFrom { child: u32 },
    JoinFrom { left: u32, right: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub degrees: u128,
    pub edges: u64,
    pub value: i64,
    pub choice: Choice,
}

/// All finite states of one node, sorted by degree vector then edge mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTable {
    layout: NodeLayout,
    entries: Vec<Entry>,
}

impl StateTable {
    pub fn layout(&self) -> &NodeLayout {
        &self.layout
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn decode(&self, graph: &Graph, index: usize) -> BagState {
        let e = &self.entries[index];
        let degrees = self
            .layout
            .digits(e.degrees)
            .into_iter()
            .map(|d| d as usize)
            .collect();
        let edges = (0..self.layout.edges.len())
            .filter(|b| e.edges >> b & 1 == 1)
            .map(|b| graph.edge(self.layout.edges[b]))
            .collect();
        BagState {
            bag: self.layout.bag.clone(),
            degrees,
            edges,
        }
    }

    /// Every stored state with its value, in canonical order.
    pub fn states(&self, graph: &Graph) -> Vec<(BagState, i64)> {
        (0..self.entries.len())
            .map(|i| (self.decode(graph, i), self.entries[i].value))
            .collect()
    }

    /// `g(v, state)`; `Infinite` for states not stored.
    pub fn lookup(&self, graph: &Graph, state: &BagState) -> ExtendedCost {
        let Some(key) = self.layout.encode(graph, state) else {
            return ExtendedCost::Infinite;
        };
        match self
            .entries
            .binary_search_by(|e| (e.degrees, e.edges).cmp(&key))
        {
            Ok(i) => ExtendedCost::Finite(self.entries[i].value),
            Err(_) => ExtendedCost::Infinite,
        }
    }

    fn from_unsorted(layout: NodeLayout, mut entries: Vec<Entry>) -> Self {
        entries.sort_unstable_by_key(|e| (e.degrees, e.edges));
        StateTable { layout, entries }
    }
}

/// Instance data shared by the node handlers.
#[derive(Debug, Clone)]
pub struct Dp<'a> {
    graph: &'a Graph,
    model: &'a CostModel,
    caps: Vec<u32>,
}

impl<'a> Dp<'a> {
    pub fn new(graph: &'a Graph, model: &'a CostModel, caps: DegreeCaps) -> Result<Self> {
        if graph.n() != model.n() {
            return Err(Error::DimensionMismatch {
                graph: graph.n(),
                model: model.n(),
            });
        }
        let top = graph.n().saturating_sub(1);
        let caps = (0..graph.n())
            .map(|i| match caps {
                DegreeCaps::Local => graph.degree(i).min(top) as u32,
                DegreeCaps::Literal => top as u32,
            })
            .collect();
        Ok(Dp { graph, model, caps })
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn layout(&self, bag: &[usize]) -> Result<NodeLayout> {
        NodeLayout::new(bag, self.graph, &self.caps)
    }

    #[inline]
    fn f(&self, vertex: usize, degree: u32) -> i64 {
        self.model.cost(vertex, degree as usize)
    }

    /// Builds a table from explicit `(state, value)` pairs. Meant for
    /// exercising the handlers on hand-made child tables.
    pub fn table_from_states(&self, bag: &[usize], states: &[(BagState, i64)]) -> Result<StateTable> {
        let layout = self.layout(bag)?;
        let mut entries = Vec::with_capacity(states.len());
        for (s, value) in states {
            let (degrees, edges) = layout
                .encode(self.graph, s)
                .ok_or_else(|| Error::Params(format!("state {s:?} does not fit bag {bag:?}")))?;
            entries.push(Entry {
                degrees,
                edges,
                value: *value,
                choice: Choice::LeafBase,
            });
        }
        Ok(StateTable::from_unsorted(layout, entries))
    }

    /// The single state `(c_∅, ∅) ↦ 0`.
    pub fn handle_leaf(&self, bag: &[usize]) -> Result<StateTable> {
        if !bag.is_empty() {
            return Err(Error::InvalidNice("leaf with a nonempty bag".into()));
        }
        let layout = self.layout(bag)?;
        Ok(StateTable {
            layout,
            entries: vec![Entry {
                degrees: 0,
                edges: 0,
                value: 0,
                choice: Choice::LeafBase,
            }],
        })
    }

    /// Introduce `vertex` on top of `child`. Each child state extends by
    /// every subset `S` of the new bag edges at `vertex`:
    /// `c_v(vertex) = |S|`, `c_v(j) = c_u(j) + [j ∈ S]`, and the value
    /// changes by `f_vertex(|S|) + Σ_{j∈S} (f_j(c_u(j)+1) − f_j(c_u(j)))`.
    pub fn handle_introduce(&self, bag: &[usize], vertex: usize, child: &StateTable) -> Result<StateTable> {
        let cl = &child.layout;
        if cl.position(vertex).is_some()
            || bag.len() != cl.bag.len() + 1
            || !bag.iter().filter(|&&x| x != vertex).eq(cl.bag.iter())
        {
            return Err(Error::InvalidNice(format!(
                "introduce {} does not match child bag",
                vertex + 1
            )));
        }
        let layout = self.layout(bag)?;
        let pos = layout.position(vertex).expect("introduced vertex in bag");
        let scatter: Vec<u32> = cl
            .edges
            .iter()
            .map(|id| layout.edges.binary_search(id).expect("child edge in parent") as u32)
            .collect();
        // (parent bit, child position of the neighbour, parent position)
        let incident: Vec<(u32, usize, usize)> = layout
            .edges
            .iter()
            .enumerate()
            .filter_map(|(bit, &id)| {
                let e = self.graph.edge(id);
                e.contains(vertex).then(|| {
                    let j = e.other(vertex);
                    (bit as u32, cl.position(j).expect("neighbour in child bag"), layout.position(j).unwrap())
                })
            })
            .collect();
        let below: u128 = if pos < cl.bag.len() { cl.place[pos] * u128::from(cl.radix[pos]) } else { 1 };
        let lift = u128::from(layout.radix[pos]);

        let mut entries = Vec::with_capacity(child.len() << incident.len());
        let mut child_deg = vec![0u32; incident.len()];
        for (idx, ce) in child.entries.iter().enumerate() {
            let base_key = (ce.degrees / below) * below * lift + ce.degrees % below;
            let mut base_mask = 0u64;
            let mut rest = ce.edges;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                base_mask |= 1 << scatter[b];
                rest &= rest - 1;
            }
            for (t, &(_, cpos, _)) in incident.iter().enumerate() {
                child_deg[t] = cl.digit(ce.degrees, cpos);
            }
            'subsets: for s in 0u64..(1 << incident.len()) {
                let size = s.count_ones();
                if size >= layout.radix[pos] {
                    continue;
                }
                let mut key = base_key + u128::from(size) * layout.place[pos];
                let mut mask = base_mask;
                let mut value = ce.value + self.f(vertex, size);
                let mut bits = s;
                while bits != 0 {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let (bit, _, ppos) = incident[t];
                    let d = child_deg[t];
                    let j = layout.bag[ppos];
                    if d + 1 >= layout.radix[ppos] {
                        continue 'subsets;
                    }
                    key += layout.place[ppos];
                    mask |= 1 << bit;
                    value += self.f(j, d + 1) - self.f(j, d);
                }
                entries.push(Entry {
                    degrees: key,
                    edges: mask,
                    value,
                    choice: Choice::IntroduceFrom {
                        child: idx as u32,
                        added: mask & !base_mask,
                    },
                });
            }
        }
        Ok(StateTable::from_unsorted(layout, entries))
    }

    /// Forget `vertex`: minimise over its final degree and its bag edges.
    pub fn handle_forget(&self, bag: &[usize], vertex: usize, child: &StateTable) -> Result<StateTable> {
        let cl = &child.layout;
        let Some(pos) = cl.position(vertex) else {
            return Err(Error::InvalidNice(format!(
                "forget {} not in child bag",
                vertex + 1
            )));
        };
        if bag.len() + 1 != cl.bag.len() || !cl.bag.iter().filter(|&&x| x != vertex).eq(bag.iter()) {
            return Err(Error::InvalidNice(format!(
                "forget {} does not match child bag",
                vertex + 1
            )));
        }
        let layout = self.layout(bag)?;
        let gather: Vec<Option<u32>> = cl
            .edges
            .iter()
            .map(|id| layout.edges.binary_search(id).ok().map(|b| b as u32))
            .collect();
        let below = cl.place[pos];
        let span = below * u128::from(cl.radix[pos]);

        let mut best: HashMap<(u128, u64), (i64, u32)> = HashMap::with_capacity(child.len());
        for (idx, ce) in child.entries.iter().enumerate() {
            let key = (ce.degrees / span) * below + ce.degrees % below;
            let mut mask = 0u64;
            let mut rest = ce.edges;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                if let Some(pb) = gather[b] {
                    mask |= 1 << pb;
                }
                rest &= rest - 1;
            }
            // Child entries are visited in canonical order, so the first
            // minimum seen is kept.
            best.entry((key, mask))
                .and_modify(|slot| {
                    if ce.value < slot.0 {
                        *slot = (ce.value, idx as u32);
                    }
                })
                .or_insert((ce.value, idx as u32));
        }
        let entries = best
            .into_iter()
            .map(|((degrees, edges), (value, child))| Entry {
                degrees,
                edges,
                value,
                choice: Choice::ForgetFrom { child },
            })
            .collect();
        Ok(StateTable::from_unsorted(layout, entries))
    }

    /// Join two tables over the same bag: pair states with disjoint edge
    /// sets and add their degree vectors.
    pub fn handle_join(&self, bag: &[usize], left: &StateTable, right: &StateTable) -> Result<StateTable> {
        if left.layout.bag != bag || right.layout.bag != bag {
            return Err(Error::InvalidNice("join children bags differ".into()));
        }
        let layout = self.layout(bag)?;
        if left.layout != layout || right.layout != layout {
            return Err(Error::InvalidNice("join children use a different layout".into()));
        }
        let width = bag.len();
        // f_{bag[p]}(d) at offset[p] + d.
        let mut offset = Vec::with_capacity(width);
        let mut fcost = Vec::new();
        for (p, &x) in bag.iter().enumerate() {
            offset.push(fcost.len());
            fcost.extend((0..layout.radix[p]).map(|d| self.f(x, d)));
        }
        let digits = |t: &StateTable| -> Vec<u32> {
            t.entries.iter().flat_map(|e| t.layout.digits(e.degrees)).collect()
        };
        let ld = digits(left);
        let rd = digits(right);
        // f at each child's own degrees, summed over the bag.
        let own = |d: &[u32]| -> Vec<i64> {
            d.chunks(width.max(1))
                .map(|c| c.iter().enumerate().map(|(p, &x)| fcost[offset[p] + x as usize]).sum())
                .collect()
        };
        let (lf, rf) = if width == 0 {
            (vec![0; left.len()], vec![0; right.len()])
        } else {
            (own(&ld), own(&rd))
        };

        // Pairs of mask groups with disjoint masks, bucketed by their union.
        let lg = group_by_mask(left);
        let rg = group_by_mask(right);
        let mut by_union: HashMap<u64, Vec<(usize, usize)>> = HashMap::new();
        for (a, (am, _)) in lg.iter().enumerate() {
            for (b, (bm, _)) in rg.iter().enumerate() {
                if am & bm == 0 {
                    by_union.entry(am | bm).or_default().push((a, b));
                }
            }
        }

        let degree_space = layout.place.first().map_or(1, |&pl| pl * u128::from(layout.radix[0]));
        let mut slots = DegreeSlots::new(degree_space);
        let mut entries = Vec::new();
        for (edges, pairs) in by_union {
            for (a, b) in pairs {
                for &li in &lg[a].1 {
                    let li = li as usize;
                    let l_digits = &ld[li * width..(li + 1) * width];
                    let le = &left.entries[li];
                    let base = le.value - lf[li];
                    'pairs: for &ri in &rg[b].1 {
                        let ri = ri as usize;
                        let r_digits = &rd[ri * width..(ri + 1) * width];
                        let mut joint = 0i64;
                        for p in 0..width {
                            let d = l_digits[p] + r_digits[p];
                            if d >= layout.radix[p] {
                                continue 'pairs;
                            }
                            joint += fcost[offset[p] + d as usize];
                        }
                        let re = &right.entries[ri];
                        let value = base + re.value + joint - rf[ri];
                        slots.offer(le.degrees + re.degrees, (value, li as u32, ri as u32));
                    }
                }
            }
            slots.drain(|degrees, (value, l, r)| {
                entries.push(Entry {
                    degrees,
                    edges,
                    value,
                    choice: Choice::JoinFrom { left: l, right: r },
                })
            });
        }
        Ok(StateTable::from_unsorted(layout, entries))
    }
}

fn group_by_mask(t: &StateTable) -> Vec<(u64, Vec<u32>)> {
    let mut groups: Vec<(u64, Vec<u32>)> = Vec::new();
    let mut by_mask: HashMap<u64, usize> = HashMap::new();
    for (i, e) in t.entries.iter().enumerate() {
        let g = *by_mask.entry(e.edges).or_insert_with(|| {
            groups.push((e.edges, Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push(i as u32);
    }
    groups
}

/// Best `(value, left, right)` per degree key for one edge mask. Dense when
/// the degree space is small, hashed otherwise.
enum DegreeSlots {
    Dense {
        slots: Vec<(i64, u32, u32)>,
        touched: Vec<u32>,
    },
    Sparse(HashMap<u128, (i64, u32, u32)>),
}

const DENSE_DEGREE_SPACE: u128 = 1 << 20;
const EMPTY_SLOT: (i64, u32, u32) = (i64::MAX, u32::MAX, u32::MAX);

impl DegreeSlots {
    fn new(space: u128) -> Self {
        if space <= DENSE_DEGREE_SPACE {
            DegreeSlots::Dense {
                slots: vec![EMPTY_SLOT; space as usize],
                touched: Vec::new(),
            }
        } else {
            DegreeSlots::Sparse(HashMap::new())
        }
    }

    #[inline]
    fn offer(&mut self, key: u128, cand: (i64, u32, u32)) {
        match self {
            DegreeSlots::Dense { slots, touched } => {
                let slot = &mut slots[key as usize];
                if *slot == EMPTY_SLOT {
                    touched.push(key as u32);
                    *slot = cand;
                } else if cand < *slot {
                    *slot = cand;
                }
            }
            DegreeSlots::Sparse(map) => {
                map.entry(key)
                    .and_modify(|slot| {
                        if cand < *slot {
                            *slot = cand;
                        }
                    })
                    .or_insert(cand);
            }
        }
    }

    fn drain(&mut self, mut emit: impl FnMut(u128, (i64, u32, u32))) {
        match self {
            DegreeSlots::Dense { slots, touched } => {
                for k in touched.drain(..) {
                    emit(u128::from(k), std::mem::replace(&mut slots[k as usize], EMPTY_SLOT));
                }
            }
            DegreeSlots::Sparse(map) => {
                for (k, v) in map.drain() {
                    emit(k, v);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeCount {
    pub node: usize,
    pub kind: NodeKind,
    pub bag_size: usize,
    pub bag_edges: usize,
    pub states: usize,
    /// `Π (cap_i + 1) · 2^{|E(H[bag])|}`, saturating.
    pub bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateCountReport {
    pub nodes: Vec<NodeCount>,
    pub total_states: u128,
    pub total_bound: u128,
    pub max_states: usize,
}

/// Result of a DP run: per-node tables (when retained) and counts.
#[derive(Debug, Clone)]
pub struct DpTables {
    tables: Vec<Option<StateTable>>,
    counts: Vec<NodeCount>,
    root: usize,
}

impl DpTables {
    pub fn table(&self, node: usize) -> Option<&StateTable> {
        self.tables[node].as_ref()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn state_count_report(&self) -> StateCountReport {
        StateCountReport {
            nodes: self.counts.clone(),
            total_states: self.counts.iter().map(|c| c.states as u128).sum(),
            total_bound: self
                .counts
                .iter()
                .fold(0u128, |acc, c| acc.saturating_add(c.bound)),
            max_states: self.counts.iter().map(|c| c.states).max().unwrap_or(0),
        }
    }
}

/// Runs the DP bottom-up and returns `g(root, c_∅, ∅)`.
pub fn solve(
    graph: &Graph,
    model: &CostModel,
    ntd: &NiceDecomposition,
    opts: SolveOptions,
) -> Result<(ExtendedCost, DpTables)> {
    let dp = Dp::new(graph, model, opts.caps)?;
    if let Err(v) = validate_nice(graph, ntd, usize::MAX) {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidNice(msg.join("; ")));
    }
    solve_with(&dp, ntd, opts.retain_tables)
}

/// Like [`solve`] but with a prepared handler context and no validation.
pub fn solve_with(dp: &Dp<'_>, ntd: &NiceDecomposition, retain: bool) -> Result<(ExtendedCost, DpTables)> {
    let nodes = ntd.nodes();
    let mut tables: Vec<Option<StateTable>> = vec![None; nodes.len()];
    let mut counts = Vec::with_capacity(nodes.len());
    for (id, node) in nodes.iter().enumerate() {
        let child = |i: usize| -> Result<&StateTable> {
            tables[node.children[i]]
                .as_ref()
                .ok_or_else(|| Error::Internal(format!("child table of node {id} missing")))
        };
        let table = match node.kind {
            NodeKind::Leaf => dp.handle_leaf(&node.bag)?,
            NodeKind::Introduce(x) => dp.handle_introduce(&node.bag, x, child(0)?)?,
            NodeKind::Forget(x) => dp.handle_forget(&node.bag, x, child(0)?)?,
            NodeKind::Join => dp.handle_join(&node.bag, child(0)?, child(1)?)?,
        };
        counts.push(NodeCount {
            node: id,
            kind: node.kind,
            bag_size: node.bag.len(),
            bag_edges: table.layout.edges.len(),
            states: table.len(),
            bound: table.layout.state_bound(),
        });
        if !retain {
            for &c in &node.children {
                tables[c] = None;
            }
        }
        tables[id] = Some(table);
    }
    let root = ntd.root();
    let root_table = tables[root]
        .as_ref()
        .ok_or_else(|| Error::Internal("root table missing".into()))?;
    let optimum = match root_table.entries.as_slice() {
        [only] if only.degrees == 0 && only.edges == 0 => ExtendedCost::Finite(only.value),
        other => {
            return Err(Error::Internal(format!(
                "root table holds {} states, expected exactly one",
                other.len()
            )))
        }
    };
    Ok((optimum, DpTables { tables, counts, root }))
}

/// Follows the stored choices down from the root state and collects the
/// edges added at introduce nodes.
pub fn reconstruct<'g>(graph: &'g Graph, tables: &DpTables, ntd: &NiceDecomposition) -> Result<Subgraph<'g>> {
    let missing = |node: usize| Error::Internal(format!("table of node {node} was not retained"));
    let dangling = |node: usize| Error::Internal(format!("dangling choice link at node {node}"));
    let mut chosen = Vec::new();
    let mut stack = vec![(tables.root, 0usize)];
    while let Some((node, index)) = stack.pop() {
        let table = tables.tables[node].as_ref().ok_or_else(|| missing(node))?;
        let entry = table.entries.get(index).ok_or_else(|| dangling(node))?;
        let children = &ntd.node(node).children;
        match entry.choice {
            Choice::LeafBase => {}
            Choice::IntroduceFrom { child, added } => {
                let mut rest = added;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    chosen.push(table.layout.edges[b]);
                    rest &= rest - 1;
                }
                stack.push((*children.first().ok_or_else(|| dangling(node))?, child as usize));
            }
            Choice::ForgetFrom { child } => {
                stack.push((*children.first().ok_or_else(|| dangling(node))?, child as usize));
            }
            Choice::JoinFrom { left, right } => {
                if children.len() != 2 {
                    return Err(dangling(node));
                }
                stack.push((children[0], left as usize));
                stack.push((children[1], right as usize));
            }
        }
    }
    let count = chosen.len();
    let sub = Subgraph::from_edge_ids(graph, chosen)?;
    if sub.len() != count {
        return Err(Error::Internal("an edge was introduced twice".into()));
    }
    Ok(sub)
}
