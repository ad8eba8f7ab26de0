//! Tree decompositions: validation, min-fill construction, and conversion to
//! nice form with empty root and leaf bags.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// An unrooted tree decomposition. Bag `0` is used as the root when rooting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated; tree edges are stored as given.
    pub fn new(bags: Vec<Vec<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, tree_edges }
    }

    /// One bag holding every vertex.
    pub fn trivial(n: usize) -> Self {
        TreeDecomposition::new(vec![(0..n).collect()], Vec::new())
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Max bag size minus one; `-1` when every bag is empty.
    pub fn width(&self) -> isize {
        self.max_bag_size() as isize - 1
    }

    pub fn width_report(&self) -> WidthReport {
        let mut histogram = vec![0; self.max_bag_size() + 1];
        for b in &self.bags {
            histogram[b.len()] += 1;
        }
        WidthReport {
            width: self.width(),
            histogram,
            nodes: self.bags.len(),
        }
    }

    /// Adjacency lists of the decomposition tree, or `None` if the edges do
    /// not form a tree over the bags.
    fn tree_adjacency(&self) -> Option<Vec<Vec<usize>>> {
        let k = self.bags.len();
        if k == 0 {
            return self.tree_edges.is_empty().then(Vec::new);
        }
        if self.tree_edges.len() != k - 1 {
            return None;
        }
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in &self.tree_edges {
            if a >= k || b >= k || a == b {
                return None;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        (count == k).then_some(adj)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidthReport {
    pub width: isize,
    /// `histogram[s]` counts bags of size `s`.
    pub histogram: Vec<usize>,
    pub nodes: usize,
}

/// A broken decomposition axiom. Ids are 0-based; `Display` prints 1-based
/// vertex and bag ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    NotATree,
    BagVertexOutOfRange { bag: usize, vertex: usize },
    VertexUncovered(usize),
    EdgeUncovered(Edge),
    /// The bags holding this vertex do not form a connected subtree.
    Disconnected(usize),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::NotATree => f.write_str("not a tree"),
            TdViolation::BagVertexOutOfRange { bag, vertex } => {
                write!(f, "bag {} holds out-of-range vertex {}", bag + 1, vertex + 1)
            }
            TdViolation::VertexUncovered(v) => write!(f, "vertex {} in no bag", v + 1),
            TdViolation::EdgeUncovered(e) => write!(f, "edge {e} uncovered"),
            TdViolation::Disconnected(v) => {
                write!(f, "bags containing vertex {} are not connected", v + 1)
            }
        }
    }
}

/// Checks coverage of vertices and edges and the connectivity axiom.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> std::result::Result<(), Vec<TdViolation>> {
    let mut violations = Vec::new();
    let adj = td.tree_adjacency();
    if adj.is_none() {
        violations.push(TdViolation::NotATree);
    }
    let n = g.n();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, bag) in td.bags.iter().enumerate() {
        for &x in bag {
            if x >= n {
                violations.push(TdViolation::BagVertexOutOfRange { bag: b, vertex: x });
            } else {
                holders[x].push(b);
            }
        }
    }
    for (v, h) in holders.iter().enumerate() {
        if h.is_empty() {
            violations.push(TdViolation::VertexUncovered(v));
        }
    }
    for e in g.edges() {
        let covered = holders[e.u]
            .iter()
            .any(|&b| td.bags[b].binary_search(&e.v).is_ok());
        if !covered {
            violations.push(TdViolation::EdgeUncovered(*e));
        }
    }
    if let Some(adj) = adj {
        // In a tree, a vertex's bags are connected iff they span exactly
        // (#bags − 1) tree edges.
        let mut inner_edges = vec![0usize; n];
        for (a, list) in adj.iter().enumerate() {
            for &b in list.iter().filter(|&&b| b > a) {
                for x in intersect(&td.bags[a], &td.bags[b]) {
                    if x < n {
                        inner_edges[x] += 1;
                    }
                }
            }
        }
        for v in 0..n {
            if !holders[v].is_empty() && inner_edges[v] + 1 != holders[v].len() {
                violations.push(TdViolation::Disconnected(v));
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Min-fill elimination. Ties go to the smallest vertex id. Bags are listed
/// in reverse elimination order, so bag `0` belongs to the last vertex
/// eliminated and serves as the root.
pub fn min_fill_decompose(g: &Graph) -> (TreeDecomposition, WidthReport) {
    let n = g.n();
    if n == 0 {
        let td = TreeDecomposition::new(Vec::new(), Vec::new());
        let report = td.width_report();
        return (td, report);
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let fill_of = |adj: &[BTreeSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut fill = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !adj[a].contains(&b) {
                    fill += 1;
                }
            }
        }
        fill
    };
    let mut fill: Vec<usize> = (0..n).map(|v| fill_of(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (fill[v], v)).collect();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut elim_bags: Vec<Vec<usize>> = Vec::with_capacity(n);

    while let Some((_, v)) = queue.pop_first() {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        elim_bags.push(bag);
        order.push(v);
        eliminated[v] = true;

        for (i, &a) in nb.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj[v].clear();

        let mut touched: BTreeSet<usize> = BTreeSet::new();
        for &a in &nb {
            touched.insert(a);
            touched.extend(adj[a].iter().copied());
        }
        for w in touched {
            if eliminated[w] {
                continue;
            }
            let f = fill_of(&adj, w);
            if f != fill[w] {
                queue.remove(&(fill[w], w));
                fill[w] = f;
                queue.insert((f, w));
            }
        }
    }

    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    // Bag index = n − 1 − elimination position.
    let index = |p: usize| n - 1 - p;
    let mut bags = vec![Vec::new(); n];
    let mut tree_edges = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for (p, &v) in order.iter().enumerate() {
        bags[index(p)] = elim_bags[p].clone();
        let parent = elim_bags[p]
            .iter()
            .filter(|&&x| x != v)
            .map(|&x| position[x])
            .min();
        match parent {
            Some(q) => tree_edges.push((index(q), index(p))),
            None => roots.push(index(p)),
        }
    }
    // Components are stitched together through their roots.
    roots.sort_unstable();
    for pair in roots.windows(2) {
        tree_edges.push((pair[0], pair[1]));
    }
    tree_edges.sort_unstable();
    let td = TreeDecomposition::new(bags, tree_edges);
    let report = td.width_report();
    (td, report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted vertex ids.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// A rooted nice decomposition stored in post-order: every child index is
/// smaller than its parent's, and the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
}

impl NiceDecomposition {
    /// Wraps raw nodes without checking them; see [`validate_nice`].
    pub fn from_nodes(nodes: Vec<NiceNode>, root: usize) -> Self {
        NiceDecomposition { nodes, root }
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> isize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0) as isize - 1
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|x| pred(&x.kind)).count()
    }

    /// `I(T_v)`: the union of all bags below and at `v`, sorted.
    pub fn cone(&self, v: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            out.extend(self.nodes[x].bag.iter().copied());
            stack.extend(self.nodes[x].children.iter().copied());
        }
        out.into_iter().collect()
    }

    /// Parent of each node; `None` for the root.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (p, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c < parent.len() {
                    parent[c] = Some(p);
                }
            }
        }
        parent
    }

    /// The underlying unrooted decomposition, one bag per node, rooted at bag 0.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let len = self.nodes.len();
        // Renumber so that the root becomes bag 0.
        let relabel = |x: usize| if x == self.root { 0 } else if x < self.root { x + 1 } else { x };
        let mut bags = vec![Vec::new(); len];
        let mut edges = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            bags[relabel(id)] = node.bag.clone();
            for &c in &node.children {
                edges.push((relabel(id), relabel(c)));
            }
        }
        edges.sort_unstable();
        TreeDecomposition::new(bags, edges)
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }

    fn leaf_chain(&mut self, bag: &[usize]) -> usize {
        let mut top = self.push(NodeKind::Leaf, Vec::new(), Vec::new());
        for &x in bag {
            top = self.introduce(top, x);
        }
        top
    }

    fn introduce(&mut self, child: usize, x: usize) -> usize {
        let mut bag = self.nodes[child].bag.clone();
        let at = bag.binary_search(&x).unwrap_err();
        bag.insert(at, x);
        self.push(NodeKind::Introduce(x), bag, vec![child])
    }

    fn forget(&mut self, child: usize, x: usize) -> usize {
        let mut bag = self.nodes[child].bag.clone();
        let at = bag.binary_search(&x).expect("forgotten vertex is in the bag");
        bag.remove(at);
        self.push(NodeKind::Forget(x), bag, vec![child])
    }

    /// Forget `from \ to` then introduce `to \ from`, both ascending.
    fn transition(&mut self, mut top: usize, from: &[usize], to: &[usize]) -> usize {
        for &x in from.iter().filter(|x| to.binary_search(x).is_err()) {
            top = self.forget(top, x);
        }
        for &x in to.iter().filter(|x| from.binary_search(x).is_err()) {
            top = self.introduce(top, x);
        }
        top
    }
}

/// Converts a valid decomposition to nice form, rooted at bag 0. Children of
/// a bag are processed in ascending bag order and combined by a left-deep
/// chain of join nodes.
pub fn to_nice(td: &TreeDecomposition, g: &Graph) -> Result<NiceDecomposition> {
    if let Err(v) = validate_td(g, td) {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidDecomposition(msg.join("; ")));
    }
    let mut b = NiceBuilder { nodes: Vec::new() };
    if td.bags.is_empty() {
        let root = b.push(NodeKind::Leaf, Vec::new(), Vec::new());
        return Ok(NiceDecomposition::from_nodes(b.nodes, root));
    }
    let adj = td.tree_adjacency().expect("validated tree");
    let k = td.bags.len();
    // BFS order from bag 0; reversed it is a valid bottom-up order.
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut queue = VecDeque::from([0]);
    parent[0] = 0;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut top = vec![usize::MAX; k];
    for &t in order.iter().rev() {
        let bag_t = &td.bags[t];
        let mut branches = Vec::new();
        for &c in adj[t].iter().filter(|&&c| c != t && parent[c] == t && c != 0) {
            let branch = b.transition(top[c], &td.bags[c], bag_t);
            branches.push(branch);
        }
        let mut acc = match branches.first() {
            None => b.leaf_chain(bag_t),
            Some(&first) => first,
        };
        for &other in branches.iter().skip(1) {
            acc = b.push(NodeKind::Join, bag_t.clone(), vec![acc, other]);
        }
        top[t] = acc;
    }
    let root = b.transition(top[0], &td.bags[0], &[]);
    Ok(NiceDecomposition::from_nodes(b.nodes, root))
}

/// A broken nice-decomposition invariant. `Display` prints 1-based vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiceViolation {
    Structure(String),
    BagVertexOutOfRange { node: usize, vertex: usize },
    RootBagNotEmpty,
    LeafBagNotEmpty(usize),
    BadIntroduce(usize),
    BadForget(usize),
    BadJoin(usize),
    WidthExceeded { width: isize, limit: usize },
    VertexUncovered(usize),
    EdgeUncovered(Edge),
    Disconnected(usize),
    JoinConeOverlap { node: usize, vertex: usize },
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NiceViolation::Structure(s) => write!(f, "structure: {s}"),
            NiceViolation::BagVertexOutOfRange { node, vertex } => {
                write!(f, "node {node} holds out-of-range vertex {}", vertex + 1)
            }
            NiceViolation::RootBagNotEmpty => f.write_str("root bag not empty"),
            NiceViolation::LeafBagNotEmpty(v) => write!(f, "leaf {v} has a nonempty bag"),
            NiceViolation::BadIntroduce(v) => {
                write!(f, "introduce node {v} does not extend its child bag by one vertex")
            }
            NiceViolation::BadForget(v) => {
                write!(f, "forget node {v} does not shrink its child bag by one vertex")
            }
            NiceViolation::BadJoin(v) => write!(f, "join node {v} bags differ from its children"),
            NiceViolation::WidthExceeded { width, limit } => {
                write!(f, "width {width} exceeds {limit}")
            }
            NiceViolation::VertexUncovered(v) => write!(f, "vertex {} in no bag", v + 1),
            NiceViolation::EdgeUncovered(e) => write!(f, "edge {e} uncovered"),
            NiceViolation::Disconnected(v) => {
                write!(f, "bags containing vertex {} are not connected", v + 1)
            }
            NiceViolation::JoinConeOverlap { node, vertex } => write!(
                f,
                "join cone overlap at node {node}: vertex {} below both children",
                vertex + 1
            ),
        }
    }
}

fn is_sorted_set(bag: &[usize]) -> bool {
    bag.windows(2).all(|w| w[0] < w[1])
}

/// Verifies node types, empty root and leaves, coverage, connectivity,
/// `width ≤ max_width`, and that the two cones below every join node meet
/// only inside the join bag.
pub fn validate_nice(
    g: &Graph,
    ntd: &NiceDecomposition,
    max_width: usize,
) -> std::result::Result<(), Vec<NiceViolation>> {
    let n = g.n();
    let nodes = &ntd.nodes;
    let len = nodes.len();
    let mut out = Vec::new();

    if ntd.root >= len {
        return Err(vec![NiceViolation::Structure("root out of range".into())]);
    }
    let mut parent_count = vec![0usize; len];
    for (p, node) in nodes.iter().enumerate() {
        for &c in &node.children {
            if c >= p {
                out.push(NiceViolation::Structure(format!(
                    "child {c} of node {p} is not earlier in post-order"
                )));
            } else {
                parent_count[c] += 1;
            }
        }
        if !is_sorted_set(&node.bag) {
            out.push(NiceViolation::Structure(format!("bag of node {p} is not a sorted set")));
        }
        if let Some(&x) = node.bag.iter().find(|&&x| x >= n) {
            out.push(NiceViolation::BagVertexOutOfRange { node: p, vertex: x });
        }
    }
    for (v, &count) in parent_count.iter().enumerate() {
        let expected = usize::from(v != ntd.root);
        if count != expected {
            out.push(NiceViolation::Structure(format!(
                "node {v} has {count} parents, expected {expected}"
            )));
        }
    }
    if ntd.root != len - 1 {
        out.push(NiceViolation::Structure("root is not the last node".into()));
    }
    if !out.is_empty() {
        return Err(out);
    }

    if !nodes[ntd.root].bag.is_empty() {
        out.push(NiceViolation::RootBagNotEmpty);
    }
    for (v, node) in nodes.iter().enumerate() {
        let child_bag = |i: usize| &nodes[node.children[i]].bag;
        let ok = match node.kind {
            NodeKind::Leaf => {
                if !node.bag.is_empty() {
                    out.push(NiceViolation::LeafBagNotEmpty(v));
                }
                node.children.is_empty()
            }
            NodeKind::Introduce(x) => {
                let ok = node.children.len() == 1 && {
                    let cb = child_bag(0);
                    cb.binary_search(&x).is_err()
                        && node.bag.len() == cb.len() + 1
                        && node.bag.iter().filter(|&&y| y != x).eq(cb.iter())
                };
                if !ok {
                    out.push(NiceViolation::BadIntroduce(v));
                }
                true
            }
            NodeKind::Forget(x) => {
                let ok = node.children.len() == 1 && {
                    let cb = child_bag(0);
                    node.bag.binary_search(&x).is_err()
                        && cb.len() == node.bag.len() + 1
                        && cb.iter().filter(|&&y| y != x).eq(node.bag.iter())
                };
                if !ok {
                    out.push(NiceViolation::BadForget(v));
                }
                true
            }
            NodeKind::Join => {
                let ok = node.children.len() == 2
                    && child_bag(0) == &node.bag
                    && child_bag(1) == &node.bag;
                if !ok {
                    out.push(NiceViolation::BadJoin(v));
                }
                true
            }
        };
        if !ok {
            out.push(NiceViolation::Structure(format!("leaf {v} has children")));
        }
    }
    let width = ntd.width();
    if width >= 0 && width as usize > max_width {
        out.push(NiceViolation::WidthExceeded {
            width,
            limit: max_width,
        });
    }

    // Coverage and connectivity: each vertex must have exactly one topmost
    // node containing it.
    let parents = ntd.parents();
    let mut tops = vec![0usize; n];
    let mut edge_seen = vec![false; g.m()];
    for (v, node) in nodes.iter().enumerate() {
        for (i, &x) in node.bag.iter().enumerate() {
            if x >= n {
                continue;
            }
            let parent_has = parents[v]
                .map(|p| nodes[p].bag.binary_search(&x).is_ok())
                .unwrap_or(false);
            if !parent_has {
                tops[x] += 1;
            }
            for &y in &node.bag[i + 1..] {
                if let Some(id) = g.edge_id(x, y) {
                    edge_seen[id] = true;
                }
            }
        }
    }
    for (x, &t) in tops.iter().enumerate() {
        match t {
            0 => out.push(NiceViolation::VertexUncovered(x)),
            1 => {}
            _ => out.push(NiceViolation::Disconnected(x)),
        }
    }
    for (id, &seen) in edge_seen.iter().enumerate() {
        if !seen {
            out.push(NiceViolation::EdgeUncovered(g.edge(id)));
        }
    }

    // Cones as bitsets, built bottom-up and released once consumed.
    let words = n.div_ceil(64);
    let mut cones: Vec<Option<Vec<u64>>> = vec![None; len];
    for v in 0..len {
        let node = &nodes[v];
        let mut cone = match node.children.as_slice() {
            [] => vec![0u64; words],
            [c] => cones[*c].take().unwrap_or_else(|| vec![0u64; words]),
            [l, r, ..] => {
                let left = cones[*l].take().unwrap_or_else(|| vec![0u64; words]);
                let right = cones[*r].take().unwrap_or_else(|| vec![0u64; words]);
                let mut bag_bits = vec![0u64; words];
                for &x in node.bag.iter().filter(|&&x| x < n) {
                    bag_bits[x / 64] |= 1 << (x % 64);
                }
                for w in 0..words {
                    let overlap = left[w] & right[w] & !bag_bits[w];
                    if overlap != 0 {
                        let vertex = w * 64 + overlap.trailing_zeros() as usize;
                        out.push(NiceViolation::JoinConeOverlap { node: v, vertex });
                        break;
                    }
                }
                left.iter().zip(&right).map(|(a, b)| a | b).collect()
            }
        };
        for &x in node.bag.iter().filter(|&&x| x < n) {
            cone[x / 64] |= 1 << (x % 64);
        }
        cones[v] = Some(cone);
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
