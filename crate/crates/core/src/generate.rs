//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path,
    Cycle,
    KTree,
    SeriesParallel,
    /// Erdős–Rényi with the given edge probability.
    Random,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "path" => Ok(GraphKind::Path),
            "cycle" => Ok(GraphKind::Cycle),
            "ktree" => Ok(GraphKind::KTree),
            "series-parallel" => Ok(GraphKind::SeriesParallel),
            "random" => Ok(GraphKind::Random),
            other => Err(Error::Params(format!("unknown graph kind `{other}`"))),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub kind: GraphKind,
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
}

pub fn generate(params: &GenParams) -> Result<Graph> {
    let GenParams { kind, n, k, p, seed } = *params;
    if n == 0 {
        return Err(Error::Params("n must be at least 1".into()));
    }
    let mut rng = rng(seed);
    match kind {
        GraphKind::Path => Ok(path(n)),
        GraphKind::Cycle => cycle(n),
        GraphKind::KTree => ktree(n, k, &mut rng),
        GraphKind::SeriesParallel => Ok(series_parallel(n, &mut rng)),
        GraphKind::Random => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Params(format!("edge probability {p} outside [0, 1]")));
            }
            Ok(gnp(n, p, &mut rng))
        }
    }
}

pub fn path(n: usize) -> Graph {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &pairs).expect("path edges are valid")
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Params(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &pairs)
}

pub fn complete(n: usize) -> Graph {
    let pairs: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    Graph::new(n, &pairs).expect("complete graph edges are valid")
}

/// A random k-tree: a `(k+1)`-clique, then each further vertex joined to a
/// uniformly chosen existing k-clique. For `n ≤ k + 1` this is `K_n`.
pub fn ktree<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Graph> {
    if k == 0 {
        return Err(Error::Params("k-tree needs k ≥ 1".into()));
    }
    if n <= k + 1 {
        return Ok(complete(n));
    }
    let mut pairs: Vec<(usize, usize)> = (0..=k)
        .flat_map(|a| (a + 1..=k).map(move |b| (a, b)))
        .collect();
    let mut cliques: Vec<Vec<usize>> = (0..=k)
        .map(|skip| (0..=k).filter(|&x| x != skip).collect())
        .collect();
    for v in k + 1..n {
        let base = cliques[rng.gen_range(0..cliques.len())].clone();
        pairs.extend(base.iter().map(|&x| (x, v)));
        for skip in 0..k {
            let mut c: Vec<usize> = base.iter().copied().filter(|&x| x != base[skip]).collect();
            c.push(v);
            cliques.push(c);
        }
    }
    Graph::new(n, &pairs)
}

/// Grows a two-terminal series-parallel graph from a single edge. Each step
/// picks an edge `{a, b}` and adds a vertex `v` either by subdividing it
/// (series) or by adding the path `a–v–b` beside it (parallel).
pub fn series_parallel<R: Rng>(n: usize, rng: &mut R) -> Graph {
    if n == 1 {
        return Graph::empty(1);
    }
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    for v in 2..n {
        let i = rng.gen_range(0..edges.len());
        let (a, b) = edges[i];
        if rng.gen_bool(0.5) {
            edges.swap_remove(i);
        }
        edges.push((a, v));
        edges.push((v, b));
    }
    edges.sort_unstable();
    Graph::new(n, &edges).expect("series-parallel edges are valid")
}

pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                pairs.push((a, b));
            }
        }
    }
    Graph::new(n, &pairs).expect("gnp edges are valid")
}

/// Independent uniform table entries in `lo..=hi`.
pub fn random_costs<R: Rng>(n: usize, lo: i64, hi: i64, rng: &mut R) -> CostModel {
    let tables = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    CostModel::new(tables).expect("small random costs satisfy the bound")
}

/// Random nonempty degree sets `B_i ⊆ {0, …, n−1}`.
pub fn random_degree_sets<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            let size = rng.gen_range(1..=n.clamp(1, 3));
            let mut set = all[..size].to_vec();
            set.sort_unstable();
            set
        })
        .collect()
}
