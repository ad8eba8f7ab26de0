//! Per-vertex cost tables and the factor/matching reductions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Subgraph;

/// Finite magnitudes of `n * max|f_i(x)|` must stay below this.
pub const COST_BOUND: u64 = 1 << 62;

/// An integer cost or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedCost {
    Finite(i64),
    Infinite,
}

impl ExtendedCost {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedCost::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedCost::Finite(x) => Some(x),
            ExtendedCost::Infinite => None,
        }
    }
}

impl From<i64> for ExtendedCost {
    fn from(x: i64) -> Self {
        ExtendedCost::Finite(x)
    }
}

impl Add for ExtendedCost {
    type Output = ExtendedCost;

    fn add(self, rhs: ExtendedCost) -> ExtendedCost {
        match (self, rhs) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => ExtendedCost::Finite(
                a.checked_add(b)
                    .expect("finite sums are bounded by the cost-model check"),
            ),
            _ => ExtendedCost::Infinite,
        }
    }
}

impl Ord for ExtendedCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => a.cmp(b),
            (ExtendedCost::Finite(_), ExtendedCost::Infinite) => Ordering::Less,
            (ExtendedCost::Infinite, ExtendedCost::Finite(_)) => Ordering::Greater,
            (ExtendedCost::Infinite, ExtendedCost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Finite(x) => write!(f, "{x}"),
            ExtendedCost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedCost {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedCost::Finite(x) => s.serialize_i64(*x),
            ExtendedCost::Infinite => s.serialize_none(),
        }
    }
}

/// Dense tables `f_i(x)` for `x ∈ {0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    n: usize,
    tables: Vec<Vec<i64>>,
}

/// Per-vertex degree requirements for the factor reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorSpec {
    /// General factor: `d_i ∈ B_i`.
    Sets(Vec<Vec<usize>>),
    /// `(l, u)`-factor: `l_i ≤ d_i ≤ u_i`.
    Intervals(Vec<(usize, usize)>),
    /// b-matching: `d_i = b_i`.
    Targets(Vec<usize>),
}

impl CostModel {
    /// Wraps literal tables after checking lengths and the magnitude bound.
    pub fn new(tables: Vec<Vec<i64>>) -> Result<Self> {
        let n = tables.len();
        let mut max_abs = 0u64;
        for (i, t) in tables.iter().enumerate() {
            if t.len() != n {
                return Err(Error::TableLength {
                    vertex: i + 1,
                    len: t.len(),
                    n,
                });
            }
            for &x in t {
                max_abs = max_abs.max(x.unsigned_abs());
            }
        }
        match max_abs.checked_mul(n as u64) {
            Some(total) if total < COST_BOUND => Ok(CostModel { n, tables }),
            _ => Err(Error::CostBound { max_abs, n }),
        }
    }

    /// The same function on every vertex.
    pub fn uniform(n: usize, f: impl Fn(usize) -> i64) -> Result<Self> {
        let table: Vec<i64> = (0..n).map(f).collect();
        CostModel::new(vec![table; n])
    }

    pub fn from_spec(n: usize, spec: &FactorSpec) -> Result<Self> {
        match spec {
            FactorSpec::Sets(sets) => CostModel::from_factor(n, sets),
            FactorSpec::Intervals(bounds) => CostModel::from_interval(n, bounds),
            FactorSpec::Targets(targets) => CostModel::from_b_matching(n, targets),
        }
    }

    /// `f_i = 0` on `B_i`, `1` elsewhere. The optimum is zero iff a factor exists.
    pub fn from_factor(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        check_len(n, sets.len())?;
        let tables = sets
            .iter()
            .enumerate()
            .map(|(i, set)| factor_table(n, i, set))
            .collect::<Result<_>>()?;
        CostModel::new(tables)
    }

    /// Convex piecewise-linear distance to `[l_i, u_i]`.
    pub fn from_interval(n: usize, bounds: &[(usize, usize)]) -> Result<Self> {
        check_len(n, bounds.len())?;
        let tables = bounds
            .iter()
            .enumerate()
            .map(|(i, &(l, u))| interval_table(n, i, l, u))
            .collect::<Result<_>>()?;
        CostModel::new(tables)
    }

    /// `f_i(x) = |x − b_i|`.
    pub fn from_b_matching(n: usize, targets: &[usize]) -> Result<Self> {
        check_len(n, targets.len())?;
        let tables = targets
            .iter()
            .enumerate()
            .map(|(i, &b)| interval_table(n, i, b, b))
            .collect::<Result<_>>()?;
        CostModel::new(tables)
    }

    /// `(x−3)²` at `main`, `x(x−3)²` everywhere else. Zero optimum for some
    /// choice of `main` certifies a nonempty cubic subgraph.
    pub fn cubic_gadget(n: usize, main: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::GadgetTooSmall(n));
        }
        if main >= n {
            return Err(Error::VertexOutOfRange {
                vertex: main + 1,
                n,
            });
        }
        let tables = (0..n)
            .map(|i| {
                if i == main {
                    cubic_main_table(n)
                } else {
                    cubic_other_table(n)
                }
            })
            .collect();
        CostModel::new(tables)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tables(&self) -> &[Vec<i64>] {
        &self.tables
    }

    pub fn table(&self, vertex: usize) -> &[i64] {
        &self.tables[vertex]
    }

    /// `f_vertex(degree)`.
    #[inline]
    pub fn cost(&self, vertex: usize, degree: usize) -> i64 {
        self.tables[vertex][degree]
    }

    /// `Σ_i f_i(d_i(G))`.
    pub fn evaluate(&self, solution: &Subgraph<'_>) -> Result<ExtendedCost> {
        let host = solution.host();
        if host.n() != self.n {
            return Err(Error::DimensionMismatch {
                graph: host.n(),
                model: self.n,
            });
        }
        let total = solution
            .degrees()
            .iter()
            .enumerate()
            .map(|(i, &d)| self.cost(i, d))
            .sum();
        Ok(ExtendedCost::Finite(total))
    }
}

fn check_len(n: usize, got: usize) -> Result<()> {
    if n == got {
        Ok(())
    } else {
        Err(Error::Params(format!(
            "expected {n} per-vertex entries, got {got}"
        )))
    }
}

/// Single-vertex table for a general-factor degree set.
pub fn factor_table(n: usize, vertex: usize, set: &[usize]) -> Result<Vec<i64>> {
    if set.is_empty() {
        return Err(Error::EmptyDegreeSet(vertex + 1));
    }
    let mut table = vec![1; n];
    for &x in set {
        if x >= n {
            return Err(Error::DegreeOutOfRange {
                vertex: vertex + 1,
                value: x,
                max: n.saturating_sub(1),
            });
        }
        table[x] = 0;
    }
    Ok(table)
}

/// Single-vertex table for an `(l, u)` interval.
pub fn interval_table(n: usize, vertex: usize, lower: usize, upper: usize) -> Result<Vec<i64>> {
    if lower > upper {
        return Err(Error::EmptyInterval {
            vertex: vertex + 1,
            lower,
            upper,
        });
    }
    if upper >= n {
        return Err(Error::DegreeOutOfRange {
            vertex: vertex + 1,
            value: upper,
            max: n.saturating_sub(1),
        });
    }
    Ok((0..n)
        .map(|x| {
            if x < lower {
                (lower - x) as i64
            } else if x > upper {
                (x - upper) as i64
            } else {
                0
            }
        })
        .collect())
}

pub fn cubic_main_table(n: usize) -> Vec<i64> {
    (0..n as i64).map(|x| (x - 3) * (x - 3)).collect()
}

pub fn cubic_other_table(n: usize) -> Vec<i64> {
    (0..n as i64).map(|x| x * (x - 3) * (x - 3)).collect()
}
