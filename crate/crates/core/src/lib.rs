//! Exact degree sequence optimization on graphs of bounded treewidth.
//!
//! Given a host graph `H` on `n` vertices and integer cost tables `f_i`
//! on `{0, …, n−1}`, find a spanning subgraph `G ⊆ H` minimising
//! `Σ_i f_i(d_i(G))`. The solver runs a dynamic program over a nice tree
//! decomposition of `H`; the running time is polynomial in `n` for every
//! fixed width.
//!
//! ```
//! use degseq_core::{CostModel, Graph, PipelineOptions, solve_instance};
//!
//! let c4 = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
//! let perfect_matching = CostModel::from_b_matching(4, &[1; 4]).unwrap();
//! let (report, _) = solve_instance(&c4, &perfect_matching, &PipelineOptions::default()).unwrap();
//! assert_eq!(report.optimum, 0);
//! assert_eq!(report.edges.len(), 2);
//! ```

pub mod cost;
pub mod dp;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod treedecomp;

pub use cost::{CostModel, ExtendedCost, FactorSpec};
pub use dp::{reconstruct, solve, BagState, DegreeCaps, DpTables, SolveOptions, StateTable};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, Subgraph};
pub use pipeline::{solve_instance, PipelineOptions, RunReport};
pub use treedecomp::{
    min_fill_decompose, to_nice, validate_nice, validate_td, NiceDecomposition, NodeKind,
    TreeDecomposition,
};
