//! Exact branch-and-cut for covering the nodes of a DAG with node-disjoint
//! paths that each traverse at least one mandatory arc.

#![allow(clippy::needless_range_loop)]

pub mod branch_and_cut;
pub mod cuts;
pub mod error;
pub mod families;
pub mod flow;
pub mod formulation;
pub mod generate;
pub mod graph;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod separation;
pub mod special;

pub use branch_and_cut::{solve, CutLevel, SolveConfig, SolveReport, SolveStatus};
pub use error::{FormatError, GenError, GraphError, SolverError};
pub use families::{compute_arc_set_families, ArcSetFamilies};
pub use graph::{augment, is_feasible_path, AugmentedGraph, Dag, Instance, Node, Path};
