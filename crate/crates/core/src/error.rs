use thiserror::Error;

use crate::graph::Node;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc ({0},{1}) references a node outside 1..={2}")]
    NodeOutOfRange(Node, Node, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(Node),
    #[error("duplicate arc ({0},{1})")]
    DuplicateArc(Node, Node),
    #[error("cycle detected: the arc relation is not acyclic")]
    Cycle,
    #[error("mandatory arc index {0} out of range")]
    MandatoryIndexOutOfRange(usize),
    #[error("mandatory-not-in-A: ({0},{1}) is not an arc of the graph")]
    MandatoryNotInArcs(Node, Node),
    #[error("node sequence {0:?} is not a path of the graph")]
    NotAPath(Vec<Node>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("paths are not node-disjoint (node {0} repeated)")]
    Overlap(Node),
    #[error("cost {0} has no decomposition for n = {1}")]
    Undecodable(i64, usize),
    #[error("instance has {0} nodes; the exhaustive oracle is limited to {1}")]
    OracleGuard(usize, usize),
    #[error("flow is not decomposable into node-disjoint unit paths: {0}")]
    NotDecomposable(String),
    #[error("LP backend failure: {0}")]
    Lp(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("expected {expected} {what} lines, found {found}")]
    Count {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("tuning did not reach the target after {0} attempts")]
    Tuning(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
