//! Error type shared across the engine.

use crate::graph::{NodeId, ValidationReport};

/// Errors produced by graph construction, preprocessing, solving and the
/// file-format layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The input graph violates one or more structural invariants.
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),

    /// The input text could not be parsed. `line` is 1-based; 0 means the
    /// problem is not tied to a single line (e.g. empty input).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The graph contains no voters, so no tally is possible.
    #[error("no voters in graph; every vote is wasted")]
    EmptyResult,

    /// Direct elimination hit a zero pivot. Only possible when the system
    /// was built from a graph that skipped preprocessing (a voterless cycle).
    #[error("singular system: input was not preprocessed (voterless cycle)")]
    SingularSystem,

    /// The fixed-point iteration did not meet its tolerance. Same root cause
    /// as [`Error::SingularSystem`], observed from the iterative side.
    #[error("no convergence after {iterations} iterations: input was not preprocessed (voterless cycle)")]
    NoConvergence { iterations: usize },

    /// Attribution was requested for a node that does not vote.
    #[error("node {0} is not a voter; attribution is only meaningful for voters")]
    NotAVoter(NodeId),

    /// A referenced node does not exist in the graph.
    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    /// A referenced delegation edge does not exist in the graph.
    #[error("unknown edge {from} -> {to}")]
    UnknownEdge { from: NodeId, to: NodeId },

    /// The operation is restricted to graphs below a size limit.
    #[error("{operation} supports at most {limit} nodes, got {actual}")]
    TooLarge {
        operation: &'static str,
        limit: usize,
        actual: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
