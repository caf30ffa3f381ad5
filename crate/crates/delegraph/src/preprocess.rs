//! Graph preparation: strip voter out-edges, prune nodes whose vote cannot
//! reach any voter.
//!
//! Voters absorb vote mass, so their outgoing delegations are dead weight and
//! are removed first. A node whose every path dead-ends away from voters can
//! never have its vote counted; pruning removes it and records the waste.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{DelegationGraph, Issue, IssueCode, NodeId, WeightMode};

/// What preprocessing removed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PruneReport {
    pub removed_nodes: BTreeSet<NodeId>,
    pub removed_edges: BTreeSet<(NodeId, NodeId)>,
    pub retained_count: usize,
    /// Retained nodes that delegated part of their weight into the pruned
    /// region; that share of their vote is lost (never renormalized).
    pub partial_waste: Vec<NodeId>,
}

impl PruneReport {
    /// The partial-waste findings as warning issues, for surfacing through
    /// validation-style channels.
    pub fn waste_warnings(&self) -> Vec<Issue> {
        self.partial_waste
            .iter()
            .map(|id| Issue {
                code: IssueCode::PartialWaste,
                element: id.to_string(),
                message: format!(
                    "{id} delegates part of its vote into the pruned region; that share is lost"
                ),
            })
            .collect()
    }
}

/// A preprocessed graph: no voter has out-edges, every retained non-voter
/// reaches a voter, and `node_order` fixes the row/column order used by the
/// solver (lexicographic by id).
#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedGraph {
    graph: DelegationGraph,
    report: PruneReport,
    node_order: Vec<NodeId>,
}

impl SimplifiedGraph {
    pub fn graph(&self) -> &DelegationGraph {
        &self.graph
    }

    pub fn report(&self) -> &PruneReport {
        &self.report
    }

    pub fn node_order(&self) -> &[NodeId] {
        &self.node_order
    }

    pub fn len(&self) -> usize {
        self.node_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_order.is_empty()
    }

    /// Index of `id` in [`Self::node_order`].
    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.node_order.binary_search(id).ok()
    }

    /// Wraps a graph *as if* it had been preprocessed, with an empty report.
    ///
    /// No stripping, pruning or checking happens. This is the diagnostic
    /// escape hatch for feeding raw graphs straight to the solvers (e.g. to
    /// observe the divergence contract on a voterless cycle); results on
    /// graphs that do not satisfy the simplified-graph invariants are
    /// whatever the solver's error contract says.
    pub fn assume_preprocessed(graph: DelegationGraph) -> Self {
        let node_order: Vec<NodeId> = graph.nodes().iter().map(|n| n.id.clone()).collect();
        let report = PruneReport {
            retained_count: node_order.len(),
            ..Default::default()
        };
        SimplifiedGraph {
            graph,
            report,
            node_order,
        }
    }
}

/// Removes every edge whose source is a voter. Weights of the remaining
/// edges are untouched.
pub fn strip_voter_edges(graph: &DelegationGraph) -> DelegationGraph {
    let edges = graph
        .edges()
        .iter()
        .filter(|e| !graph.is_voter(&e.from))
        .cloned()
        .collect();
    DelegationGraph::from_parts_unchecked(graph.nodes().to_vec(), edges, graph.weight_mode())
}

/// Keeps exactly the nodes that can reach a voter along delegation edges
/// (voters trivially reach themselves). Implemented as breadth-first search
/// from the voter set over reversed edges.
///
/// Expects its input to already have voter out-edges stripped; see
/// [`preprocess`] for the full composition.
pub fn prune_unreachable(graph: &DelegationGraph) -> SimplifiedGraph {
    let index: HashMap<&NodeId, usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (&n.id, i))
        .collect();
    let n = graph.nodes().len();

    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        reverse[index[&e.to]].push(index[&e.from]);
    }

    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, node)| node.is_voter)
        .map(|(i, _)| i)
        .collect();
    for &i in &queue {
        reached[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &p in &reverse[i] {
            if !reached[p] {
                reached[p] = true;
                queue.push_back(p);
            }
        }
    }

    let removed_nodes: BTreeSet<NodeId> = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !reached[*i])
        .map(|(_, node)| node.id.clone())
        .collect();

    let mut removed_edges = BTreeSet::new();
    let mut partial_waste = BTreeSet::new();
    let mut kept_edges = Vec::new();
    for e in graph.edges() {
        let from_kept = reached[index[&e.from]];
        let to_kept = reached[index[&e.to]];
        if from_kept && to_kept {
            kept_edges.push(e.clone());
        } else {
            removed_edges.insert((e.from.clone(), e.to.clone()));
            if from_kept {
                // A live node delegated into the dead region: that weight
                // share is wasted, not redistributed.
                partial_waste.insert(e.from.clone());
            }
        }
    }

    let kept_nodes: Vec<_> = graph
        .nodes()
        .iter()
        .filter(|node| reached[index[&node.id]])
        .cloned()
        .collect();

    // Lost out-weight breaks the 1/outdegree shape, so the result is only
    // describable as an explicit-weight graph.
    let mode = if partial_waste.is_empty() {
        graph.weight_mode()
    } else {
        WeightMode::Explicit
    };

    let graph = DelegationGraph::from_parts_unchecked(kept_nodes, kept_edges, mode);
    let node_order: Vec<NodeId> = graph.nodes().iter().map(|n| n.id.clone()).collect();
    let report = PruneReport {
        retained_count: node_order.len(),
        removed_nodes,
        removed_edges,
        partial_waste: partial_waste.into_iter().collect(),
    };
    SimplifiedGraph {
        graph,
        report,
        node_order,
    }
}

/// Full preparation: strip voter out-edges, then prune unreachable nodes.
/// The report covers both passes. Idempotent. Errors with
/// [`Error::EmptyResult`] when the graph has no voters at all.
pub fn preprocess(graph: &DelegationGraph) -> Result<SimplifiedGraph> {
    if graph.voter_count() == 0 {
        return Err(Error::EmptyResult);
    }
    let stripped = strip_voter_edges(graph);
    let mut simplified = prune_unreachable(&stripped);
    for e in graph.edges() {
        if graph.is_voter(&e.from) {
            simplified
                .report
                .removed_edges
                .insert((e.from.clone(), e.to.clone()));
        }
    }
    Ok(simplified)
}
