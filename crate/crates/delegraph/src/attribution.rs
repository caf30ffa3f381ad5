//! Where did a voter's votes come from, and what would a non-voter have
//! received had they voted?
//!
//! A voter's tally decomposes into per-source contributions: row `v` of
//! `B⁻¹`. Each row is obtained with one transpose solve `Bᵀ·y = e_v` — the
//! inverse is never formed. Exact vote routes are not traceable (delegation
//! chains are routinely infinite), so only aggregates are exposed.

use std::collections::BTreeMap;

use crate::dense::LuFactors;
use crate::error::{Error, Result};
use crate::graph::{DelegationGraph, Node, NodeId};
use crate::preprocess::{preprocess, SimplifiedGraph};
use crate::solver::{build_system, solve, LinearSystem, SolveConfig};

/// Contributions below this threshold are reported as absent.
pub const CONTRIBUTION_CUTOFF: f64 = 1e-12;

/// One row of `B⁻¹`: how much each source contributed to `voter`'s tally.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionVector {
    pub voter: NodeId,
    /// Source node -> votes contributed. The voter's own entry is >= 1.
    pub contributions: BTreeMap<NodeId, f64>,
    /// Sum over all sources; equals the voter's tally `S[voter]`.
    pub total: f64,
}

fn attribution_from_row(sys: &LinearSystem, voter: NodeId, row: &[f64]) -> AttributionVector {
    let mut total = 0.0;
    let mut contributions = BTreeMap::new();
    for (id, &v) in sys.node_order().iter().zip(row) {
        total += v;
        if v.abs() >= CONTRIBUTION_CUTOFF {
            contributions.insert(id.clone(), v);
        }
    }
    AttributionVector {
        voter,
        contributions,
        total,
    }
}

fn check_voter(sg: &SimplifiedGraph, voter: &NodeId) -> Result<usize> {
    let idx = sg
        .index_of(voter)
        .ok_or_else(|| Error::UnknownNode(voter.clone()))?;
    if !sg.graph().is_voter(voter) {
        return Err(Error::NotAVoter(voter.clone()));
    }
    Ok(idx)
}

/// Transpose solve via the Neumann iteration: `y ← e_v + Aᵀ·y`. Used above
/// the dense threshold; converges under the same drain argument as the
/// forward iteration.
fn transpose_neumann(sys: &LinearSystem, unit_idx: usize, cfg: &SolveConfig) -> Result<Vec<f64>> {
    let at = sys.matrix().transpose();
    let n = sys.n();
    let mut y = vec![0.0; n];
    y[unit_idx] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..=cfg.effective_max_iter(n) {
        at.apply(&y, &mut next);
        next[unit_idx] += 1.0;
        let diff = y
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff < cfg.tol {
            return Ok(y);
        }
        std::mem::swap(&mut y, &mut next);
    }
    Err(Error::NoConvergence {
        iterations: cfg.effective_max_iter(n),
    })
}

/// Contribution vector for one voter: row `voter` of `B⁻¹`.
pub fn attribution_for_voter(
    sg: &SimplifiedGraph,
    voter: &NodeId,
    cfg: &SolveConfig,
) -> Result<AttributionVector> {
    let idx = check_voter(sg, voter)?;
    let sys = build_system(sg);
    let row = if sys.n() <= cfg.dense_threshold {
        let lu = LuFactors::factor(sys.matrix().to_dense_b(), sys.n())?;
        let mut e = vec![0.0; sys.n()];
        e[idx] = 1.0;
        lu.solve_transposed(&e)
    } else {
        transpose_neumann(&sys, idx, cfg)?
    };
    Ok(attribution_from_row(&sys, voter.clone(), &row))
}

/// Contribution vectors for every voter, factoring the system once.
/// Refuses graphs above the dense threshold; query per voter instead.
pub fn full_attribution_matrix(
    sg: &SimplifiedGraph,
    cfg: &SolveConfig,
) -> Result<Vec<AttributionVector>> {
    if sg.len() > cfg.dense_threshold {
        return Err(Error::TooLarge {
            operation: "full attribution matrix",
            limit: cfg.dense_threshold,
            actual: sg.len(),
        });
    }
    let sys = build_system(sg);
    let lu = LuFactors::factor(sys.matrix().to_dense_b(), sys.n())?;
    let mut rows = Vec::new();
    for (idx, id) in sys.node_order().iter().enumerate() {
        if !sys.is_voter(idx) {
            continue;
        }
        let mut e = vec![0.0; sys.n()];
        e[idx] = 1.0;
        let row = lu.solve_transposed(&e);
        rows.push(attribution_from_row(&sys, id.clone(), &row));
    }
    Ok(rows)
}

/// Votes `node` would receive if it voted: flips the flag and re-runs the
/// whole pipeline on the *original* graph, because voting removes the node's
/// out-edges and can reshape both preprocessing passes. The input graph is
/// untouched.
///
/// The raw `S` entry of a non-voter is *not* this number and must never be
/// reported as one.
pub fn hypothetical_tally(
    graph: &DelegationGraph,
    node: &NodeId,
    cfg: &SolveConfig,
) -> Result<f64> {
    if !graph.contains(node) {
        return Err(Error::UnknownNode(node.clone()));
    }
    let nodes: Vec<Node> = graph
        .nodes()
        .iter()
        .map(|n| Node {
            id: n.id.clone(),
            is_voter: n.is_voter || n.id == *node,
        })
        .collect();
    let flipped =
        DelegationGraph::from_parts_unchecked(nodes, graph.edges().to_vec(), graph.weight_mode());
    let sg = preprocess(&flipped)?;
    let result = solve(&sg, cfg)?;
    let idx = sg.index_of(node).expect("a voter is always retained");
    Ok(result.s[idx])
}
