//! Optional delegation semantics: trust decay and user-chosen weight splits.
//!
//! Decay shrinks every outgoing weight by a factor `beta <= 1`, so a
//! delegation path of depth `d` only delivers `beta^d` of its mass — long
//! trust chains count less, and the lost mass simply drains. Explicit
//! weights let a person divide their vote unevenly across proxies. The two
//! compose freely; the solver only ever reads edge weights.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{
    Delegation, DelegationGraph, Issue, IssueCode, NodeId, ValidationReport, WeightMode,
    WEIGHT_SUM_EPS,
};

/// Uniform per-edge decay factor in `(0, 1]`; `1` is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig {
    beta: f64,
}

impl DecayConfig {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Invalid(ValidationReport {
                errors: vec![Issue {
                    code: IssueCode::WeightOutOfRange,
                    element: format!("beta={beta}"),
                    message: format!("decay factor {beta} outside (0, 1]"),
                }],
                warnings: vec![],
            }));
        }
        Ok(DecayConfig { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_identity(&self) -> bool {
        self.beta == 1.0
    }
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { beta: 1.0 }
    }
}

/// Multiplies every edge weight by `beta`. `beta = 1` returns the graph
/// unchanged; anything smaller yields an explicit-weight graph whose
/// per-source sums are `beta ×` the original sums.
pub fn apply_decay(graph: &DelegationGraph, cfg: DecayConfig) -> DelegationGraph {
    if cfg.is_identity() {
        return graph.clone();
    }
    let edges = graph
        .edges()
        .iter()
        .map(|e| Delegation {
            from: e.from.clone(),
            to: e.to.clone(),
            weight: e.weight * cfg.beta,
        })
        .collect();
    DelegationGraph::from_parts_unchecked(graph.nodes().to_vec(), edges, WeightMode::Explicit)
}

/// Replaces the weights of the named edges. Every source that appears in
/// `weights` must have *all* of its out-edges covered; per-source sums must
/// stay within `(0, 1]`. Untouched sources keep their weights.
pub fn with_explicit_weights(
    graph: &DelegationGraph,
    weights: &BTreeMap<(NodeId, NodeId), f64>,
) -> std::result::Result<DelegationGraph, ValidationReport> {
    let mut report = ValidationReport::default();

    for ((from, to), &w) in weights {
        let exists = graph.edges().iter().any(|e| e.from == *from && e.to == *to);
        if !exists {
            report.errors.push(Issue {
                code: IssueCode::UnknownEdge,
                element: format!("{from}->{to}"),
                message: format!("no delegation {from} -> {to} to reweight"),
            });
        }
        if !(w > 0.0 && w <= 1.0) {
            report.errors.push(Issue {
                code: IssueCode::WeightOutOfRange,
                element: format!("{from}->{to}"),
                message: format!("weight {w} outside (0, 1]"),
            });
        }
    }

    let touched: Vec<&NodeId> = weights.keys().map(|(from, _)| from).collect();
    for (source, out) in graph.edges_by_source() {
        if !touched.contains(&source) {
            continue;
        }
        let covered = out
            .iter()
            .filter(|e| weights.contains_key(&(e.from.clone(), e.to.clone())))
            .count();
        if covered < out.len() {
            report.errors.push(Issue {
                code: IssueCode::MixedWeightMode,
                element: source.to_string(),
                message: format!(
                    "reweighting {source} must cover all {} of its delegations, got {covered}",
                    out.len()
                ),
            });
            continue;
        }
        let sum: f64 = out
            .iter()
            .map(|e| weights[&(e.from.clone(), e.to.clone())])
            .sum();
        if sum > 1.0 + WEIGHT_SUM_EPS {
            report.errors.push(Issue {
                code: IssueCode::WeightSumExceedsOne,
                element: source.to_string(),
                message: format!("outgoing weights of {source} sum to {sum}, exceeding 1"),
            });
        } else if sum < 1.0 - WEIGHT_SUM_EPS {
            report.warnings.push(Issue {
                code: IssueCode::WeightSumBelowOne,
                element: source.to_string(),
                message: format!("outgoing weights of {source} sum to {sum}; the remainder decays"),
            });
        }
    }

    if !report.errors.is_empty() {
        return Err(report);
    }

    let edges = graph
        .edges()
        .iter()
        .map(|e| Delegation {
            from: e.from.clone(),
            to: e.to.clone(),
            weight: *weights
                .get(&(e.from.clone(), e.to.clone()))
                .unwrap_or(&e.weight),
        })
        .collect();
    Ok(DelegationGraph::from_parts_unchecked(
        graph.nodes().to_vec(),
        edges,
        WeightMode::Explicit,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, validate, EdgeSpec};
    use crate::preprocess::preprocess;
    use crate::samples;
    use crate::solver::{solve, SolveConfig};

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn tally(graph: &DelegationGraph) -> std::collections::BTreeMap<NodeId, f64> {
        let sg = preprocess(graph).unwrap();
        solve(&sg, &SolveConfig::default()).unwrap().voter_tallies
    }

    #[test]
    fn identity_decay_changes_nothing() {
        let g = samples::demo_graph();
        let decayed = apply_decay(&g, DecayConfig::new(1.0).unwrap());
        assert_eq!(decayed, g);
    }

    #[test]
    fn invalid_beta_rejected() {
        for beta in [0.0, -1.0, 1.5, f64::NAN] {
            assert!(DecayConfig::new(beta).is_err(), "beta {beta}");
        }
    }

    #[test]
    fn half_decay_on_two_node_chain() {
        let g = build_graph(
            vec![(id("g"), false), (id("h"), true)],
            vec![EdgeSpec::new("g", "h")],
        )
        .unwrap();
        let decayed = apply_decay(&g, DecayConfig::new(0.5).unwrap());
        assert_eq!(decayed.weight_mode(), WeightMode::Explicit);
        let tallies = tally(&decayed);
        assert!((tallies[&id("h")] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn decay_destroys_mass_in_dense_block() {
        // The T..Y block alone: 6 people, everyone delegates to everyone.
        let block = ["T", "U", "V", "W", "X", "Y"];
        let nodes: Vec<(NodeId, bool)> = block
            .iter()
            .map(|s| (id(s), *s == "X" || *s == "Y"))
            .collect();
        let mut edges = Vec::new();
        for from in block {
            for to in block {
                if from != to {
                    edges.push(EdgeSpec::new(from, to));
                }
            }
        }
        let g = build_graph(nodes, edges).unwrap();
        let full: f64 = tally(&g).values().sum();
        assert!((full - 6.0).abs() < 1e-9);
        let half = apply_decay(&g, DecayConfig::new(0.5).unwrap());
        let decayed: f64 = tally(&half).values().sum();
        assert!(decayed < 6.0 - 0.5, "decayed sum {decayed}");

        // Independent route: mass propagation absorbs strictly less than
        // the six votes contributed.
        let sg = preprocess(&half).unwrap();
        let pushed = crate::oracle::oracle_tally(&sg, 1e-10).unwrap();
        let absorbed: f64 = sg
            .node_order()
            .iter()
            .zip(&pushed)
            .filter(|(id, _)| sg.graph().is_voter(id))
            .map(|(_, &v)| v)
            .sum();
        assert!((absorbed - decayed).abs() < 1e-8);
    }

    #[test]
    fn decay_is_monotone_in_beta() {
        let g = samples::demo_graph();
        let lo = tally(&apply_decay(&g, DecayConfig::new(0.3).unwrap()));
        let hi = tally(&apply_decay(&g, DecayConfig::new(0.8).unwrap()));
        for (voter, votes) in &lo {
            assert!(*votes <= hi[voter] + 1e-12, "{voter}");
        }
    }

    #[test]
    fn reweighting_changes_downstream_tallies() {
        let g = samples::demo_graph();
        let weights: BTreeMap<(NodeId, NodeId), f64> =
            [((id("H"), id("I")), 0.9), ((id("H"), id("J")), 0.1)]
                .into_iter()
                .collect();
        let reweighted = with_explicit_weights(&g, &weights).unwrap();
        assert!(validate(&reweighted).is_ok());
        let sg = preprocess(&reweighted).unwrap();
        let s = solve(&sg, &SolveConfig::default()).unwrap().s;
        // H is unchanged (1 + G = 2); I now receives 0.9 of it.
        let i = s[sg.index_of(&id("I")).unwrap()];
        assert!((i - (1.0 + 0.9 * 2.0)).abs() < 1e-9, "I = {i}");
        let j = s[sg.index_of(&id("J")).unwrap()];
        assert!((j - 1.2).abs() < 1e-9);
    }

    #[test]
    fn reweighting_to_equal_split_reproduces_tallies() {
        let g = samples::demo_graph();
        let weights: BTreeMap<(NodeId, NodeId), f64> = g
            .edges()
            .iter()
            .map(|e| ((e.from.clone(), e.to.clone()), e.weight))
            .collect();
        let reweighted = with_explicit_weights(&g, &weights).unwrap();
        assert_eq!(reweighted.weight_mode(), WeightMode::Explicit);
        let original = tally(&g);
        let explicit = tally(&reweighted);
        for (voter, votes) in &original {
            assert!((votes - explicit[voter]).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_sum_rejected() {
        let g = build_graph(
            vec![(id("a"), false), (id("b"), true), (id("c"), true)],
            vec![EdgeSpec::new("a", "b"), EdgeSpec::new("a", "c")],
        )
        .unwrap();
        let weights: BTreeMap<(NodeId, NodeId), f64> =
            [((id("a"), id("b")), 0.51), ((id("a"), id("c")), 0.5)]
                .into_iter()
                .collect();
        let err = with_explicit_weights(&g, &weights).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::WeightSumExceedsOne && i.element == "a"));
    }

    #[test]
    fn unknown_edge_rejected() {
        let g = build_graph(
            vec![(id("a"), false), (id("b"), true)],
            vec![EdgeSpec::new("a", "b")],
        )
        .unwrap();
        let weights: BTreeMap<(NodeId, NodeId), f64> =
            [((id("b"), id("a")), 0.5)].into_iter().collect();
        let err = with_explicit_weights(&g, &weights).unwrap_err();
        assert!(err.errors.iter().any(|i| i.code == IssueCode::UnknownEdge));
    }

    #[test]
    fn partial_coverage_of_a_source_rejected() {
        let g = build_graph(
            vec![(id("a"), false), (id("b"), true), (id("c"), true)],
            vec![EdgeSpec::new("a", "b"), EdgeSpec::new("a", "c")],
        )
        .unwrap();
        let weights: BTreeMap<(NodeId, NodeId), f64> =
            [((id("a"), id("b")), 0.4)].into_iter().collect();
        let err = with_explicit_weights(&g, &weights).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::MixedWeightMode));
    }

    #[test]
    fn decay_composes_with_explicit_weights() {
        let g = build_graph(
            vec![(id("a"), false), (id("b"), true), (id("c"), true)],
            vec![EdgeSpec::new("a", "b"), EdgeSpec::new("a", "c")],
        )
        .unwrap();
        let weights: BTreeMap<(NodeId, NodeId), f64> =
            [((id("a"), id("b")), 0.8), ((id("a"), id("c")), 0.2)]
                .into_iter()
                .collect();
        let reweighted = with_explicit_weights(&g, &weights).unwrap();
        let decayed = apply_decay(&reweighted, DecayConfig::new(0.5).unwrap());
        let tallies = tally(&decayed);
        assert!((tallies[&id("b")] - 1.4).abs() < 1e-12);
        assert!((tallies[&id("c")] - 1.1).abs() < 1e-12);
    }
}
