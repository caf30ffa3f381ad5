//! Delegation graph model: nodes, weighted delegation edges, validation.
//!
//! A [`DelegationGraph`] is immutable once built. [`build_graph`] is the only
//! public path that establishes the invariants; [`validate`] re-checks them
//! on any graph (useful for graphs assembled through
//! [`DelegationGraph::from_parts_unchecked`], e.g. in diagnostics or tests).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Tolerance for "outgoing weights sum to 1" checks. Sums above `1 + EPS`
/// are errors, sums below `1 - EPS` are decay warnings.
pub const WEIGHT_SUM_EPS: f64 = 1e-9;

/// Opaque node identifier: a nonempty string, unique within a graph.
/// Ordering and equality are exact byte comparisons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// A participant: either casts a ballot themselves (`is_voter`) or only
/// delegates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub is_voter: bool,
}

/// A directed delegation carrying `weight` of the sender's vote,
/// `0 < weight <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delegation {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: f64,
}

/// How edge weights were assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    /// Every node's vote is split equally over its out-edges: each weight is
    /// exactly `1/outdegree`.
    EqualSplit,
    /// Weights were supplied by the caller; per-source sums are in `(0, 1]`
    /// (sums below 1 signal intentional decay or waste).
    Explicit,
}

/// Edge input for [`build_graph`]: `weight = None` requests equal split.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: Option<f64>,
}

impl EdgeSpec {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Self {
        EdgeSpec {
            from: from.into(),
            to: to.into(),
            weight: None,
        }
    }

    pub fn weighted(from: impl Into<NodeId>, to: impl Into<NodeId>, weight: f64) -> Self {
        EdgeSpec {
            from: from.into(),
            to: to.into(),
            weight: Some(weight),
        }
    }
}

/// Machine-readable issue codes. Serialized in SCREAMING_SNAKE_CASE, which is
/// also the wire format used by the CLI's `check` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    InvalidNodeId,
    DuplicateNode,
    DuplicateEdge,
    SelfLoop,
    UnknownEndpoint,
    UnknownEdge,
    WeightOutOfRange,
    WeightSumExceedsOne,
    WeightSumBelowOne,
    MixedWeightMode,
    PartialWaste,
}

/// One validation finding, naming the offending node or edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    /// The offending element: a node id, or an edge rendered `from->to`.
    pub element: String,
    pub message: String,
}

impl Issue {
    fn node(code: IssueCode, id: &NodeId, message: impl Into<String>) -> Self {
        Issue {
            code,
            element: id.to_string(),
            message: message.into(),
        }
    }

    fn edge(code: IssueCode, from: &NodeId, to: &NodeId, message: impl Into<String>) -> Self {
        Issue {
            code,
            element: format!("{from}->{to}"),
            message: message.into(),
        }
    }
}

/// Validation outcome. Empty `errors` if and only if the graph satisfies
/// every structural invariant; `warnings` flag legal but lossy situations
/// (decay, partial waste).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.errors.is_empty() {
            write!(f, "ok ({} warnings)", self.warnings.len())
        } else {
            let lines: Vec<String> = self
                .errors
                .iter()
                .map(|e| format!("{:?}({}): {}", e.code, e.element, e.message))
                .collect();
            f.write_str(&lines.join("; "))
        }
    }
}

/// An immutable multi-proxy delegation graph.
///
/// Nodes are kept sorted by id and edges by `(from, to)`, so equality is
/// independent of input order and all downstream iteration is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegationGraph {
    nodes: Vec<Node>,
    edges: Vec<Delegation>,
    weight_mode: WeightMode,
}

impl DelegationGraph {
    /// Assembles a graph without running validation. The parts are sorted
    /// into canonical order but invariants are *not* checked; intended for
    /// diagnostics and tests that need to hold an invalid or un-preprocessed
    /// graph. Use [`build_graph`] for real inputs.
    pub fn from_parts_unchecked(
        mut nodes: Vec<Node>,
        mut edges: Vec<Delegation>,
        weight_mode: WeightMode,
    ) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        DelegationGraph {
            nodes,
            edges,
            weight_mode,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Delegation] {
        &self.edges
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes
            .binary_search_by(|n| n.id.cmp(id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn is_voter(&self, id: &NodeId) -> bool {
        self.node(id).map(|n| n.is_voter).unwrap_or(false)
    }

    pub fn voters(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_voter)
    }

    pub fn voter_count(&self) -> usize {
        self.voters().count()
    }

    pub fn out_degree(&self, id: &NodeId) -> usize {
        self.edges.iter().filter(|e| &e.from == id).count()
    }

    /// Out-edges grouped by source, in canonical order.
    pub(crate) fn edges_by_source(&self) -> BTreeMap<&NodeId, Vec<&Delegation>> {
        let mut map: BTreeMap<&NodeId, Vec<&Delegation>> = BTreeMap::new();
        for e in &self.edges {
            map.entry(&e.from).or_default().push(e);
        }
        map
    }
}

/// Builds a validated delegation graph.
///
/// When no edge supplies a weight the graph is [`WeightMode::EqualSplit`] and
/// every edge gets weight `1/outdegree(from)`. If any edge supplies a weight
/// the graph is [`WeightMode::Explicit`]; sources whose edges carry no weight
/// still get the equal split, but mixing weighted and unweighted edges from
/// the *same* source is rejected.
pub fn build_graph(
    nodes: Vec<(NodeId, bool)>,
    edges: Vec<EdgeSpec>,
) -> Result<DelegationGraph, ValidationReport> {
    let mut report = ValidationReport::default();

    let mut seen: HashSet<&NodeId> = HashSet::new();
    for (id, _) in &nodes {
        if id.as_str().is_empty() {
            report.errors.push(Issue::node(
                IssueCode::InvalidNodeId,
                id,
                "node id must be a nonempty string",
            ));
        }
        if !seen.insert(id) {
            report.errors.push(Issue::node(
                IssueCode::DuplicateNode,
                id,
                format!("node {id} declared more than once"),
            ));
        }
    }

    let ids: HashSet<&NodeId> = nodes.iter().map(|(id, _)| id).collect();
    let mut seen_edges: HashSet<(&NodeId, &NodeId)> = HashSet::new();
    for e in &edges {
        for endpoint in [&e.from, &e.to] {
            if !ids.contains(endpoint) {
                report.errors.push(Issue::edge(
                    IssueCode::UnknownEndpoint,
                    &e.from,
                    &e.to,
                    format!("edge names undeclared node {endpoint}"),
                ));
            }
        }
        if e.from == e.to {
            report.errors.push(Issue::node(
                IssueCode::SelfLoop,
                &e.from,
                format!("{} delegates to itself", e.from),
            ));
        }
        if !seen_edges.insert((&e.from, &e.to)) {
            report.errors.push(Issue::edge(
                IssueCode::DuplicateEdge,
                &e.from,
                &e.to,
                format!("duplicate delegation {} -> {}", e.from, e.to),
            ));
        }
        if let Some(w) = e.weight {
            if !(w > 0.0 && w <= 1.0) {
                report.errors.push(Issue::edge(
                    IssueCode::WeightOutOfRange,
                    &e.from,
                    &e.to,
                    format!("weight {w} outside (0, 1]"),
                ));
            }
        }
    }

    // Per-source weight-mode consistency and sums.
    let mut by_source: BTreeMap<&NodeId, Vec<&EdgeSpec>> = BTreeMap::new();
    for e in &edges {
        by_source.entry(&e.from).or_default().push(e);
    }
    let any_weighted = edges.iter().any(|e| e.weight.is_some());
    for (source, out) in &by_source {
        let weighted = out.iter().filter(|e| e.weight.is_some()).count();
        if weighted > 0 && weighted < out.len() {
            report.errors.push(Issue::node(
                IssueCode::MixedWeightMode,
                source,
                format!("{source} mixes weighted and unweighted delegations"),
            ));
            continue;
        }
        if weighted == out.len() && weighted > 0 {
            let sum: f64 = out.iter().filter_map(|e| e.weight).sum();
            if sum > 1.0 + WEIGHT_SUM_EPS {
                report.errors.push(Issue::node(
                    IssueCode::WeightSumExceedsOne,
                    source,
                    format!("outgoing weights of {source} sum to {sum}, exceeding 1"),
                ));
            } else if sum < 1.0 - WEIGHT_SUM_EPS && sum > 0.0 {
                report.warnings.push(Issue::node(
                    IssueCode::WeightSumBelowOne,
                    source,
                    format!("outgoing weights of {source} sum to {sum}; the remainder decays"),
                ));
            }
        }
    }

    if !report.errors.is_empty() {
        return Err(report);
    }

    let out_degree: HashMap<&NodeId, usize> =
        by_source.iter().map(|(s, out)| (*s, out.len())).collect();
    let resolved: Vec<Delegation> = edges
        .iter()
        .map(|e| Delegation {
            from: e.from.clone(),
            to: e.to.clone(),
            weight: e.weight.unwrap_or_else(|| 1.0 / out_degree[&e.from] as f64),
        })
        .collect();

    let nodes: Vec<Node> = nodes
        .into_iter()
        .map(|(id, is_voter)| Node { id, is_voter })
        .collect();
    let mode = if any_weighted {
        WeightMode::Explicit
    } else {
        WeightMode::EqualSplit
    };
    Ok(DelegationGraph::from_parts_unchecked(nodes, resolved, mode))
}

/// Checks every structural invariant and reports all violations.
///
/// Idempotent and pure; graphs produced by [`build_graph`] always come back
/// with an empty error list.
pub fn validate(graph: &DelegationGraph) -> ValidationReport {
    let mut report = ValidationReport::default();

    for pair in graph.nodes.windows(2) {
        if pair[0].id == pair[1].id {
            report.errors.push(Issue::node(
                IssueCode::DuplicateNode,
                &pair[0].id,
                format!("node {} declared more than once", pair[0].id),
            ));
        }
    }
    for n in &graph.nodes {
        if n.id.as_str().is_empty() {
            report.errors.push(Issue::node(
                IssueCode::InvalidNodeId,
                &n.id,
                "node id must be a nonempty string",
            ));
        }
    }

    let ids: HashSet<&NodeId> = graph.nodes.iter().map(|n| &n.id).collect();
    for pair in graph.edges.windows(2) {
        if pair[0].from == pair[1].from && pair[0].to == pair[1].to {
            report.errors.push(Issue::edge(
                IssueCode::DuplicateEdge,
                &pair[0].from,
                &pair[0].to,
                format!("duplicate delegation {} -> {}", pair[0].from, pair[0].to),
            ));
        }
    }
    for e in &graph.edges {
        for endpoint in [&e.from, &e.to] {
            if !ids.contains(endpoint) {
                report.errors.push(Issue::edge(
                    IssueCode::UnknownEndpoint,
                    &e.from,
                    &e.to,
                    format!("edge names undeclared node {endpoint}"),
                ));
            }
        }
        if e.from == e.to {
            report.errors.push(Issue::node(
                IssueCode::SelfLoop,
                &e.from,
                format!("{} delegates to itself", e.from),
            ));
        }
        if !(e.weight > 0.0 && e.weight <= 1.0) {
            report.errors.push(Issue::edge(
                IssueCode::WeightOutOfRange,
                &e.from,
                &e.to,
                format!("weight {} outside (0, 1]", e.weight),
            ));
        }
    }

    for (source, out) in graph.edges_by_source() {
        match graph.weight_mode {
            WeightMode::EqualSplit => {
                let expected = 1.0 / out.len() as f64;
                for e in &out {
                    // Exact equality is intended: equal-split weights are
                    // computed as 1/d, not accumulated.
                    if e.weight != expected {
                        report.errors.push(Issue::edge(
                            IssueCode::WeightOutOfRange,
                            &e.from,
                            &e.to,
                            format!("equal-split weight must be {expected}, found {}", e.weight),
                        ));
                    }
                }
            }
            WeightMode::Explicit => {
                let sum: f64 = out.iter().map(|e| e.weight).sum();
                if sum > 1.0 + WEIGHT_SUM_EPS {
                    report.errors.push(Issue::node(
                        IssueCode::WeightSumExceedsOne,
                        source,
                        format!("outgoing weights of {source} sum to {sum}, exceeding 1"),
                    ));
                } else if sum < 1.0 - WEIGHT_SUM_EPS {
                    report.warnings.push(Issue::node(
                        IssueCode::WeightSumBelowOne,
                        source,
                        format!("outgoing weights of {source} sum to {sum}; the remainder decays"),
                    ));
                }
            }
        }
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    #[test]
    fn equal_split_weights_follow_outdegree() {
        let g = samples::demo_graph();
        assert_eq!(g.weight_mode(), WeightMode::EqualSplit);
        let h_edges: Vec<&Delegation> = g.edges().iter().filter(|e| e.from == id("H")).collect();
        assert_eq!(h_edges.len(), 2);
        for e in h_edges {
            assert_eq!(e.weight, 0.5);
        }
        let i_edges: Vec<&Delegation> = g.edges().iter().filter(|e| e.from == id("I")).collect();
        assert_eq!(i_edges.len(), 3);
        for e in i_edges {
            assert_eq!(e.weight, 1.0 / 3.0);
        }
    }

    #[test]
    fn single_voter_no_edges() {
        let g = build_graph(vec![(id("A"), true)], vec![]).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.edges().len(), 0);
        assert_eq!(g.weight_mode(), WeightMode::EqualSplit);
    }

    #[test]
    fn self_loop_rejected() {
        let err = build_graph(vec![(id("A"), true)], vec![EdgeSpec::new("A", "A")]).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::SelfLoop && i.element == "A"));
    }

    #[test]
    fn empty_node_id_rejected() {
        let err = build_graph(vec![(id(""), true)], vec![]).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::InvalidNodeId));
    }

    #[test]
    fn duplicate_node_rejected() {
        let err = build_graph(vec![(id("A"), true), (id("A"), false)], vec![]).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::DuplicateNode));
    }

    #[test]
    fn duplicate_edge_rejected() {
        let err = build_graph(
            vec![(id("A"), false), (id("B"), true)],
            vec![EdgeSpec::new("A", "B"), EdgeSpec::new("A", "B")],
        )
        .unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::DuplicateEdge));
    }

    #[test]
    fn unknown_endpoint_rejected() {
        let err = build_graph(vec![(id("A"), false)], vec![EdgeSpec::new("A", "Z")]).unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::UnknownEndpoint && i.element == "A->Z"));
    }

    #[test]
    fn weight_out_of_range_rejected() {
        for w in [0.0, -0.5, 1.5, f64::NAN] {
            let err = build_graph(
                vec![(id("A"), false), (id("B"), true)],
                vec![EdgeSpec::weighted("A", "B", w)],
            )
            .unwrap_err();
            assert!(
                err.errors
                    .iter()
                    .any(|i| i.code == IssueCode::WeightOutOfRange),
                "weight {w} should be out of range"
            );
        }
    }

    #[test]
    fn explicit_sum_above_one_rejected() {
        let err = build_graph(
            vec![(id("T"), false), (id("U"), true), (id("V"), true)],
            vec![
                EdgeSpec::weighted("T", "U", 0.7),
                EdgeSpec::weighted("T", "V", 0.5),
            ],
        )
        .unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::WeightSumExceedsOne && i.element == "T"));
    }

    #[test]
    fn explicit_sum_below_one_is_warning_only() {
        let g = build_graph(
            vec![(id("T"), false), (id("U"), true), (id("V"), true)],
            vec![
                EdgeSpec::weighted("T", "U", 0.5),
                EdgeSpec::weighted("T", "V", 0.3),
            ],
        )
        .unwrap();
        let report = validate(&g);
        assert!(report.is_ok());
        assert!(report
            .warnings
            .iter()
            .any(|i| i.code == IssueCode::WeightSumBelowOne && i.element == "T"));
    }

    #[test]
    fn mixed_weight_mode_same_source_rejected() {
        let err = build_graph(
            vec![(id("A"), false), (id("B"), true), (id("C"), true)],
            vec![EdgeSpec::weighted("A", "B", 0.5), EdgeSpec::new("A", "C")],
        )
        .unwrap_err();
        assert!(err
            .errors
            .iter()
            .any(|i| i.code == IssueCode::MixedWeightMode && i.element == "A"));
    }

    #[test]
    fn mixed_weight_mode_across_sources_allowed() {
        let g = build_graph(
            vec![(id("A"), false), (id("B"), false), (id("C"), true)],
            vec![EdgeSpec::weighted("A", "C", 1.0), EdgeSpec::new("B", "C")],
        )
        .unwrap();
        assert_eq!(g.weight_mode(), WeightMode::Explicit);
        assert!(validate(&g).is_ok());
        // B's unweighted edge got the equal split.
        assert_eq!(
            g.edges().iter().find(|e| e.from == id("B")).unwrap().weight,
            1.0
        );
    }

    #[test]
    fn graph_equality_is_order_independent() {
        let a = build_graph(
            vec![(id("A"), true), (id("B"), false), (id("C"), false)],
            vec![EdgeSpec::new("B", "A"), EdgeSpec::new("C", "A")],
        )
        .unwrap();
        let b = build_graph(
            vec![(id("C"), false), (id("A"), true), (id("B"), false)],
            vec![EdgeSpec::new("C", "A"), EdgeSpec::new("B", "A")],
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn demo_graph_validates_clean() {
        let report = validate(&samples::demo_graph());
        assert!(report.is_ok(), "{report}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn validate_flags_hand_built_sum_violation() {
        // from_parts_unchecked lets us hold a graph build_graph would reject.
        let g = DelegationGraph::from_parts_unchecked(
            vec![
                Node {
                    id: id("T"),
                    is_voter: false,
                },
                Node {
                    id: id("U"),
                    is_voter: true,
                },
                Node {
                    id: id("V"),
                    is_voter: true,
                },
            ],
            vec![
                Delegation {
                    from: id("T"),
                    to: id("U"),
                    weight: 0.7,
                },
                Delegation {
                    from: id("T"),
                    to: id("V"),
                    weight: 0.5,
                },
            ],
            WeightMode::Explicit,
        );
        let report = validate(&g);
        assert!(report
            .errors
            .iter()
            .any(|i| i.code == IssueCode::WeightSumExceedsOne && i.element == "T"));
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        /// Node/edge inputs drawn from a small id universe so duplicates,
        /// self-loops and unknown endpoints all occur.
        fn arb_input() -> impl Strategy<Value = (Vec<(NodeId, bool)>, Vec<EdgeSpec>)> {
            let node = (0u8..12, any::<bool>())
                .prop_map(|(i, v)| (NodeId::from(format!("n{i}").as_str()), v));
            let edge = (0u8..14, 0u8..14)
                .prop_map(|(a, b)| EdgeSpec::new(format!("n{a}"), format!("n{b}")));
            (
                proptest::collection::vec(node, 1..12),
                proptest::collection::vec(edge, 0..20),
            )
        }

        proptest! {
            #[test]
            fn build_then_validate_round_trip((nodes, edges) in arb_input()) {
                if let Ok(g) = build_graph(nodes, edges) {
                    let report = validate(&g);
                    prop_assert!(report.is_ok(), "{}", report);
                }
            }
        }
    }
}
