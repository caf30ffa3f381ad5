//! Sample graphs used by the docs, the test suites, and the browser demo.

use crate::graph::{build_graph, DelegationGraph, EdgeSpec, NodeId};

/// The 25-person demo network (nodes `A`..`Y`, unweighted edges).
///
/// Twelve people vote themselves; the rest delegate, with cross-delegations,
/// 2-cycles, a larger cycle through `O`-`P`-`Q`, a dense 6-clique block
/// `T`..`Y`, and one person (`B`) who receives a delegation but neither votes
/// nor delegates onward. It exercises every difficulty the engine handles and
/// is shipped as `fixtures/demo25.json` / `fixtures/demo25.edges`.
pub fn demo_graph() -> DelegationGraph {
    let voters = ["A", "D", "E", "F", "K", "L", "M", "N", "R", "S", "X", "Y"];
    let all = [
        "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L", "M", "N", "O", "P", "Q", "R",
        "S", "T", "U", "V", "W", "X", "Y",
    ];
    let nodes: Vec<(NodeId, bool)> = all
        .iter()
        .map(|s| (NodeId::from(*s), voters.contains(s)))
        .collect();

    let mut edges: Vec<EdgeSpec> = vec![
        EdgeSpec::new("A", "B"),
        EdgeSpec::new("C", "D"),
        EdgeSpec::new("D", "C"),
        EdgeSpec::new("E", "F"),
        EdgeSpec::new("F", "E"),
        EdgeSpec::new("G", "H"),
        EdgeSpec::new("H", "I"),
        EdgeSpec::new("H", "J"),
        EdgeSpec::new("I", "K"),
        EdgeSpec::new("I", "L"),
        EdgeSpec::new("I", "M"),
        EdgeSpec::new("J", "N"),
        EdgeSpec::new("J", "M"),
        EdgeSpec::new("O", "P"),
        EdgeSpec::new("P", "Q"),
        EdgeSpec::new("P", "R"),
        EdgeSpec::new("Q", "O"),
        EdgeSpec::new("Q", "S"),
    ];
    // The T..Y block: everyone delegates to everyone else.
    let block = ["T", "U", "V", "W", "X", "Y"];
    for from in block {
        for to in block {
            if from != to {
                edges.push(EdgeSpec::new(from, to));
            }
        }
    }

    build_graph(nodes, edges).expect("demo graph is well-formed")
}
