//! Resolution engine for multi-proxy transitive vote delegation.
//!
//! People either vote themselves or split their vote, in any proportions,
//! across several delegates; delegations chain transitively and may form
//! cycles. This crate computes the final vote weight of every actual voter
//! by casting the delegation graph as a sparse linear system `B·S = J` with
//! `B = I − A`, where `A[i][k]` holds the weight of the delegation `k → i`:
//!
//! 1. [`graph`] — build and validate the delegation graph (equal-split or
//!    explicit weights).
//! 2. [`preprocess`](mod@crate::preprocess) — strip voter out-edges, prune
//!    nodes whose vote cannot reach any voter.
//! 3. [`solver`] — solve the system directly (dense elimination) or by the
//!    fixed-point iteration `S ← J + A·S`; both routes provably agree.
//! 4. [`attribution`] — per-source contribution rows (one transpose solve
//!    per voter) and what-if tallies for non-voters.
//! 5. [`extensions`] — trust decay and user-chosen weight splits.
//!
//! [`oracle`] holds an independent brute-force mass-propagation tally used
//! to cross-check the solvers, [`exact`] an exact-rational path for
//! adjudicating disputed values, [`formats`] the JSON/EDGELIST/DOT codecs,
//! and [`pipeline`] the end-to-end runs behind the CLI and the browser demo.
//!
//! ```
//! use delegraph::{build_graph, preprocess, solve, EdgeSpec, NodeId, SolveConfig};
//!
//! let graph = build_graph(
//!     vec![(NodeId::from("ann"), true), (NodeId::from("bob"), false)],
//!     vec![EdgeSpec::new("bob", "ann")],
//! )
//! .expect("valid graph");
//!
//! let simplified = preprocess(&graph)?;
//! let tally = solve(&simplified, &SolveConfig::default())?;
//! assert_eq!(tally.voter_tallies[&NodeId::from("ann")], 2.0);
//! # Ok::<(), delegraph::Error>(())
//! ```

pub mod attribution;
pub mod dense;
pub mod error;
pub mod exact;
pub mod extensions;
pub mod formats;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod preprocess;
pub mod samples;
pub mod solver;
pub mod sparse;

pub use attribution::{
    attribution_for_voter, full_attribution_matrix, hypothetical_tally, AttributionVector,
};
pub use error::{Error, Result};
pub use extensions::{apply_decay, with_explicit_weights, DecayConfig};
pub use graph::{
    build_graph, validate, Delegation, DelegationGraph, EdgeSpec, Node, NodeId, ValidationReport,
    WeightMode,
};
pub use preprocess::{preprocess, prune_unreachable, strip_voter_edges, SimplifiedGraph};
pub use solver::{
    build_system, solve, solve_direct, solve_neumann, LinearSystem, MethodChoice, SolveConfig,
    SolveMethod, TallyResult,
};
