//! Linear-system formulation of the tally and its two solvers.
//!
//! Over the simplified graph's node order, the delegation matrix `A` has
//! `A[i][k] = weight of the delegation k -> i`. Everyone contributes one
//! intrinsic vote (`J = 1`), and the tally vector `S` satisfies
//! `S = J + A·S`, i.e. `B·S = J` with `B = I - A`.
//!
//! Two independent routes produce `S`:
//! * direct Gaussian elimination with partial pivoting on a dense copy of
//!   `B` ([`solve_direct`]), and
//! * the fixed-point iteration `S ← J + A·S` ([`solve_neumann`]), which sums
//!   the series `Σ Aᵐ·J` and converges because preprocessing guarantees all
//!   vote mass drains into absorbing voters.
//!
//! `B` is never materialized as an inverse; the iterative path stores only
//! the `O(edges)` CSR form of `A`.

use std::collections::BTreeMap;

use crate::dense::LuFactors;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::preprocess::SimplifiedGraph;
use crate::sparse::CsrMatrix;

/// Sparse delegation matrix `A` over a fixed node order:
/// `A[i][k] = weight(k -> i)`; voter columns are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DelegationMatrix {
    csr: CsrMatrix,
}

impl DelegationMatrix {
    pub fn from_simplified(sg: &SimplifiedGraph) -> Self {
        let n = sg.len();
        let triplets: Vec<(usize, usize, f64)> = sg
            .graph()
            .edges()
            .iter()
            .map(|e| {
                let from = sg.index_of(&e.from).expect("edge endpoint in node order");
                let to = sg.index_of(&e.to).expect("edge endpoint in node order");
                (to, from, e.weight)
            })
            .collect();
        DelegationMatrix {
            csr: CsrMatrix::from_triplets(n, n, &triplets),
        }
    }

    pub fn n(&self) -> usize {
        self.csr.n_rows()
    }

    /// Number of stored entries; equals the retained edge count.
    pub fn stored_entries(&self) -> usize {
        self.csr.nnz()
    }

    /// `A[receiver][sender]`.
    pub fn get(&self, receiver: usize, sender: usize) -> f64 {
        self.csr.get(receiver, sender)
    }

    /// `y = A·x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.csr.mul_vec(x, y);
    }

    pub fn transpose(&self) -> DelegationMatrix {
        DelegationMatrix {
            csr: self.csr.transpose(),
        }
    }

    /// Dense row-major `B = I - A`; used only by the direct path.
    pub fn to_dense_b(&self) -> Vec<f64> {
        let n = self.n();
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            b[i * n + i] = 1.0;
        }
        for r in 0..n {
            for (c, v) in self.csr.row(r) {
                b[r * n + c] -= v;
            }
        }
        b
    }
}

/// The assembled system `B·S = J` plus the bookkeeping needed to label the
/// solution (node order, voter flags, prune info).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: DelegationMatrix,
    node_order: Vec<NodeId>,
    voter: Vec<bool>,
    wasted: Vec<NodeId>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.node_order.len()
    }

    pub fn matrix(&self) -> &DelegationMatrix {
        &self.a
    }

    pub fn node_order(&self) -> &[NodeId] {
        &self.node_order
    }

    pub fn is_voter(&self, idx: usize) -> bool {
        self.voter[idx]
    }

    /// `B[row][col]`, i.e. `I - A`.
    pub fn b_entry(&self, row: usize, col: usize) -> f64 {
        let diag = if row == col { 1.0 } else { 0.0 };
        diag - self.a.get(row, col)
    }

    /// The all-ones right-hand side `J`.
    pub fn rhs(&self) -> Vec<f64> {
        vec![1.0; self.n()]
    }

    /// `‖B·s − J‖∞ = ‖(J + A·s) − s‖∞`.
    pub fn residual(&self, s: &[f64]) -> f64 {
        let mut next = vec![0.0; self.n()];
        self.a.apply(s, &mut next);
        s.iter()
            .zip(&next)
            .map(|(si, ni)| (1.0 + ni - si).abs())
            .fold(0.0, f64::max)
    }

    fn tally(&self, s: Vec<f64>, method: SolveMethod, iterations: usize) -> TallyResult {
        let residual = self.residual(&s);
        let voter_tallies = self
            .node_order
            .iter()
            .zip(&s)
            .zip(&self.voter)
            .filter(|(_, &is_voter)| is_voter)
            .map(|((id, &votes), _)| (id.clone(), votes))
            .collect();
        TallyResult {
            s,
            voter_tallies,
            wasted: self.wasted.clone(),
            method,
            iterations,
            residual,
        }
    }
}

/// Which route produced a tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    Neumann,
}

/// Solver selection for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    /// Direct up to [`SolveConfig::dense_threshold`], Neumann beyond.
    #[default]
    Auto,
    Direct,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub method: MethodChoice,
    /// Max-norm tolerance for the iterative path.
    pub tol: f64,
    /// Iteration cap; `None` means `10·n + 1000`.
    pub max_iter: Option<usize>,
    /// Largest `n` the auto selector will hand to the dense direct path.
    pub dense_threshold: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            method: MethodChoice::Auto,
            tol: 1e-10,
            max_iter: None,
            dense_threshold: 2000,
        }
    }
}

impl SolveConfig {
    pub fn effective_max_iter(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n + 1000)
    }
}

/// Solution of the system: votes per retained node.
///
/// `s[i] >= 1` for every retained node (everyone keeps their own vote in
/// this accounting); only the voter entries are final counts, exposed as
/// `voter_tallies`.
#[derive(Debug, Clone, PartialEq)]
pub struct TallyResult {
    /// Raw solution over the node order, voters and non-voters alike.
    pub s: Vec<f64>,
    /// Final vote counts, voters only.
    pub voter_tallies: BTreeMap<NodeId, f64>,
    /// Nodes pruned during preprocessing; their votes were wasted.
    pub wasted: Vec<NodeId>,
    pub method: SolveMethod,
    /// Neumann steps taken; 0 for the direct path.
    pub iterations: usize,
    /// `‖B·S − J‖∞`, always computed for audit.
    pub residual: f64,
}

/// Assembles `B·S = J` from a simplified graph. Row/column order is the
/// graph's `node_order`.
pub fn build_system(sg: &SimplifiedGraph) -> LinearSystem {
    let a = DelegationMatrix::from_simplified(sg);
    let voter: Vec<bool> = sg
        .node_order()
        .iter()
        .map(|id| sg.graph().is_voter(id))
        .collect();
    LinearSystem {
        a,
        node_order: sg.node_order().to_vec(),
        voter,
        wasted: sg.report().removed_nodes.iter().cloned().collect(),
    }
}

/// Direct route: Gaussian elimination with partial pivoting on dense
/// `B = I - A`. Quadratic memory; intended for `n` up to the dense
/// threshold (a few thousand).
pub fn solve_direct(sys: &LinearSystem) -> Result<TallyResult> {
    let lu = LuFactors::factor(sys.a.to_dense_b(), sys.n())?;
    let s = lu.solve(&sys.rhs());
    Ok(sys.tally(s, SolveMethod::Direct, 0))
}

/// Iterative route: `S⁽⁰⁾ = J`, `S⁽ᵐ⁺¹⁾ = J + A·S⁽ᵐ⁾`.
///
/// At each step the update distance `‖(J + A·s) − s‖∞` *is* the residual of
/// the current iterate, so the returned result is certified to satisfy
/// `residual < tol` with no extra pass. Diverging input (a voterless cycle
/// that skipped preprocessing) exhausts `max_iter` and errors.
pub fn solve_neumann(sys: &LinearSystem, tol: f64, max_iter: usize) -> Result<TallyResult> {
    let n = sys.n();
    let mut s = sys.rhs();
    let mut next = vec![0.0; n];
    for iteration in 0..=max_iter {
        sys.a.apply(&s, &mut next);
        let mut diff: f64 = 0.0;
        for i in 0..n {
            next[i] += 1.0;
            diff = diff.max((next[i] - s[i]).abs());
        }
        if diff < tol {
            return Ok(sys.tally(s, SolveMethod::Neumann, iteration));
        }
        std::mem::swap(&mut s, &mut next);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
    })
}

/// Builds the system and solves it, choosing the route per `cfg`.
pub fn solve(sg: &SimplifiedGraph, cfg: &SolveConfig) -> Result<TallyResult> {
    let sys = build_system(sg);
    let use_direct = match cfg.method {
        MethodChoice::Direct => true,
        MethodChoice::Neumann => false,
        MethodChoice::Auto => sys.n() <= cfg.dense_threshold,
    };
    if use_direct {
        solve_direct(&sys)
    } else {
        solve_neumann(&sys, cfg.tol, cfg.effective_max_iter(sys.n()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Delegation, DelegationGraph, EdgeSpec, Node, WeightMode};
    use crate::preprocess::preprocess;
    use crate::samples;

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn demo_system() -> (SimplifiedGraph, LinearSystem) {
        let sg = preprocess(&samples::demo_graph()).unwrap();
        let sys = build_system(&sg);
        (sg, sys)
    }

    /// Exact solution of the demo system, in node order
    /// A,C,D,E,F,G,H,I,J,K,L,M,N,O,P,Q,R,S,T,U,V,W,X,Y.
    pub(crate) fn demo_expected() -> Vec<f64> {
        vec![
            1.0,
            1.0,
            2.0,
            1.0,
            1.0,
            1.0,
            2.0,
            2.0,
            2.0,
            5.0 / 3.0,
            5.0 / 3.0,
            8.0 / 3.0,
            2.0,
            7.0 / 3.0,
            10.0 / 3.0,
            8.0 / 3.0,
            8.0 / 3.0,
            7.0 / 3.0,
            2.5,
            2.5,
            2.5,
            2.5,
            3.0,
            3.0,
        ]
    }

    /// Two non-voters delegating to each other: B is singular, the Neumann
    /// iterates never settle. Only reachable by skipping preprocessing.
    pub(crate) fn voterless_cycle_system() -> LinearSystem {
        let g = DelegationGraph::from_parts_unchecked(
            vec![
                Node {
                    id: id("c"),
                    is_voter: false,
                },
                Node {
                    id: id("d"),
                    is_voter: false,
                },
            ],
            vec![
                Delegation {
                    from: id("c"),
                    to: id("d"),
                    weight: 1.0,
                },
                Delegation {
                    from: id("d"),
                    to: id("c"),
                    weight: 1.0,
                },
            ],
            WeightMode::EqualSplit,
        );
        build_system(&SimplifiedGraph::assume_preprocessed(g))
    }

    #[test]
    fn system_entries_match_hand_transcription() {
        let (sg, sys) = demo_system();
        let idx = |s: &str| sg.index_of(&id(s)).unwrap();
        assert_eq!(sys.b_entry(idx("D"), idx("C")), -1.0);
        assert_eq!(sys.b_entry(idx("I"), idx("H")), -0.5);
        assert_eq!(sys.b_entry(idx("K"), idx("I")), -(1.0 / 3.0));
        assert_eq!(sys.b_entry(idx("T"), idx("U")), -0.2);
        for i in 0..sys.n() {
            assert_eq!(sys.b_entry(i, i), 1.0);
        }
        // Voter columns of A are all zero; non-voter columns sum to <= 1.
        for col in 0..sys.n() {
            let column_sum: f64 = (0..sys.n()).map(|row| sys.matrix().get(row, col)).sum();
            if sys.is_voter(col) {
                assert_eq!(column_sum, 0.0);
            } else {
                assert!(column_sum <= 1.0 + 1e-12, "column {col}: {column_sum}");
            }
        }
        assert_eq!(sys.matrix().stored_entries(), sg.graph().edges().len());
    }

    #[test]
    fn single_voter_system() {
        let g = build_graph(vec![(id("A"), true)], vec![]).unwrap();
        let sg = preprocess(&g).unwrap();
        let sys = build_system(&sg);
        assert_eq!(sys.n(), 1);
        assert_eq!(sys.b_entry(0, 0), 1.0);
        assert_eq!(sys.rhs(), vec![1.0]);
        let res = solve_direct(&sys).unwrap();
        assert_eq!(res.s, vec![1.0]);
    }

    #[test]
    fn two_node_chain_system() {
        let g = build_graph(
            vec![(id("g"), false), (id("h"), true)],
            vec![EdgeSpec::new("g", "h")],
        )
        .unwrap();
        let sys = build_system(&preprocess(&g).unwrap());
        // order (g, h)
        assert_eq!(sys.b_entry(0, 0), 1.0);
        assert_eq!(sys.b_entry(0, 1), 0.0);
        assert_eq!(sys.b_entry(1, 0), -1.0);
        assert_eq!(sys.b_entry(1, 1), 1.0);
    }

    #[test]
    fn direct_solves_demo_exactly() {
        let (_, sys) = demo_system();
        let res = solve_direct(&sys).unwrap();
        assert_eq!(res.method, SolveMethod::Direct);
        assert_eq!(res.iterations, 0);
        assert!(res.residual <= 1e-10);
        for (got, want) in res.s.iter().zip(demo_expected()) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        assert_eq!(res.wasted, vec![id("B")]);
        assert_eq!(res.voter_tallies.len(), 12);
        assert!((res.voter_tallies[&id("X")] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn neumann_agrees_with_direct_on_demo() {
        let (_, sys) = demo_system();
        let direct = solve_direct(&sys).unwrap();
        let neumann = solve_neumann(&sys, 1e-12, 10_000).unwrap();
        assert_eq!(neumann.method, SolveMethod::Neumann);
        assert!(neumann.iterations > 0);
        assert!(neumann.residual < 1e-12);
        for (a, b) in direct.s.iter().zip(&neumann.s) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((neumann.s[22] - 3.0).abs() < 1e-10); // X
    }

    #[test]
    fn neumann_zero_steps_when_rhs_already_solves() {
        // All voters: A = 0, so S = J immediately.
        let g = build_graph(vec![(id("a"), true), (id("b"), true)], vec![]).unwrap();
        let sys = build_system(&preprocess(&g).unwrap());
        let res = solve_neumann(&sys, 1e-10, 100).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.s, vec![1.0, 1.0]);
    }

    #[test]
    fn voterless_cycle_is_singular_for_direct() {
        let sys = voterless_cycle_system();
        assert_eq!(solve_direct(&sys).err(), Some(Error::SingularSystem));
    }

    #[test]
    fn voterless_cycle_never_converges_for_neumann() {
        let sys = voterless_cycle_system();
        assert_eq!(
            solve_neumann(&sys, 1e-10, 500).err(),
            Some(Error::NoConvergence { iterations: 500 })
        );
    }

    #[test]
    fn auto_selection_uses_direct_below_threshold() {
        let sg = preprocess(&samples::demo_graph()).unwrap();
        let res = solve(&sg, &SolveConfig::default()).unwrap();
        assert_eq!(res.method, SolveMethod::Direct);
        let forced = solve(
            &sg,
            &SolveConfig {
                method: MethodChoice::Neumann,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(forced.method, SolveMethod::Neumann);
        for (a, b) in res.s.iter().zip(&forced.s) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn conservation_on_demo() {
        let sg = preprocess(&samples::demo_graph()).unwrap();
        let res = solve(&sg, &SolveConfig::default()).unwrap();
        let total: f64 = res.voter_tallies.values().sum();
        assert!((total - 24.0).abs() < 1e-9, "voter total {total}");
        for &v in &res.s {
            assert!(v >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let sg = preprocess(&samples::demo_graph()).unwrap();
        let cfg = SolveConfig {
            method: MethodChoice::Neumann,
            ..Default::default()
        };
        let a = solve(&sg, &cfg).unwrap();
        let b = solve(&sg, &cfg).unwrap();
        assert_eq!(a.s, b.s); // bit-identical
    }
}
