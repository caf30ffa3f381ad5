//! Brute-force reference tally: explicit vote-mass pushing over edge lists.
//!
//! Deliberately shares no machinery with the solver module (no CSR, no
//! matvec, no elimination): each round, every non-voter pushes
//! `weight × residual` along each of its out-edges and voters absorb, which
//! evaluates the truncated series `Σ_{m=0..steps} Aᵐ·J` term by term. Used
//! to generate expected values and to property-test the solvers; agreement
//! between the two is evidence, not tautology.

use crate::error::{Error, Result};
use crate::preprocess::SimplifiedGraph;

/// Cap for [`oracle_tally`]'s doubling schedule.
const MAX_ORACLE_STEPS: usize = 1 << 20;

/// Accumulated votes per node (in node order) after `steps` delegation
/// rounds: own vote plus everything that passed through.
pub fn propagate_steps(sg: &SimplifiedGraph, steps: usize) -> Vec<f64> {
    let n = sg.len();
    let edges: Vec<(usize, usize, f64)> = sg
        .graph()
        .edges()
        .iter()
        .map(|e| {
            (
                sg.index_of(&e.from).expect("edge endpoint in node order"),
                sg.index_of(&e.to).expect("edge endpoint in node order"),
                e.weight,
            )
        })
        .collect();
    let voter: Vec<bool> = sg
        .node_order()
        .iter()
        .map(|id| sg.graph().is_voter(id))
        .collect();

    // Everyone starts holding their own vote.
    let mut residual = vec![1.0; n];
    let mut total = vec![1.0; n];
    for _ in 0..steps {
        let mut arriving = vec![0.0; n];
        for &(from, to, weight) in &edges {
            if !voter[from] {
                arriving[to] += weight * residual[from];
            }
        }
        for i in 0..n {
            total[i] += arriving[i];
        }
        residual = arriving;
    }
    total
}

/// Runs [`propagate_steps`] with doubling step counts until two successive
/// results agree within `tol` in max norm. Mass that never drains (a
/// voterless cycle fed in without preprocessing) is reported as
/// [`Error::NoConvergence`].
pub fn oracle_tally(sg: &SimplifiedGraph, tol: f64) -> Result<Vec<f64>> {
    let mut steps = 1;
    let mut prev = propagate_steps(sg, steps);
    while steps <= MAX_ORACLE_STEPS {
        steps *= 2;
        let cur = propagate_steps(sg, steps);
        let diff = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence { iterations: steps })
}
