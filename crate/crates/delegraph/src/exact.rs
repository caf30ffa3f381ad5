//! Exact-rational solving path.
//!
//! Rebuilds the system over `BigRational` and solves it by Gaussian
//! elimination (first-nonzero pivot; magnitude pivoting is pointless in
//! exact arithmetic). Equal-split graphs get exact `1/outdegree` weights;
//! explicit-weight graphs get the exact rational image of the stored float,
//! since there the float is the contract.
//!
//! This path is the adjudicator of last resort for disputed fixture values
//! and backs the CLI's `--exact` output. Desk-scale only.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{NodeId, WeightMode};
use crate::preprocess::SimplifiedGraph;

/// Hard cap on retained nodes for the exact path.
pub const EXACT_NODE_LIMIT: usize = 500;

fn check_size(sg: &SimplifiedGraph) -> Result<()> {
    if sg.len() > EXACT_NODE_LIMIT {
        return Err(Error::TooLarge {
            operation: "exact-rational solve",
            limit: EXACT_NODE_LIMIT,
            actual: sg.len(),
        });
    }
    Ok(())
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact weight of every edge, keyed by `(from, to)` indices in node order.
fn exact_weights(sg: &SimplifiedGraph) -> HashMap<(usize, usize), BigRational> {
    let mut out_degree: Vec<usize> = vec![0; sg.len()];
    if sg.graph().weight_mode() == WeightMode::EqualSplit {
        for e in sg.graph().edges() {
            out_degree[sg.index_of(&e.from).unwrap()] += 1;
        }
    }
    sg.graph()
        .edges()
        .iter()
        .map(|e| {
            let from = sg.index_of(&e.from).unwrap();
            let to = sg.index_of(&e.to).unwrap();
            let w = match sg.graph().weight_mode() {
                WeightMode::EqualSplit => ratio(1, out_degree[from] as i64),
                WeightMode::Explicit => {
                    BigRational::from_float(e.weight).expect("weights are finite")
                }
            };
            ((from, to), w)
        })
        .collect()
}

/// Dense `B = I - A` over rationals, row-major.
fn exact_system(sg: &SimplifiedGraph) -> Vec<Vec<BigRational>> {
    let n = sg.len();
    let mut b = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    for ((from, to), w) in exact_weights(sg) {
        b[to][from] -= w;
    }
    b
}

/// Solves `M·x = rhs` exactly by Gaussian elimination.
fn eliminate(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let (pivot_row, rest) = m[col..].split_first_mut().expect("col < n");
        let (pivot_rhs, rest_rhs) = rhs[col..].split_first_mut().expect("col < n");
        let pivot = pivot_row[col].clone();
        for (row, row_rhs) in rest.iter_mut().zip(rest_rhs) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot;
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= &factor * src;
            }
            *row_rhs -= &factor * &*pivot_rhs;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc -= &m[r][c] * &x[c];
        }
        x[r] = acc / &m[r][r];
    }
    Ok(x)
}

/// Exact tally vector in node order.
pub fn solve_exact(sg: &SimplifiedGraph) -> Result<Vec<BigRational>> {
    check_size(sg)?;
    let b = exact_system(sg);
    let rhs = vec![BigRational::one(); sg.len()];
    eliminate(b, rhs)
}

/// Exact attribution row for `voter`: solves `Bᵀ·y = e_voter`. Zero entries
/// are omitted from the map.
pub fn attribution_exact(
    sg: &SimplifiedGraph,
    voter: &NodeId,
) -> Result<(BTreeMap<NodeId, BigRational>, BigRational)> {
    check_size(sg)?;
    let idx = sg
        .index_of(voter)
        .ok_or_else(|| Error::UnknownNode(voter.clone()))?;
    if !sg.graph().is_voter(voter) {
        return Err(Error::NotAVoter(voter.clone()));
    }
    let n = sg.len();
    let b = exact_system(sg);
    let mut bt = vec![vec![BigRational::zero(); n]; n];
    for (r, row) in b.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            bt[c][r] = v;
        }
    }
    let mut rhs = vec![BigRational::zero(); n];
    rhs[idx] = BigRational::one();
    let y = eliminate(bt, rhs)?;

    let mut total = BigRational::zero();
    let mut contributions = BTreeMap::new();
    for (i, v) in y.into_iter().enumerate() {
        if !v.is_zero() {
            total += &v;
            contributions.insert(sg.node_order()[i].clone(), v);
        }
    }
    Ok((contributions, total))
}

/// Renders a rational reduced, omitting the denominator when it is 1
/// (`"5/3"`, `"2"`).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
