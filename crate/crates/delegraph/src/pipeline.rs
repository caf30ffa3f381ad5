//! End-to-end runs: decay -> preprocess -> solve -> report.
//!
//! The report is the machine-readable product of a run. Numbers carry 12
//! significant digits; exact mode swaps every vote quantity for a reduced
//! `p/q` string. Serialization is deterministic: maps are ordered, struct
//! fields are declared in key order, and identical input plus identical
//! flags yields byte-identical output.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::Serialize;

use crate::attribution::{attribution_for_voter, hypothetical_tally, AttributionVector};
use crate::error::{Error, Result};
use crate::exact;
use crate::extensions::{apply_decay, DecayConfig};
use crate::graph::{DelegationGraph, NodeId};
use crate::preprocess::{preprocess, SimplifiedGraph};
use crate::solver::{solve, SolveConfig, SolveMethod, TallyResult};

/// Which attribution rows to embed in a report.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AttributionSelect {
    #[default]
    None,
    All,
    Ids(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub solve: SolveConfig,
    pub decay: DecayConfig,
    pub attributions: AttributionSelect,
    /// Solve over exact rationals and report `p/q` strings (small graphs).
    pub exact: bool,
    /// Include the raw solution vector (non-voters included) in the report.
    /// Raw `S` entries of non-voters are *not* would-have-voted counts;
    /// this is debugging output only.
    pub include_raw_s: bool,
}

/// A vote quantity: a float rounded to 12 significant digits, or an exact
/// rational rendered as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TallyValue {
    Number(f64),
    Exact(String),
}

impl TallyValue {
    pub fn number(x: f64) -> Self {
        TallyValue::Number(sig12(x))
    }

    pub fn rational(r: &BigRational) -> Self {
        TallyValue::Exact(exact::format_rational(r))
    }

    /// Numeric view (exact values converted); used by tests and the CSV
    /// writer's consistency checks.
    pub fn as_f64(&self) -> f64 {
        match self {
            TallyValue::Number(x) => *x,
            TallyValue::Exact(s) => match s.split_once('/') {
                Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
                None => s.parse().unwrap(),
            },
        }
    }

    /// The exact byte rendering used in both JSON and CSV output.
    pub fn render(&self) -> String {
        match self {
            TallyValue::Number(x) => serde_json::to_string(x).expect("finite float"),
            TallyValue::Exact(s) => s.clone(),
        }
    }
}

/// Rounds to 12 significant decimal digits, the report precision.
fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("float round-trips")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationCheck {
    pub actual: TallyValue,
    /// Retained head count: the vote mass fed into the system.
    pub expected: f64,
    /// With no decay and no partial waste this asserts exact conservation;
    /// otherwise only that no vote mass was created.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverInfo {
    pub iterations: usize,
    pub method: String,
    pub residual: f64,
}

/// One embedded attribution row; the owning voter is the map key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributionReport {
    pub contributions: BTreeMap<String, TallyValue>,
    pub total: TallyValue,
}

/// Machine-readable tally report. Fields are declared in sorted key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TallyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attributions: Option<BTreeMap<String, AttributionReport>>,
    pub conservation_check: ConservationCheck,
    pub decay_loss: TallyValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_solver_s: Option<BTreeMap<String, TallyValue>>,
    pub retained: usize,
    pub solver: SolverInfo,
    pub voter_tallies: BTreeMap<String, TallyValue>,
    pub wasted_nodes: Vec<String>,
}

/// Everything a run produces: the report plus the simplified graph it was
/// computed on (for DOT export or rendering).
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: TallyReport,
    pub simplified: SimplifiedGraph,
    pub tally: TallyResult,
}

/// What-if answer for one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhatIfReport {
    pub node: String,
    pub votes: TallyValue,
}

/// Attribution answer for one voter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplainReport {
    pub contributions: BTreeMap<String, TallyValue>,
    pub total: TallyValue,
    pub voter: String,
}

fn method_name(m: SolveMethod) -> &'static str {
    match m {
        SolveMethod::Direct => "direct",
        SolveMethod::Neumann => "neumann",
    }
}

fn attribution_targets(sg: &SimplifiedGraph, select: &AttributionSelect) -> Result<Vec<NodeId>> {
    match select {
        AttributionSelect::None => Ok(vec![]),
        AttributionSelect::All => Ok(sg.graph().voters().map(|n| n.id.clone()).collect()),
        AttributionSelect::Ids(ids) => {
            for id in ids {
                if !sg.graph().contains(id) {
                    return Err(Error::UnknownNode(id.clone()));
                }
            }
            Ok(ids.clone())
        }
    }
}

/// Runs the full tally pipeline on a validated graph.
pub fn run_pipeline(graph: &DelegationGraph, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let decayed = apply_decay(graph, cfg.decay);
    let sg = preprocess(&decayed)?;
    let retained = sg.len();
    let no_loss_expected = cfg.decay.is_identity() && sg.report().partial_waste.is_empty();
    let tol = 1e-8 * (retained.max(1) as f64);

    let tally = solve(&sg, &cfg.solve)?;

    let (voter_tallies, raw_s, conservation, decay_loss, solver) = if cfg.exact {
        let s = exact::solve_exact(&sg)?;
        let voter_tallies: BTreeMap<String, TallyValue> = sg
            .node_order()
            .iter()
            .zip(&s)
            .filter(|(id, _)| sg.graph().is_voter(id))
            .map(|(id, v)| (id.to_string(), TallyValue::rational(v)))
            .collect();
        let raw_s: BTreeMap<String, TallyValue> = sg
            .node_order()
            .iter()
            .zip(&s)
            .map(|(id, v)| (id.to_string(), TallyValue::rational(v)))
            .collect();
        let actual: BigRational = sg
            .node_order()
            .iter()
            .zip(&s)
            .filter(|(id, _)| sg.graph().is_voter(id))
            .map(|(_, v)| v.clone())
            .sum();
        let expected = BigRational::from_usize(retained).expect("usize fits");
        let pass = if no_loss_expected {
            // Explicit weights are exact images of floats, so per-source
            // sums (and thus the voter total) can sit an ulp away from 1.
            let drift = BigRational::from_float(tol).expect("tol is finite");
            (&actual - &expected).abs() <= drift
        } else {
            actual <= expected
        };
        let loss = if cfg.decay.is_identity() {
            BigRational::zero()
        } else {
            &expected - &actual
        };
        (
            voter_tallies,
            raw_s,
            ConservationCheck {
                actual: TallyValue::rational(&actual),
                expected: retained as f64,
                pass,
            },
            TallyValue::rational(&loss),
            SolverInfo {
                iterations: 0,
                method: "exact".into(),
                residual: 0.0,
            },
        )
    } else {
        let voter_tallies: BTreeMap<String, TallyValue> = tally
            .voter_tallies
            .iter()
            .map(|(id, &v)| (id.to_string(), TallyValue::number(v)))
            .collect();
        let raw_s: BTreeMap<String, TallyValue> = sg
            .node_order()
            .iter()
            .zip(&tally.s)
            .map(|(id, &v)| (id.to_string(), TallyValue::number(v)))
            .collect();
        let actual: f64 = tally.voter_tallies.values().sum();
        let expected = retained as f64;
        let pass = if no_loss_expected {
            (actual - expected).abs() <= tol
        } else {
            actual <= expected + tol
        };
        let loss = if cfg.decay.is_identity() {
            0.0
        } else {
            (expected - actual).max(0.0)
        };
        (
            voter_tallies,
            raw_s,
            ConservationCheck {
                actual: TallyValue::number(actual),
                expected,
                pass,
            },
            TallyValue::number(loss),
            SolverInfo {
                iterations: tally.iterations,
                method: method_name(tally.method).into(),
                residual: tally.residual,
            },
        )
    };

    let targets = attribution_targets(&sg, &cfg.attributions)?;
    let attributions = if targets.is_empty() {
        None
    } else {
        let mut map = BTreeMap::new();
        for voter in targets {
            let row = explain_on_simplified(&sg, &voter, cfg)?;
            map.insert(
                voter.to_string(),
                AttributionReport {
                    contributions: row.contributions,
                    total: row.total,
                },
            );
        }
        Some(map)
    };

    let report = TallyReport {
        attributions,
        conservation_check: conservation,
        decay_loss,
        raw_solver_s: cfg.include_raw_s.then_some(raw_s),
        retained,
        solver,
        voter_tallies,
        wasted_nodes: tally.wasted.iter().map(|id| id.to_string()).collect(),
    };
    Ok(PipelineOutput {
        report,
        simplified: sg,
        tally,
    })
}

fn explain_on_simplified(
    sg: &SimplifiedGraph,
    voter: &NodeId,
    cfg: &PipelineConfig,
) -> Result<ExplainReport> {
    if cfg.exact {
        let (contributions, total) = exact::attribution_exact(sg, voter)?;
        Ok(ExplainReport {
            contributions: contributions
                .iter()
                .map(|(id, v)| (id.to_string(), TallyValue::rational(v)))
                .collect(),
            total: TallyValue::rational(&total),
            voter: voter.to_string(),
        })
    } else {
        let AttributionVector {
            voter,
            contributions,
            total,
        } = attribution_for_voter(sg, voter, &cfg.solve)?;
        Ok(ExplainReport {
            contributions: contributions
                .iter()
                .map(|(id, &v)| (id.to_string(), TallyValue::number(v)))
                .collect(),
            total: TallyValue::number(total),
            voter: voter.to_string(),
        })
    }
}

/// Attribution row for one voter, after decay and preprocessing.
pub fn run_explain(
    graph: &DelegationGraph,
    voter: &NodeId,
    cfg: &PipelineConfig,
) -> Result<ExplainReport> {
    let decayed = apply_decay(graph, cfg.decay);
    let sg = preprocess(&decayed)?;
    explain_on_simplified(&sg, voter, cfg)
}

/// Votes `node` would receive if it voted.
pub fn run_whatif(
    graph: &DelegationGraph,
    node: &NodeId,
    cfg: &PipelineConfig,
) -> Result<WhatIfReport> {
    let decayed = apply_decay(graph, cfg.decay);
    let votes = if cfg.exact {
        if !decayed.contains(node) {
            return Err(Error::UnknownNode(node.clone()));
        }
        let nodes: Vec<crate::graph::Node> = decayed
            .nodes()
            .iter()
            .map(|n| crate::graph::Node {
                id: n.id.clone(),
                is_voter: n.is_voter || n.id == *node,
            })
            .collect();
        let flipped = DelegationGraph::from_parts_unchecked(
            nodes,
            decayed.edges().to_vec(),
            decayed.weight_mode(),
        );
        let sg = preprocess(&flipped)?;
        let s = exact::solve_exact(&sg)?;
        let idx = sg.index_of(node).expect("a voter is always retained");
        TallyValue::rational(&s[idx])
    } else {
        TallyValue::number(hypothetical_tally(graph, node, &cfg.solve)?)
    };
    Ok(WhatIfReport {
        node: node.to_string(),
        votes,
    })
}

/// Pretty JSON with a trailing newline; deterministic for identical input.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serializes");
    out.push('\n');
    out
}

/// CSV rows `node,votes` for the voter tallies, same numeric rendering as
/// the JSON output.
pub fn report_to_csv(report: &TallyReport) -> String {
    let mut out = String::from("node,votes\n");
    for (node, votes) in &report.voter_tallies {
        out.push_str(node);
        out.push(',');
        out.push_str(&votes.render());
        out.push('\n');
    }
    out
}
