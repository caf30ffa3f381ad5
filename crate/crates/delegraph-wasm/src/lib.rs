//! Browser bindings for the delegation-tally engine.
//!
//! Three operations back the demo page in `www/`: `analyze` (full tally plus
//! a render-ready view of the graph), `explain` (attribution for one voter)
//! and `whatif` (hypothetical tally for one node). Everything crosses the
//! boundary as JSON strings, so the bindings stay trivial and the logic in
//! [`api`] is testable on any target.
//!
//! Build with `wasm-pack build --target web crates/delegraph-wasm`, then
//! serve `crates/delegraph-wasm/www/`.

use wasm_bindgen::prelude::*;

pub mod api {
    //! Target-independent core of the bindings.

    use serde::Serialize;

    use delegraph::extensions::DecayConfig;
    use delegraph::formats;
    use delegraph::graph::{DelegationGraph, NodeId};
    use delegraph::pipeline::{
        run_explain, run_pipeline, run_whatif, to_json, PipelineConfig, TallyReport,
    };

    /// One node of the original graph, annotated with what preprocessing and
    /// the solver concluded about it.
    #[derive(Serialize)]
    struct NodeView {
        id: String,
        voter: bool,
        /// Dropped during preprocessing: this vote is wasted.
        pruned: bool,
        /// Final votes; voters only.
        #[serde(skip_serializing_if = "Option::is_none")]
        tally: Option<f64>,
        /// Raw solution entry; retained nodes only. Not a would-have-voted
        /// count for non-voters.
        #[serde(skip_serializing_if = "Option::is_none")]
        raw: Option<f64>,
    }

    /// One delegation of the original graph, with its fate.
    #[derive(Serialize)]
    struct EdgeView {
        from: String,
        to: String,
        /// Effective weight after decay.
        weight: f64,
        /// `"stripped"` (source votes), `"pruned"` (dead region) or absent
        /// (used by the solver).
        #[serde(skip_serializing_if = "Option::is_none")]
        removed: Option<&'static str>,
    }

    #[derive(Serialize)]
    struct AnalyzeView {
        edges: Vec<EdgeView>,
        nodes: Vec<NodeView>,
        report: TallyReport,
    }

    fn config(beta: f64) -> Result<PipelineConfig, String> {
        Ok(PipelineConfig {
            decay: DecayConfig::new(beta).map_err(|e| e.to_string())?,
            ..Default::default()
        })
    }

    fn parse(input: &str) -> Result<DelegationGraph, String> {
        formats::parse_auto(input).map_err(|e| e.to_string())
    }

    /// Full pipeline run rendered for the page: annotated nodes and edges of
    /// the *original* graph plus the tally report.
    pub fn analyze(input: &str, beta: f64) -> Result<String, String> {
        let graph = parse(input)?;
        let cfg = config(beta)?;
        let out = run_pipeline(&graph, &cfg).map_err(|e| e.to_string())?;
        let decayed = delegraph::extensions::apply_decay(&graph, cfg.decay);
        let sg = &out.simplified;

        let nodes = graph
            .nodes()
            .iter()
            .map(|n| {
                let retained = sg.index_of(&n.id);
                NodeView {
                    id: n.id.to_string(),
                    voter: n.is_voter,
                    pruned: retained.is_none(),
                    tally: if n.is_voter {
                        out.tally.voter_tallies.get(&n.id).copied()
                    } else {
                        None
                    },
                    raw: retained.map(|i| out.tally.s[i]),
                }
            })
            .collect();
        let edges = decayed
            .edges()
            .iter()
            .map(|e| EdgeView {
                from: e.from.to_string(),
                to: e.to.to_string(),
                weight: e.weight,
                removed: if graph.is_voter(&e.from) {
                    Some("stripped")
                } else if sg.index_of(&e.from).is_none() || sg.index_of(&e.to).is_none() {
                    Some("pruned")
                } else {
                    None
                },
            })
            .collect();

        Ok(to_json(&AnalyzeView {
            edges,
            nodes,
            report: out.report,
        }))
    }

    /// Attribution row for `voter` as JSON.
    pub fn explain(input: &str, beta: f64, voter: &str) -> Result<String, String> {
        let graph = parse(input)?;
        let report =
            run_explain(&graph, &NodeId::from(voter), &config(beta)?).map_err(|e| e.to_string())?;
        Ok(to_json(&report))
    }

    /// Hypothetical tally for `node` as JSON.
    pub fn whatif(input: &str, beta: f64, node: &str) -> Result<String, String> {
        let graph = parse(input)?;
        let report =
            run_whatif(&graph, &NodeId::from(node), &config(beta)?).map_err(|e| e.to_string())?;
        Ok(to_json(&report))
    }

    /// The bundled 25-person sample, in edge-list form, for the page's
    /// initial content.
    pub fn demo_input() -> String {
        formats::emit_edgelist(&delegraph::samples::demo_graph()).expect("demo ids are tokens")
    }
}

#[wasm_bindgen]
pub fn analyze(input: &str, beta: f64) -> Result<String, JsValue> {
    api::analyze(input, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explain(input: &str, beta: f64, voter: &str) -> Result<String, JsValue> {
    api::explain(input, beta, voter).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn whatif(input: &str, beta: f64, node: &str) -> Result<String, JsValue> {
    api::whatif(input, beta, node).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn demo_input() -> String {
    api::demo_input()
}
