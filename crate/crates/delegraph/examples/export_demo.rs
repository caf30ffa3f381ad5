//! Prints the 25-person demo graph in an input format.
//!
//!     cargo run --example export_demo -- json
//!     cargo run --example export_demo -- edgelist

use delegraph::formats;
use delegraph::samples;

fn main() {
    let format = std::env::args().nth(1).unwrap_or_else(|| "json".into());
    let graph = samples::demo_graph();
    match format.as_str() {
        "json" => print!("{}", formats::emit_json(&graph)),
        "edgelist" => print!("{}", formats::emit_edgelist(&graph).unwrap()),
        other => {
            eprintln!("unknown format `{other}`; use json or edgelist");
            std::process::exit(1);
        }
    }
}
