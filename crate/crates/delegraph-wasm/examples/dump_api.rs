//! Prints the demo page's api output on the host, for iterating on `www/`
//! without a wasm toolchain.
//!
//!     cargo run -p delegraph-wasm --example dump_api -- input
//!     cargo run -p delegraph-wasm --example dump_api -- analyze 0.5
//!     cargo run -p delegraph-wasm --example dump_api -- explain 1.0 X
//!     cargo run -p delegraph-wasm --example dump_api -- whatif 1.0 O

use delegraph_wasm::api;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let input = api::demo_input();
    let beta = |i: usize| {
        args.get(i)
            .map_or(1.0, |s| s.parse().expect("beta is a float"))
    };
    let result = match args.first().map(String::as_str) {
        Some("input") => Ok(input.clone()),
        Some("analyze") => api::analyze(&input, beta(1)),
        Some("explain") => api::explain(&input, beta(1), args.get(2).expect("voter id")),
        Some("whatif") => api::whatif(&input, beta(1), args.get(2).expect("node id")),
        _ => {
            eprintln!(
                "usage: dump_api input|analyze [beta]|explain [beta] <voter>|whatif [beta] <node>"
            );
            std::process::exit(1);
        }
    };
    match result {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
