//! Loads a JSON scenario config and prints its analysis report.
//!
//! ```text
//! cargo run --release --example run_config -- crates/core/configs/rlc_real.json
//! ```

use logsens::cli::{analyze, validate_config};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/spring_mass.json").into());
    let cfg = validate_config(&std::fs::read_to_string(&path)?)?;
    let (report, _trace) = analyze(&cfg)?;
    print!("{}", report.to_json());
    Ok(())
}
