//! Fidelity against |log-sensitivity| approaching the first transfer time,
//! for the two- and three-site chains.

use logsens::cli::{table1_repro, Chain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for chain in [Chain::N2, Chain::N3] {
        println!(
            "{} (perturbing coupling {})",
            chain.name(),
            chain.sites() - 1
        );
        println!("  {:>9}  {:>10}  {:>12}", "fidelity", "t", "|s|");
        for row in table1_repro(chain, &chain.default_targets())? {
            println!(
                "  {:>9}  {:>10.6}  {:>12.4}",
                row.fidelity,
                row.time.unwrap_or(f64::NAN),
                row.abs_logsens.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
