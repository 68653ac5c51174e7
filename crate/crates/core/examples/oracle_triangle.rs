//! Cross-checks the four routes to the directional derivative of `exp(tA)`.

use logsens::linalg::RMat;
use logsens::matexp::{directional_derivative, DerivMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = RMat::from_row_slice(3, 3, &[-1.0, 2.0, 0.0, -2.0, -1.0, 0.5, 0.0, 0.3, -3.0]);
    let s = RMat::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    for t in [0.1, 1.0, 5.0] {
        let ds: Vec<RMat> = DerivMethod::ALL
            .iter()
            .map(|&m| directional_derivative(&a, &s, t, m))
            .collect::<Result<_, _>>()?;
        let reference = &ds[0];
        let scale = reference.amax();
        print!("t = {t}:");
        for (m, d) in DerivMethod::ALL.iter().zip(&ds).skip(1) {
            print!("  {} {:.1e}", m.name(), (d - reference).amax() / scale);
        }
        println!();
    }
    Ok(())
}
