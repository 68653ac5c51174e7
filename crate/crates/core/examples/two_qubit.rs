//! Two driven, damped qubits in Bloch form.
//!
//! The Bloch generator has a zero eigenvalue (the steady state) that the
//! readout annihilates, so the slowest visible mode is λ₂ ≈ -0.0035 and the
//! log-sensitivity grows linearly with slope `|ξ₀·s̄₂₂|`. Each of the four
//! perturbation structures is reported.

use logsens::matexp::DerivMethod;
use logsens::quantum::{two_qubit_scenario, Perturbation, TwoQubitParams};
use logsens::sensan::{classify, fit_slope, trace, TimeGrid, DEFAULT_PRUNE_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TimeGrid::new(0.0, 2000.0, 1.0)?.points();
    for p in Perturbation::ALL {
        let params = TwoQubitParams {
            perturbation: p,
            ..TwoQubitParams::default()
        };
        let model = two_qubit_scenario(&params)?;
        let sys = model.error_system()?;
        let cls = classify(
            sys.spectrum(),
            sys.couplings(),
            sys.xi0(),
            DEFAULT_PRUNE_TOL,
        );
        let tr = trace(&sys, &grid, DerivMethod::Analytic)?;
        println!(
            "{p}: ξ0 = {:+.1}, λ2 = {:.7}, predicted slope {:+.7}, fitted |s| slope {:.7}, pruned {:?}",
            sys.xi0(),
            sys.spectrum().eigenvalues[1].re,
            cls.slope.unwrap_or(f64::NAN),
            fit_slope(&tr, (1000.0, 2000.0))?,
            cls.pruned_modes,
        );
    }
    Ok(())
}
