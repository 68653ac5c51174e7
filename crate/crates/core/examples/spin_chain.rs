//! Perfect state transfer along engineered spin chains.
//!
//! Couplings `J_n = (λ/2)√(n(N-n))` move an excitation from site 1 to site N
//! at `T = π/λ`. At each transfer time the error vanishes, its sensitivity
//! vanishes too, and the log-sensitivity diverges.

use logsens::matexp::DerivMethod;
use logsens::quantum::{chain_couplings, spin_chain_scenario, SpinChainParams};
use logsens::sensan::{classify, detect_spikes, trace, TimeGrid, DEFAULT_PRUNE_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 2..=5 {
        let p = SpinChainParams::new(n);
        let sys = spin_chain_scenario(&p)?.error_system()?;
        let cls = classify(
            sys.spectrum(),
            sys.couplings(),
            sys.xi0(),
            DEFAULT_PRUNE_TOL,
        );
        let tr = trace(
            &sys,
            &TimeGrid::new(0.0, 30.0, 0.001)?.points(),
            DerivMethod::Analytic,
        )?;
        println!(
            "N = {n}: couplings {:.4?}, perturbing J{}; e(T) = {:.1e}; {} period {:.4}",
            chain_couplings(n, p.lambda),
            p.coupling,
            sys.error_signal(p.transfer_time()),
            cls.kind.name(),
            cls.period.unwrap_or(f64::NAN),
        );
        println!("  spikes {:.4?}", detect_spikes(&tr));
    }

    let sys = spin_chain_scenario(&SpinChainParams::new(2))?.error_system()?;
    for dt in [1e-1, 1e-2, 1e-3] {
        let t = 5.0 - dt;
        let s = sys.sample(t, DerivMethod::Analytic)?;
        println!(
            "N = 2, t = 5 - {dt:e}: e = {:.3e}, de/dξ = {:+.3e}, s = {:+.3e}",
            s.error, s.derror, s.logsens
        );
    }
    Ok(())
}
