//! Step-tracking spring-mass loop with real and complex closed-loop poles.
//!
//! With real poles {-2, -5} the log-sensitivity grows linearly with slope
//! `ξ₀·s̄₁₁`; with the lightly damped pair `-1 ± iπ/5` it spikes at the zeros
//! of the error, every `π/ω` seconds.
//!
//! ```text
//! cargo run --release --example spring_mass
//! ```

use logsens::classical::{
    spring_mass_complex_poles, spring_mass_real_poles, spring_mass_scenario, SPRING_MASS_XI0,
};
use logsens::matexp::DerivMethod;
use logsens::sensan::{classify, detect_spikes, fit_slope, trace, TimeGrid, DEFAULT_PRUNE_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let real = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_real_poles())?;
    println!(
        "gain k = {:?}, reference gain k0 = {:.6}",
        real.k.as_slice(),
        real.k0
    );
    let sys = real.error_system()?;
    let cls = classify(
        sys.spectrum(),
        sys.couplings(),
        sys.xi0(),
        DEFAULT_PRUNE_TOL,
    );
    let tr = trace(
        &sys,
        &TimeGrid::new(0.0, 50.0, 0.01)?.points(),
        DerivMethod::Analytic,
    )?;
    println!(
        "real poles: {} predicted slope {:.6}, fitted |s| slope on [10, 50] {:.6}",
        cls.kind.name(),
        cls.slope.unwrap_or(f64::NAN),
        fit_slope(&tr, (10.0, 50.0))?
    );
    for t in [1.0, 5.0, 10.0, 25.0, 50.0] {
        let s = sys.sample(t, DerivMethod::Analytic)?;
        println!(
            "  t = {t:>4}: e = {:+.3e}  de/dξ = {:+.3e}  s = {:+.4}",
            s.error, s.derror, s.logsens
        );
    }

    let complex = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_complex_poles())?;
    let sys = complex.error_system()?;
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
        "complex poles: {} t0 = {:.4}, period = {:.4}",
        cls.kind.name(),
        cls.t0.unwrap_or(f64::NAN),
        cls.period.unwrap_or(f64::NAN)
    );
    println!("  detected spikes: {:.3?}", detect_spikes(&tr));
    Ok(())
}
