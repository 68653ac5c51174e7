//! Series RLC circuit under state feedback, with the resistance as the
//! uncertain parameter.

use logsens::classical::{
    rlc_complex_poles, rlc_real_poles, rlc_scenario, RLC_COMPLEX_THIRD_POLE, RLC_XI0,
};
use logsens::matexp::DerivMethod;
use logsens::sensan::{classify, detect_spikes, fit_slope, trace, TimeGrid, DEFAULT_PRUNE_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let designs = [
        ("real {-1, -2, -4}", rlc_real_poles(), 0.01),
        (
            "complex -2 ± iπ/10",
            rlc_complex_poles(RLC_COMPLEX_THIRD_POLE),
            0.001,
        ),
    ];
    for (label, poles, step) in designs {
        let sys = rlc_scenario(RLC_XI0, &poles)?.error_system()?;
        let cls = classify(
            sys.spectrum(),
            sys.couplings(),
            sys.xi0(),
            DEFAULT_PRUNE_TOL,
        );
        let tr = trace(
            &sys,
            &TimeGrid::new(0.0, 50.0, step)?.points(),
            DerivMethod::Analytic,
        )?;
        println!("{label}: {}", cls.kind.name());
        println!("  eigenvalues {:.4?}", sys.spectrum().eigenvalues);
        if let Some(slope) = cls.slope {
            println!(
                "  predicted slope {slope:.5}, fitted {:.5}",
                fit_slope(&tr, (10.0, 50.0))?
            );
        }
        if let (Some(t0), Some(p)) = (cls.t0, cls.period) {
            println!("  spikes predicted at {t0:.4} + {p:.4}·n");
            println!("  detected {:.4?}", detect_spikes(&tr));
        }
    }
    Ok(())
}
