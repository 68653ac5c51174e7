//! A defective dominant eigenvalue makes |s| grow like a polynomial whose
//! degree equals the Jordan block size.

use logsens::linalg::{RMat, RVec};
use logsens::matexp::DerivMethod;
use logsens::sensan::{
    classify, fit_polynomial_degree, trace, ErrorSystem, TimeGrid, DEFAULT_PRUNE_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // companion matrices of (s + 1)^ℓ (s + 3)^(3 - ℓ)
    let cases = [(2, [-3.0, -7.0, -5.0]), (3, [-1.0, -3.0, -3.0])];
    for (ell, last_row) in cases {
        let mut a0 = RMat::zeros(3, 3);
        a0[(0, 1)] = 1.0;
        a0[(1, 2)] = 1.0;
        for j in 0..3 {
            a0[(2, j)] = last_row[j];
        }
        let mut s = RMat::zeros(3, 3);
        s[(2, 0)] = 1.0;
        let c = RVec::from_vec(vec![1.0, 0.0, 0.0]);
        let v = RVec::from_vec(vec![1.0, 0.0, 0.0]);
        let sys = ErrorSystem::with_jordan(a0, s, c, v, 0.1, ell)?;
        let cls = classify(
            sys.spectrum(),
            sys.couplings(),
            sys.xi0(),
            DEFAULT_PRUNE_TOL,
        );
        let tr = trace(
            &sys,
            &TimeGrid::new(0.0, 100.0, 0.05)?.points(),
            DerivMethod::Analytic,
        )?;
        println!(
            "ℓ = {ell}: {} predicted degree {:?}, fitted log-log degree {}",
            cls.kind.name(),
            cls.degree,
            fit_polynomial_degree(&tr, (50.0, 100.0))?
        );
    }
    Ok(())
}
