use super::{check_time, MatexpError, Spectrum};
use crate::linalg::{expm1_over_x, CMat, C64};

/// `φ(λ_m, λ_n; t) = (e^{λ_m t} - e^{λ_n t}) / (λ_m - λ_n)`, or `t e^{λt}` when
/// the eigenvalues coincide.
///
/// Evaluated as `t e^{λ_a t} · expm1(x)/x` with `x = (λ_b - λ_a)t` and `λ_a`
/// the eigenvalue with the larger real part, so no intermediate overflows.
pub fn phi_entry(lm: C64, ln: C64, t: f64) -> C64 {
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (la, lb) = if lm.re >= ln.re { (lm, ln) } else { (ln, lm) };
    (la * t).exp() * t * expm1_over_x((lb - la) * t)
}

/// The symmetric matrix `Φ(t)` of [`phi_entry`] values over the spectrum.
pub fn phi_matrix(spec: &Spectrum, t: f64) -> Result<CMat, MatexpError> {
    check_time(t)?;
    let n = spec.dim();
    let mut phi = CMat::zeros(n, n);
    for m in 0..n {
        let lm = spec.eigenvalues[m];
        phi[(m, m)] = (lm * t).exp() * t;
        for k in m + 1..n {
            let value = if spec.cluster_of(m) == spec.cluster_of(k) {
                (lm * t).exp() * t
            } else {
                phi_entry(lm, spec.eigenvalues[k], t)
            };
            phi[(m, k)] = value;
            phi[(k, m)] = value;
        }
    }
    Ok(phi)
}
