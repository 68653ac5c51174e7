use super::quadrature::{integrate, QuadOptions, QuadResult};
use super::{check_pair, check_time, MatexpError};
use crate::linalg::RMat;

pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

/// Adaptive quadrature of `∫₀ᵗ exp((t-τ)A) S exp(τA) dτ` with full options.
pub fn quadrature_with(
    a: &RMat,
    s: &RMat,
    t: f64,
    opts: QuadOptions,
) -> Result<QuadResult, MatexpError> {
    let n = check_pair(a, s)?;
    check_time(t)?;
    if t == 0.0 || s.iter().all(|&x| x == 0.0) {
        return Ok(QuadResult {
            value: RMat::zeros(n, n),
            error: 0.0,
            panels: 0,
            converged: true,
        });
    }
    let initial = ((t * a.norm() / 2.0).ceil() as usize).clamp(1, 1024);
    let opts = QuadOptions {
        initial_panels: opts.initial_panels.max(initial),
        ..opts
    };
    Ok(integrate(
        |tau| (a * (t - tau)).exp() * s * (a * tau).exp(),
        0.0,
        t,
        opts,
    ))
}

/// Quadrature oracle with per-entry error target `abs_tol` (with a rounding
/// floor relative to the result) and a budget of 2¹⁶ panels.
pub fn dderiv_oracle_quadrature(
    a: &RMat,
    s: &RMat,
    t: f64,
    abs_tol: f64,
) -> Result<RMat, MatexpError> {
    let opts = QuadOptions {
        abs_tol,
        rel_tol: 64.0 * f64::EPSILON,
        ..QuadOptions::default()
    };
    let r = quadrature_with(a, s, t, opts)?;
    if r.converged {
        Ok(r.value)
    } else {
        Err(MatexpError::QuadratureBudget {
            requested: abs_tol,
            achieved: r.error,
            panels: r.panels,
        })
    }
}

/// Upper-right block of `exp(t·[[A, S], [0, A]])`.
pub fn dderiv_oracle_blockaug(a: &RMat, s: &RMat, t: f64) -> Result<RMat, MatexpError> {
    let n = check_pair(a, s)?;
    check_time(t)?;
    let mut big = RMat::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(a);
    big.view_mut((n, n), (n, n)).copy_from(a);
    big.view_mut((0, n), (n, n)).copy_from(s);
    let e = (big * t).exp();
    let block = e.view((0, n), (n, n)).into_owned();
    if crate::linalg::all_finite(&block) {
        Ok(block)
    } else {
        Err(MatexpError::NonFinite)
    }
}

/// Finite-difference step `1e-6·(1 + ‖S‖_F)`.
pub fn fd_step(s: &RMat) -> f64 {
    1e-6 * (1.0 + s.norm())
}

/// Central difference `(exp(t(A+hS)) - exp(t(A-hS))) / 2h` with [`fd_step`].
pub fn dderiv_oracle_fd(a: &RMat, s: &RMat, t: f64) -> Result<RMat, MatexpError> {
    check_pair(a, s)?;
    check_time(t)?;
    let h = fd_step(s);
    let plus = ((a + s * h) * t).exp();
    let minus = ((a - s * h) * t).exp();
    Ok((plus - minus) / (2.0 * h))
}
