//! Spectral and Jordan decompositions of a nominal generator and the
//! directional derivative of its matrix exponential,
//!
//! ```text
//! D_S(t, A) = ∫₀ᵗ exp((t-τ)A) S exp(τA) dτ,
//! ```
//!
//! evaluated analytically in the eigenbasis (Hadamard-product formula for the
//! diagonalizable case, closed-form Jordan integrals otherwise) and by three
//! independent oracles: adaptive quadrature of the integral, the upper-right
//! block of `exp(t·[[A, S], [0, A]])`, and a central finite difference.

mod deriv;
mod oracle;
mod phi;
pub mod quadrature;
mod spectrum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::RMat;

pub use deriv::{dderiv_diag, dderiv_jordan, eigen_derivative};
pub use oracle::{
    dderiv_oracle_blockaug, dderiv_oracle_fd, dderiv_oracle_quadrature, fd_step,
    DEFAULT_QUADRATURE_TOL,
};
pub use phi::{phi_entry, phi_matrix};
pub use spectrum::{
    eig_decompose, jordan_decompose, Couplings, JordanBlock, Spectrum, DEFAULT_CLUSTER_TOL,
    NEAR_DEFECTIVE_COND,
};

#[derive(Debug, Error)]
pub enum MatexpError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("eigensolver failed to converge")]
    EigensolverFailure,
    #[error("spectrum is defective or near-defective (cond(M) = {condition:e}); use the Jordan path or an oracle method")]
    Defective { condition: f64 },
    #[error("Jordan path requires a dominant block of size >= 2; use the diagonal path")]
    TrivialJordanBlock,
    #[error("Jordan structure not supported: {0}")]
    UnsupportedJordan(String),
    #[error("spectrum carries no Jordan chain")]
    MissingJordanChain,
    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },
    #[error(
        "quadrature did not reach {requested:e} within {panels} panels (achieved {achieved:e})"
    )]
    QuadratureBudget {
        requested: f64,
        achieved: f64,
        panels: usize,
    },
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
}

/// Which evaluation route computes `D_S(t, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DerivMethod {
    /// Eigenbasis formula (Hadamard product, or Jordan integrals when the
    /// spectrum carries a Jordan chain).
    #[default]
    Analytic,
    Quadrature,
    Blockaug,
    Fd,
}

impl DerivMethod {
    pub const ALL: [DerivMethod; 4] = [
        DerivMethod::Analytic,
        DerivMethod::Quadrature,
        DerivMethod::Blockaug,
        DerivMethod::Fd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivMethod::Analytic => "analytic",
            DerivMethod::Quadrature => "quadrature",
            DerivMethod::Blockaug => "blockaug",
            DerivMethod::Fd => "fd",
        }
    }
}

impl std::str::FromStr for DerivMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(DerivMethod::Analytic),
            "quadrature" => Ok(DerivMethod::Quadrature),
            "blockaug" => Ok(DerivMethod::Blockaug),
            "fd" => Ok(DerivMethod::Fd),
            other => Err(format!(
                "unknown method '{other}' (expected analytic, quadrature, blockaug or fd)"
            )),
        }
    }
}

/// Directional derivative of `exp(tA)` in direction `S` by the requested route.
///
/// The analytic route decomposes `A` first; a near-defective spectrum without
/// a Jordan chain falls back to the block-augmented oracle.
pub fn directional_derivative(
    a: &RMat,
    s: &RMat,
    t: f64,
    method: DerivMethod,
) -> Result<RMat, MatexpError> {
    match method {
        DerivMethod::Analytic => {
            let spec = eig_decompose(a, DEFAULT_CLUSTER_TOL)?;
            if spec.near_defective {
                return dderiv_oracle_blockaug(a, s, t);
            }
            let sbar = spec.to_eigenbasis(s)?;
            dderiv_diag(&spec, &sbar, t)
        }
        DerivMethod::Quadrature => dderiv_oracle_quadrature(a, s, t, DEFAULT_QUADRATURE_TOL),
        DerivMethod::Blockaug => dderiv_oracle_blockaug(a, s, t),
        DerivMethod::Fd => dderiv_oracle_fd(a, s, t),
    }
}

pub(crate) fn check_time(t: f64) -> Result<(), MatexpError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(MatexpError::InvalidTime(t))
    }
}

pub(crate) fn check_square(a: &RMat) -> Result<usize, MatexpError> {
    if a.nrows() != a.ncols() {
        return Err(MatexpError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Err(MatexpError::Empty);
    }
    if !crate::linalg::all_finite(a) {
        return Err(MatexpError::NonFinite);
    }
    Ok(a.nrows())
}

pub(crate) fn check_pair(a: &RMat, s: &RMat) -> Result<usize, MatexpError> {
    let n = check_square(a)?;
    if s.nrows() != n || s.ncols() != n {
        return Err(MatexpError::Dimension(format!(
            "structure matrix is {}x{}, generator is {n}x{n}",
            s.nrows(),
            s.ncols()
        )));
    }
    if !crate::linalg::all_finite(s) {
        return Err(MatexpError::NonFinite);
    }
    Ok(n)
}
