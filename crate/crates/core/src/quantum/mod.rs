//! Bloch-space embedding of quantum dynamics.
//!
//! A density matrix `ρ` on `C^N` is expanded in an orthonormal Hermitian
//! basis `{σ_m}` (generalized Gell-Mann matrices followed by `I/√N`) as
//! `r_m = Tr(σ_m ρ)`. The Liouville equation
//! `ρ̇ = -i[H, ρ] + VρV† - ½{V†V, ρ}` becomes `ṙ = (A + L) r` with
//!
//! ```text
//! A_mn = Tr(iH[σ_m, σ_n])
//! L_mn = Tr(V†σ_m V σ_n - ½ V†V {σ_m, σ_n})
//! ```
//!
//! The error readout measures the distance to a target state:
//! `e = (r_1 - r_target)·r` with `r_1 = √N e_{N²}`, i.e. `c_n = -r_target,n`
//! for `n < N²` and `c_{N²} = (N - 1)/√N`.

mod basis;
mod scenarios;

use thiserror::Error;

use crate::sensan::SensanError;

pub use basis::{
    bloch_coherent, bloch_dissipator, bloch_state, density_from_bloch, gellmann_basis,
    steady_state, target_readout, HermitianBasis,
};
pub use scenarios::{
    chain_couplings, spin_chain_scenario, two_qubit_scenario, BlochModel, Perturbation,
    SpinChainParams, TwoQubitParams,
};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("basis dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (residue {0:e})")]
    NotHermitian(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("steady state requires a simple zero eigenvalue, found multiplicity {0}")]
    SteadyStateMultiplicity(usize),
    #[error("null vector has no component along the identity")]
    SteadyStateNormalization,
    #[error("coupling index {index} outside 1..={max}")]
    InvalidCoupling { index: usize, max: usize },
    #[error("site index {index} outside 1..={max}")]
    InvalidSite { index: usize, max: usize },
    #[error("parameter {name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error(transparent)]
    Sensan(#[from] SensanError),
}
