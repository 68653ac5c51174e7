//! Time-domain log-sensitivity of error signals in linear dynamical systems.
//!
//! For a nominal generator `A0`, a perturbation structure `S`, a readout row
//! `c` and an effective initial vector `v`, the error signal is
//! `e(t) = c·exp(A0 t)·v` and its log-sensitivity to the scalar parameter `ξ`
//! entering as `A0 + (ξ - ξ0)·S` is
//!
//! ```text
//! s(ξ0, t) = ξ0 · (∂e/∂ξ)(t) / e(t),   ∂e/∂ξ = c · ∫₀ᵗ exp((t-τ)A0) S exp(τA0) dτ · v
//! ```
//!
//! The crate is organised as:
//!
//! - [`matexp`]: eigen/Jordan decompositions and the directional derivative of
//!   the matrix exponential, with quadrature, block-augmented and
//!   finite-difference oracles.
//! - [`sensan`]: error signals, log-sensitivity traces, asymptotic divergence
//!   classification and empirical fits.
//! - [`classical`]: pole placement and the step-tracking spring-mass and RLC
//!   scenarios.
//! - [`quantum`]: Bloch-space embedding (Gell-Mann basis, coherent and
//!   dissipative generators) with the two-qubit cavity and spin-chain
//!   scenarios.
//! - [`cli`]: JSON scenario configs, CSV traces and JSON analysis reports used
//!   by the `logsens` binary.

pub mod classical;
pub mod cli;
pub mod linalg;
pub mod matexp;
pub mod quantum;
pub mod sensan;

mod error;

pub use error::{Error, Result};
