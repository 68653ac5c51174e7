//! Error signals, log-sensitivity traces, asymptotic divergence
//! classification and empirical fits.

mod classify;
mod fit;
mod system;
mod trace;

use thiserror::Error;

use crate::matexp::MatexpError;

pub use classify::{
    classify, rational_approx, spike_schedule, Constants, DivergenceClassification, DivergenceKind,
    DEFAULT_PRUNE_TOL,
};
pub use fit::{detect_spikes, fit_polynomial_degree, fit_slope, MIN_FIT_SAMPLES};
pub use system::{ErrorSystem, Sample, SPIKE_FLOOR};
pub use trace::{trace, SensitivityTrace, TimeGrid};

#[derive(Debug, Error)]
pub enum SensanError {
    #[error(transparent)]
    Matexp(#[from] MatexpError),
    #[error("generator is unstable: eigenvalue {re} + {im}i has positive real part")]
    Unstable { re: f64, im: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("spectrum is near-defective (cond(M) = {condition:e}) and no Jordan structure was supplied; use an oracle method (quadrature, blockaug or fd)")]
    NearDefective { condition: f64 },
    #[error("need at least {required} finite samples in the window, found {found}")]
    TooFewSamples { found: usize, required: usize },
    #[error("spike schedule requires a periodic classification, got {0:?}")]
    NotPeriodic(DivergenceKind),
    #[error("parameter must be finite, got {0}")]
    NonFinite(f64),
}
