use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ErrorSystem, SensanError};
use crate::matexp::DerivMethod;

/// Uniform grid `start, start + step, …` up to and including `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self, SensanError> {
        let g = TimeGrid { start, end, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SensanError> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(SensanError::InvalidGrid("bounds must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(SensanError::InvalidGrid(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.start < 0.0 {
            return Err(SensanError::InvalidGrid(format!(
                "start must be non-negative, got {}",
                self.start
            )));
        }
        if self.end <= self.start {
            return Err(SensanError::InvalidGrid(format!(
                "end {} must exceed start {}",
                self.end, self.start
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points computed as `start + i·step` (no accumulated drift).
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

/// Sampled error, sensitivity and log-sensitivity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensitivityTrace {
    pub times: Vec<f64>,
    pub error: Vec<f64>,
    pub derror: Vec<f64>,
    /// NaN where `spike_mask` is set.
    pub logsens: Vec<f64>,
    pub spike_mask: Vec<bool>,
}

impl SensitivityTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(t, |s|)` over unmasked samples.
    pub fn finite_abs_logsens(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.logsens)
            .zip(&self.spike_mask)
            .filter(|(_, &m)| !m)
            .map(|((&t, &s), _)| (t, s.abs()))
            .filter(|(_, s)| s.is_finite())
    }

    /// Largest absolute log-sensitivity over unmasked samples.
    pub fn max_abs_logsens(&self) -> f64 {
        self.finite_abs_logsens()
            .fold(0.0, |acc, (_, s)| acc.max(s))
    }
}

/// Samples `e`, `∂e/∂ξ` and `s` on `grid`, evaluated in parallel.
pub fn trace(
    sys: &ErrorSystem,
    grid: &[f64],
    method: DerivMethod,
) -> Result<SensitivityTrace, SensanError> {
    if grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(SensanError::InvalidGrid(
            "times must be finite and non-negative".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SensanError::InvalidGrid(
            "times must be strictly increasing".into(),
        ));
    }
    if method == DerivMethod::Analytic && !sys.has_analytic_path() {
        return Err(SensanError::NearDefective {
            condition: sys.spectrum().condition,
        });
    }
    let samples = grid
        .par_iter()
        .map(|&t| sys.sample(t, method))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tr = SensitivityTrace {
        times: Vec::with_capacity(samples.len()),
        error: Vec::with_capacity(samples.len()),
        derror: Vec::with_capacity(samples.len()),
        logsens: Vec::with_capacity(samples.len()),
        spike_mask: Vec::with_capacity(samples.len()),
    };
    for s in samples {
        tr.times.push(s.t);
        tr.error.push(s.error);
        tr.derror.push(s.derror);
        tr.logsens.push(s.logsens);
        tr.spike_mask.push(s.spike);
    }
    Ok(tr)
}
