use super::SensanError;
use crate::linalg::{all_finite, CMat, CVec, RMat, RVec, C64};
use crate::matexp::{
    dderiv_diag, dderiv_jordan, dderiv_oracle_blockaug, dderiv_oracle_fd, dderiv_oracle_quadrature,
    directional_derivative, eig_decompose, eigen_derivative, jordan_decompose, Couplings,
    DerivMethod, Spectrum, DEFAULT_CLUSTER_TOL, DEFAULT_QUADRATURE_TOL,
};

/// Relative floor below which `|e(t)|` is treated as a zero of the error.
///
/// The reference magnitude is the sum of the moduli of the modal terms
/// `Σ|z_k w_k e^{λ_k t}|` at the same time, so a decaying error keeps
/// finite log-sensitivity samples while exact cancellations are masked.
pub const SPIKE_FLOOR: f64 = 1e-12;

/// One evaluation of the error and its sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub error: f64,
    pub derror: f64,
    /// `ξ₀·derror/error`, or NaN when the sample is under the spike floor.
    pub logsens: f64,
    pub spike: bool,
}

/// The tuple `(A₀, S, c, v, ξ₀)` with `e(t) = c·exp(A₀t)·v`.
#[derive(Debug, Clone)]
pub struct ErrorSystem {
    a0: RMat,
    s: RMat,
    c: RVec,
    v: RVec,
    xi0: f64,
    spectrum: Spectrum,
    couplings: Couplings,
}

impl ErrorSystem {
    /// Builds the system on the diagonalizable path. Rejects generators with
    /// an eigenvalue of positive real part.
    pub fn new(a0: RMat, s: RMat, c: RVec, v: RVec, xi0: f64) -> Result<Self, SensanError> {
        Self::validate(&a0, &s, &c, &v, xi0)?;
        let spectrum = eig_decompose(&a0, DEFAULT_CLUSTER_TOL)?;
        Self::assemble(a0, s, c, v, xi0, spectrum)
    }

    /// Builds the system with a dominant Jordan block of size `ell`.
    pub fn with_jordan(
        a0: RMat,
        s: RMat,
        c: RVec,
        v: RVec,
        xi0: f64,
        ell: usize,
    ) -> Result<Self, SensanError> {
        Self::validate(&a0, &s, &c, &v, xi0)?;
        let spectrum = jordan_decompose(&a0, ell, DEFAULT_CLUSTER_TOL)?;
        Self::assemble(a0, s, c, v, xi0, spectrum)
    }

    fn validate(a0: &RMat, s: &RMat, c: &RVec, v: &RVec, xi0: f64) -> Result<(), SensanError> {
        let n = a0.nrows();
        if a0.ncols() != n || s.shape() != (n, n) || c.len() != n || v.len() != n {
            return Err(SensanError::Dimension(format!(
                "A0 {}x{}, S {}x{}, c {}, v {}",
                a0.nrows(),
                a0.ncols(),
                s.nrows(),
                s.ncols(),
                c.len(),
                v.len()
            )));
        }
        if !xi0.is_finite() {
            return Err(SensanError::NonFinite(xi0));
        }
        if !all_finite(s) || c.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(SensanError::NonFinite(f64::NAN));
        }
        Ok(())
    }

    fn assemble(
        a0: RMat,
        s: RMat,
        c: RVec,
        v: RVec,
        xi0: f64,
        spectrum: Spectrum,
    ) -> Result<Self, SensanError> {
        let margin = 1e-9 * (1.0 + spectrum.spectral_radius());
        if let Some(l) = spectrum.eigenvalues.iter().find(|l| l.re > margin) {
            return Err(SensanError::Unstable { re: l.re, im: l.im });
        }
        let couplings = Couplings::new(&spectrum, &c, &s, &v)?;
        Ok(ErrorSystem {
            a0,
            s,
            c,
            v,
            xi0,
            spectrum,
            couplings,
        })
    }

    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }
    pub fn a0(&self) -> &RMat {
        &self.a0
    }
    pub fn s(&self) -> &RMat {
        &self.s
    }
    pub fn c(&self) -> &RVec {
        &self.c
    }
    pub fn v(&self) -> &RVec {
        &self.v
    }
    pub fn xi0(&self) -> f64 {
        self.xi0
    }
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }
    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    /// Whether the eigenbasis formulas apply (diagonalizable, or with an
    /// explicit Jordan chain).
    pub fn has_analytic_path(&self) -> bool {
        !self.spectrum.jordan_blocks.is_empty() || !self.spectrum.near_defective
    }

    /// `e(t)` together with the modal magnitude used by the spike floor.
    pub fn error_with_scale(&self, t: f64) -> (f64, f64) {
        if self.has_analytic_path() {
            let z = &self.couplings.z;
            let w = &self.couplings.w;
            if self.spectrum.jordan_blocks.is_empty() {
                let mut e = C64::new(0.0, 0.0);
                let mut scale = 0.0;
                for k in 0..self.dim() {
                    let term = z[k] * w[k] * (self.spectrum.eigenvalues[k] * t).exp();
                    e += term;
                    scale += term.norm();
                }
                (e.re, scale)
            } else {
                let ej = self.spectrum.exp_jordan(t);
                let mut e = C64::new(0.0, 0.0);
                let mut scale = 0.0;
                for i in 0..self.dim() {
                    for j in 0..self.dim() {
                        let term = z[i] * ej[(i, j)] * w[j];
                        e += term;
                        scale += term.norm();
                    }
                }
                (e.re, scale)
            }
        } else {
            let y = (&self.a0 * t).exp() * &self.v;
            let e = self.c.dot(&y);
            let scale = self
                .c
                .iter()
                .zip(y.iter())
                .map(|(a, b)| (a * b).abs())
                .sum();
            (e, scale)
        }
    }

    /// `e(t) = c·exp(A₀t)·v`.
    pub fn error_signal(&self, t: f64) -> f64 {
        self.error_with_scale(t).0
    }

    /// `∂e/∂ξ = c·D_S(t, A₀)·v` by the requested route.
    pub fn derror(&self, t: f64, method: DerivMethod) -> Result<f64, SensanError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(SensanError::InvalidGrid(format!(
                "time {t} is not a finite non-negative value"
            )));
        }
        let d = match method {
            DerivMethod::Analytic => {
                if !self.has_analytic_path() {
                    return Err(SensanError::NearDefective {
                        condition: self.spectrum.condition,
                    });
                }
                return self.derror_analytic(t);
            }
            DerivMethod::Quadrature => {
                dderiv_oracle_quadrature(&self.a0, &self.s, t, DEFAULT_QUADRATURE_TOL)?
            }
            DerivMethod::Blockaug => dderiv_oracle_blockaug(&self.a0, &self.s, t)?,
            DerivMethod::Fd => dderiv_oracle_fd(&self.a0, &self.s, t)?,
        };
        Ok(self.c.dot(&(d * &self.v)))
    }

    /// The full matrix `D_S(t, A₀)` by the requested route; the analytic
    /// route reuses the stored spectrum, including any Jordan chain.
    pub fn dderiv(&self, t: f64, method: DerivMethod) -> Result<RMat, SensanError> {
        Ok(match method {
            DerivMethod::Analytic if !self.spectrum.jordan_blocks.is_empty() => {
                dderiv_jordan(&self.spectrum, &self.couplings.sbar, t)?
            }
            DerivMethod::Analytic if self.has_analytic_path() => {
                dderiv_diag(&self.spectrum, &self.couplings.sbar, t)?
            }
            DerivMethod::Analytic => {
                return Err(SensanError::NearDefective {
                    condition: self.spectrum.condition,
                })
            }
            other => directional_derivative(&self.a0, &self.s, t, other)?,
        })
    }

    fn derror_analytic(&self, t: f64) -> Result<f64, SensanError> {
        let x = eigen_derivative(&self.spectrum, &self.couplings.sbar, t)?;
        let z = &self.couplings.z;
        let w = &self.couplings.w;
        let mut acc = C64::new(0.0, 0.0);
        let mut mag = 0.0;
        for m in 0..self.dim() {
            for n in 0..self.dim() {
                let term = z[m] * x[(m, n)] * w[n];
                acc += term;
                mag += term.norm();
            }
        }
        let mut tolerance = 1e-9 * mag + f64::MIN_POSITIVE;
        if acc.im.abs() > tolerance {
            // roundoff in S̄ carried through the kernel magnitudes
            let n = self.dim();
            let kern = eigen_derivative(
                &self.spectrum,
                &CMat::from_element(n, n, C64::new(1.0, 0.0)),
                t,
            )?;
            let smax = self
                .couplings
                .sbar
                .iter()
                .fold(0.0f64, |a, z| a.max(z.norm()));
            let mut spread = 0.0;
            for m in 0..n {
                for k in 0..n {
                    spread += z[m].norm() * kern[(m, k)].norm() * w[k].norm();
                }
            }
            tolerance += 1e2 * f64::EPSILON * self.spectrum.condition * smax * spread;
        }
        if acc.im.abs() > tolerance {
            return Err(crate::matexp::MatexpError::ImaginaryResidue {
                residue: acc.im.abs(),
                tolerance,
            }
            .into());
        }
        Ok(acc.re)
    }

    /// Full sample at `t`.
    pub fn sample(&self, t: f64, method: DerivMethod) -> Result<Sample, SensanError> {
        let (error, scale) = self.error_with_scale(t);
        let derror = self.derror(t, method)?;
        let spike = error.abs() <= SPIKE_FLOOR * scale || error == 0.0;
        let logsens = if spike {
            f64::NAN
        } else {
            self.xi0 * derror / error
        };
        Ok(Sample {
            t,
            error,
            derror,
            logsens,
            spike,
        })
    }

    /// `s(ξ₀, t) = ξ₀·(∂e/∂ξ)/e`, `None` when `|e(t)|` is under the spike floor.
    pub fn log_sensitivity(&self, t: f64) -> Result<Option<f64>, SensanError> {
        let s = self.sample(t, DerivMethod::Analytic)?;
        Ok(if s.spike { None } else { Some(s.logsens) })
    }

    /// Input couplings for an alternative input vector (e.g. `β` instead of
    /// `-k₀β`).
    pub fn couplings_for_input(&self, input: &RVec) -> Couplings {
        self.couplings.with_input(&self.spectrum, input)
    }

    /// Modal products `z_k w_k`.
    pub fn modal_weights(&self) -> CVec {
        self.couplings.z.component_mul(&self.couplings.w)
    }

    /// The system under the change of coordinates `x ↦ Tx`.
    pub fn transformed(&self, t: &RMat) -> Result<Self, SensanError> {
        let tinv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| SensanError::Dimension("transformation is singular".into()))?;
        let a0 = t * &self.a0 * &tinv;
        let s = t * &self.s * &tinv;
        let c = (self.c.transpose() * &tinv).transpose();
        let v = t * &self.v;
        if self.spectrum.jordan_blocks.is_empty() {
            Self::new(a0, s, c, v, self.xi0)
        } else {
            Self::with_jordan(a0, s, c, v, self.xi0, self.spectrum.jordan_blocks[0].size)
        }
    }

    /// Readout projection of an arbitrary vector, `c·x`.
    pub fn readout(&self, x: &RVec) -> f64 {
        self.c.dot(x)
    }
}
