use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basis::{
    bloch_coherent, bloch_dissipator, bloch_state, gellmann_basis, steady_state, target_readout,
    HermitianBasis,
};
use super::QuantumError;
use crate::linalg::{CMat, RMat, RVec, C64};
use crate::sensan::ErrorSystem;

/// A Bloch-space model `ṙ = (A + L) r` with readout and perturbation.
#[derive(Debug, Clone)]
pub struct BlochModel {
    pub basis: HermitianBasis,
    pub hamiltonian: CMat,
    pub lindblad: Option<CMat>,
    /// Coherent part `A`.
    pub coherent: RMat,
    /// Dissipative part `L`.
    pub dissipator: RMat,
    pub r0: RVec,
    pub target: RVec,
    pub c: RVec,
    /// Bloch image of the Hamiltonian perturbation.
    pub s: RMat,
    pub xi0: f64,
}

impl BlochModel {
    pub fn generator(&self) -> RMat {
        &self.coherent + &self.dissipator
    }

    pub fn error_system(&self) -> Result<ErrorSystem, QuantumError> {
        Ok(ErrorSystem::new(
            self.generator(),
            self.s.clone(),
            self.c.clone(),
            self.r0.clone(),
            self.xi0,
        )?)
    }
}

/// Which Hamiltonian parameter of the two-qubit model is perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perturbation {
    /// Real part of `α₁`.
    S1,
    /// Real part of `α₂`.
    S2,
    /// `Δ₁`.
    S3,
    /// `Δ₂`.
    S4,
}

impl Perturbation {
    pub const ALL: [Perturbation; 4] = [Self::S1, Self::S2, Self::S3, Self::S4];

    pub fn name(self) -> &'static str {
        match self {
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
            Self::S4 => "S4",
        }
    }

    /// 4x4 structure matrix; entries are 1-based `(row, col)` pairs.
    pub fn matrix(self) -> CMat {
        let ones: &[(usize, usize)] = match self {
            Self::S1 => &[(1, 3), (3, 1), (2, 4), (4, 2)],
            Self::S2 => &[(1, 2), (2, 1), (3, 4), (4, 3)],
            Self::S3 => &[(3, 3), (4, 4)],
            Self::S4 => &[(2, 2), (4, 4)],
        };
        let mut m = CMat::zeros(4, 4);
        for &(i, j) in ones {
            m[(i - 1, j - 1)] = C64::new(1.0, 0.0);
        }
        m
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Perturbation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown perturbation {s:?}, expected S1, S2, S3 or S4"))
    }
}

/// Two coupled qubits with amplitude damping.
#[derive(Debug, Clone)]
pub struct TwoQubitParams {
    pub alpha: [C64; 2],
    pub delta: [f64; 2],
    pub gamma: [f64; 2],
    pub perturbation: Perturbation,
    /// Initial density matrix; `|1⟩⟨1|` when absent.
    pub rho0: Option<CMat>,
}

impl Default for TwoQubitParams {
    fn default() -> Self {
        TwoQubitParams {
            alpha: [C64::new(1.0, 0.0); 2],
            delta: [-0.1, 0.1],
            gamma: [1.0, 1.0],
            perturbation: Perturbation::S1,
            rho0: None,
        }
    }
}

impl TwoQubitParams {
    pub fn hamiltonian(&self) -> CMat {
        let [a1, a2] = self.alpha;
        let [d1, d2] = self.delta;
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        CMat::from_row_slice(
            4,
            4,
            &[
                z,
                a2,
                a1,
                z,
                a2.conj(),
                r(d2),
                z,
                a1,
                a1.conj(),
                z,
                r(d1),
                a2,
                z,
                a1.conj(),
                a2.conj(),
                r(d1 + d2),
            ],
        )
    }

    pub fn lindblad(&self) -> CMat {
        let [g1, g2] = self.gamma;
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        CMat::from_row_slice(
            4,
            4,
            &[
                z,
                r(g2),
                r(g1),
                z,
                z,
                z,
                z,
                r(g1),
                z,
                z,
                z,
                r(g2),
                z,
                z,
                z,
                z,
            ],
        )
    }

    /// Nominal value of the perturbed parameter.
    pub fn xi0(&self) -> f64 {
        match self.perturbation {
            Perturbation::S1 => self.alpha[0].re,
            Perturbation::S2 => self.alpha[1].re,
            Perturbation::S3 => self.delta[0],
            Perturbation::S4 => self.delta[1],
        }
    }
}

fn basis_projector(n: usize, site: usize) -> CMat {
    let mut rho = CMat::zeros(n, n);
    rho[(site, site)] = C64::new(1.0, 0.0);
    rho
}

/// Two-qubit model; the error is the distance of the state to the unique
/// steady state.
pub fn two_qubit_scenario(p: &TwoQubitParams) -> Result<BlochModel, QuantumError> {
    let values = p
        .alpha
        .iter()
        .flat_map(|a| [a.re, a.im])
        .chain(p.delta)
        .chain(p.gamma);
    if let Some(bad) = values.into_iter().find(|x| !x.is_finite()) {
        return Err(QuantumError::InvalidParameter {
            name: "two-qubit parameter",
            requirement: "finite",
            value: bad,
        });
    }
    let basis = gellmann_basis(4)?;
    let h = p.hamiltonian();
    let v = p.lindblad();
    let coherent = bloch_coherent(&h, &basis)?;
    let dissipator = bloch_dissipator(&v, &basis)?;
    let target = steady_state(&(&coherent + &dissipator))?;
    let rho0 = p.rho0.clone().unwrap_or_else(|| basis_projector(4, 0));
    let r0 = bloch_state(&rho0, &basis)?;
    let s = bloch_coherent(&p.perturbation.matrix(), &basis)?;
    Ok(BlochModel {
        c: target_readout(&target),
        basis,
        hamiltonian: h,
        lindblad: Some(v),
        coherent,
        dissipator,
        r0,
        target,
        s,
        xi0: p.xi0(),
    })
}

/// Couplings `J_n = (λ/2)√(n(N-n))`, `n = 1..N-1`.
pub fn chain_couplings(n: usize, lambda: f64) -> Vec<f64> {
    (1..n)
        .map(|k| 0.5 * lambda * ((k * (n - k)) as f64).sqrt())
        .collect()
}

/// Single-excitation spin chain engineered for perfect state transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainParams {
    pub n: usize,
    pub lambda: f64,
    /// 1-based index of the perturbed coupling `J_k` between sites `k` and `k+1`.
    pub coupling: usize,
    /// 1-based site holding the initial excitation.
    pub input_site: usize,
    /// 1-based site the excitation is routed to.
    pub output_site: usize,
}

impl SpinChainParams {
    /// Transfer from site 1 to site `n` in time `π/λ = 5`, perturbing the
    /// last coupling.
    pub fn new(n: usize) -> Self {
        SpinChainParams {
            n,
            lambda: std::f64::consts::PI / 5.0,
            coupling: n.saturating_sub(1),
            input_site: 1,
            output_site: n,
        }
    }

    /// Time of perfect transfer.
    pub fn transfer_time(&self) -> f64 {
        std::f64::consts::PI / self.lambda
    }

    pub fn hamiltonian(&self) -> CMat {
        let mut h = CMat::zeros(self.n, self.n);
        for (k, j) in chain_couplings(self.n, self.lambda).into_iter().enumerate() {
            h[(k, k + 1)] = C64::new(j, 0.0);
            h[(k + 1, k)] = C64::new(j, 0.0);
        }
        h
    }
}

/// Spin-chain model; the error is the infidelity with the output site.
pub fn spin_chain_scenario(p: &SpinChainParams) -> Result<BlochModel, QuantumError> {
    let n = p.n;
    if n < 2 {
        return Err(QuantumError::DimensionTooSmall(n));
    }
    if !(p.lambda.is_finite() && p.lambda > 0.0) {
        return Err(QuantumError::InvalidParameter {
            name: "lambda",
            requirement: "positive and finite",
            value: p.lambda,
        });
    }
    if p.coupling < 1 || p.coupling >= n {
        return Err(QuantumError::InvalidCoupling {
            index: p.coupling,
            max: n - 1,
        });
    }
    for site in [p.input_site, p.output_site] {
        if site < 1 || site > n {
            return Err(QuantumError::InvalidSite {
                index: site,
                max: n,
            });
        }
    }
    let basis = gellmann_basis(n)?;
    let h = p.hamiltonian();
    let coherent = bloch_coherent(&h, &basis)?;
    let mut sh = CMat::zeros(n, n);
    sh[(p.coupling - 1, p.coupling)] = C64::new(1.0, 0.0);
    sh[(p.coupling, p.coupling - 1)] = C64::new(1.0, 0.0);
    let s = bloch_coherent(&sh, &basis)?;
    let r0 = bloch_state(&basis_projector(n, p.input_site - 1), &basis)?;
    let target = bloch_state(&basis_projector(n, p.output_site - 1), &basis)?;
    let xi0 = chain_couplings(n, p.lambda)[p.coupling - 1];
    Ok(BlochModel {
        c: target_readout(&target),
        dissipator: RMat::zeros(n * n, n * n),
        basis,
        hamiltonian: h,
        lindblad: None,
        coherent,
        r0,
        target,
        s,
        xi0,
    })
}
