//! Step-tracking closed loops: pole placement, reference gain and the
//! spring-mass and RLC builders.
//!
//! The plant is `ẋ = (A₁ + Sξ)x + bu`, `y = cx`, with state feedback
//! `u = -kx + k₀r`. For a unit step reference the tracking error
//! `e(t) = 1 - y(t)` equals `c·exp(A₀t)·v` with `A₀ = A₁ - bk + Sξ₀`,
//! `β = A₀⁻¹b`, `k₀ = -1/(cβ)` and `v = -k₀β`.

use std::f64::consts::PI;

use nalgebra::SVD;
use thiserror::Error;

use crate::linalg::{RMat, RVec, C64};
use crate::matexp::{eig_decompose, DEFAULT_CLUSTER_TOL};
use crate::sensan::{ErrorSystem, SensanError};

pub const SPRING_MASS_XI0: f64 = 4.0;
pub const RLC_XI0: f64 = 0.5;
/// Third closed-loop pole of the complex RLC design.
pub const RLC_COMPLEX_THIRD_POLE: f64 = -5.0;

pub fn spring_mass_real_poles() -> Vec<C64> {
    vec![C64::new(-2.0, 0.0), C64::new(-5.0, 0.0)]
}

pub fn spring_mass_complex_poles() -> Vec<C64> {
    vec![C64::new(-1.0, PI / 5.0), C64::new(-1.0, -PI / 5.0)]
}

pub fn rlc_real_poles() -> Vec<C64> {
    vec![
        C64::new(-1.0, 0.0),
        C64::new(-2.0, 0.0),
        C64::new(-4.0, 0.0),
    ]
}

pub fn rlc_complex_poles(third: f64) -> Vec<C64> {
    vec![
        C64::new(-2.0, PI / 10.0),
        C64::new(-2.0, -PI / 10.0),
        C64::new(third, 0.0),
    ]
}

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("(A, b) is not controllable (controllability matrix condition {0:e})")]
    Uncontrollable(f64),
    #[error("pole set is not closed under conjugation")]
    NotSelfConjugate,
    #[error("pole {re} + {im}i has positive real part")]
    UnstablePole { re: f64, im: f64 },
    #[error("expected {expected} poles, got {got}")]
    PoleCount { expected: usize, got: usize },
    #[error("placed eigenvalues deviate from the requested poles by {0:e}")]
    PlacementInaccurate(f64),
    #[error("closed-loop generator is singular (pole at the origin)")]
    SingularGenerator,
    #[error("reference is unreachable at DC (c·A0⁻¹·b = 0)")]
    UnreachableReference,
    #[error(transparent)]
    Sensan(#[from] SensanError),
}

/// `ẋ = (A₁ + Sξ)x + bu`, `y = cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLoopPlant {
    pub a1: RMat,
    pub b: RVec,
    pub c: RVec,
    pub s: RMat,
    pub xi0: f64,
}

impl OpenLoopPlant {
    pub fn new(a1: RMat, b: RVec, c: RVec, s: RMat, xi0: f64) -> Result<Self, ClassicalError> {
        let n = a1.nrows();
        if a1.ncols() != n || b.len() != n || c.len() != n || s.shape() != (n, n) {
            return Err(ClassicalError::Dimension(format!(
                "A1 {}x{}, b {}, c {}, S {}x{}",
                a1.nrows(),
                a1.ncols(),
                b.len(),
                c.len(),
                s.nrows(),
                s.ncols()
            )));
        }
        let plant = OpenLoopPlant { a1, b, c, s, xi0 };
        controllability(&plant.nominal_a(), &plant.b)?;
        Ok(plant)
    }

    pub fn dim(&self) -> usize {
        self.a1.nrows()
    }

    /// `A₁ + Sξ₀`.
    pub fn nominal_a(&self) -> RMat {
        &self.a1 + &self.s * self.xi0
    }

    /// `A₁ + Sξ`.
    pub fn a_at(&self, xi: f64) -> RMat {
        &self.a1 + &self.s * xi
    }
}

#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub plant: OpenLoopPlant,
    pub poles: Vec<C64>,
    pub k: RVec,
    pub k0: f64,
    pub a0: RMat,
    pub beta: RVec,
}

impl ClosedLoop {
    /// `v = -k₀β`.
    pub fn effective_input(&self) -> RVec {
        &self.beta * -self.k0
    }

    pub fn error_system(&self) -> Result<ErrorSystem, SensanError> {
        ErrorSystem::new(
            self.a0.clone(),
            self.plant.s.clone(),
            self.plant.c.clone(),
            self.effective_input(),
            self.plant.xi0,
        )
    }

    /// `-k₀·c·A₀⁻¹·b`, unity by construction.
    pub fn dc_gain(&self) -> f64 {
        -self.k0 * self.plant.c.dot(&self.beta)
    }
}

fn controllability_matrix(a: &RMat, b: &RVec) -> RMat {
    let n = a.nrows();
    let mut cols = Vec::with_capacity(n);
    let mut col = b.clone();
    for _ in 0..n {
        cols.push(col.clone());
        col = a * col;
    }
    RMat::from_columns(&cols)
}

fn controllability(a: &RMat, b: &RVec) -> Result<RMat, ClassicalError> {
    let cm = controllability_matrix(a, b);
    let sv = SVD::new(cm.clone(), false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    let cond = if min == 0.0 { f64::INFINITY } else { max / min };
    if cond.is_nan() || cond >= 1e12 {
        return Err(ClassicalError::Uncontrollable(cond));
    }
    Ok(cm)
}

fn check_poles(poles: &[C64]) -> Result<(), ClassicalError> {
    let mut used = vec![false; poles.len()];
    for (i, p) in poles.iter().enumerate() {
        if p.re > 0.0 {
            return Err(ClassicalError::UnstablePole { re: p.re, im: p.im });
        }
        if used[i] || p.im == 0.0 {
            continue;
        }
        let tol = 1e-12 * (1.0 + p.norm());
        let partner =
            (0..poles.len()).find(|&j| j != i && !used[j] && (poles[j] - p.conj()).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => return Err(ClassicalError::NotSelfConjugate),
        }
    }
    Ok(())
}

/// Real coefficients of `Π (s - p_i)`, highest degree first (monic).
fn char_poly(poles: &[C64]) -> Vec<f64> {
    let mut coef = vec![C64::new(1.0, 0.0)];
    for p in poles {
        let mut next = vec![C64::new(0.0, 0.0); coef.len() + 1];
        for (i, c) in coef.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * p;
        }
        coef = next;
    }
    coef.into_iter().map(|c| c.re).collect()
}

/// Ackermann's formula `k = e_nᵀ C⁻¹ φ(A)` for single-input pole placement.
pub fn place_poles(a: &RMat, b: &RVec, poles: &[C64]) -> Result<RVec, ClassicalError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(ClassicalError::Dimension(format!(
            "A {}x{}, b {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if poles.len() != n {
        return Err(ClassicalError::PoleCount {
            expected: n,
            got: poles.len(),
        });
    }
    check_poles(poles)?;
    let cm = controllability(a, b)?;
    let coef = char_poly(poles);
    // φ(A) by Horner's rule
    let mut phi = RMat::identity(n, n) * coef[0];
    for &c in &coef[1..] {
        phi = &phi * a + RMat::identity(n, n) * c;
    }
    let mut en = RVec::zeros(n);
    en[n - 1] = 1.0;
    let row = cm
        .transpose()
        .lu()
        .solve(&en)
        .ok_or(ClassicalError::Uncontrollable(f64::INFINITY))?;
    let k = (row.transpose() * phi).transpose();
    Ok(k)
}

fn max_pole_mismatch(a0: &RMat, poles: &[C64]) -> Result<f64, ClassicalError> {
    let spec = eig_decompose(a0, DEFAULT_CLUSTER_TOL).map_err(SensanError::from)?;
    let mut remaining: Vec<C64> = poles.to_vec();
    let mut worst = 0.0f64;
    for l in &spec.eigenvalues {
        let (idx, d) = remaining
            .iter()
            .enumerate()
            .map(|(i, p)| (i, (p - l).norm() / (1.0 + p.norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pole count matches dimension");
        worst = worst.max(d);
        remaining.swap_remove(idx);
    }
    Ok(worst)
}

/// Places the poles of `A₁ + Sξ₀ - bk` and sets `k₀` for unit DC gain.
pub fn close_loop(plant: &OpenLoopPlant, poles: &[C64]) -> Result<ClosedLoop, ClassicalError> {
    let a = plant.nominal_a();
    let k = place_poles(&a, &plant.b, poles)?;
    let a0 = &a - &plant.b * k.transpose();
    // repeated poles are only recovered to the square root of machine precision
    let repeated = poles.iter().enumerate().any(|(i, p)| {
        poles[i + 1..]
            .iter()
            .any(|q| (p - q).norm() <= 1e-9 * (1.0 + p.norm()))
    });
    let mismatch = max_pole_mismatch(&a0, poles)?;
    if mismatch > if repeated { 1e-5 } else { 1e-8 } {
        return Err(ClassicalError::PlacementInaccurate(mismatch));
    }
    if poles.iter().any(|p| p.norm() == 0.0) {
        return Err(ClassicalError::SingularGenerator);
    }
    let beta = a0
        .clone()
        .lu()
        .solve(&plant.b)
        .ok_or(ClassicalError::SingularGenerator)?;
    let cb = plant.c.dot(&beta);
    if cb.abs() <= 1e-14 * plant.c.norm() * beta.norm() {
        return Err(ClassicalError::UnreachableReference);
    }
    Ok(ClosedLoop {
        plant: plant.clone(),
        poles: poles.to_vec(),
        k,
        k0: -1.0 / cb,
        a0,
        beta,
    })
}

fn positive(name: &'static str, value: f64) -> Result<(), ClassicalError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ClassicalError::NonPositive { name, value })
    }
}

/// Mass on a spring with the spring constant `ξ` uncertain:
/// `Ã(ξ) = [[0, 1], [-ξ, 0]]`, `b = e₂`, `c = e₁`.
pub fn spring_mass_plant(xi0: f64) -> Result<OpenLoopPlant, ClassicalError> {
    positive("xi0", xi0)?;
    OpenLoopPlant::new(
        RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        RVec::from_vec(vec![0.0, 1.0]),
        RVec::from_vec(vec![1.0, 0.0]),
        RMat::from_row_slice(2, 2, &[0.0, 0.0, -1.0, 0.0]),
        xi0,
    )
}

pub fn spring_mass_scenario(xi0: f64, poles: &[C64]) -> Result<ClosedLoop, ClassicalError> {
    close_loop(&spring_mass_plant(xi0)?, poles)
}

/// RLC circuit with the inverse inductance `ξ` uncertain:
/// `Ã(ξ) = [[-1, 1, -1], [1, -2, 0], [ξ, 0, -ξ]]`, `b = e₂`, `c = e₁`.
pub fn rlc_plant(xi0: f64) -> Result<OpenLoopPlant, ClassicalError> {
    positive("xi0", xi0)?;
    OpenLoopPlant::new(
        RMat::from_row_slice(3, 3, &[-1.0, 1.0, -1.0, 1.0, -2.0, 0.0, 0.0, 0.0, 0.0]),
        RVec::from_vec(vec![0.0, 1.0, 0.0]),
        RVec::from_vec(vec![1.0, 0.0, 0.0]),
        RMat::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0]),
        xi0,
    )
}

pub fn rlc_scenario(xi0: f64, poles: &[C64]) -> Result<ClosedLoop, ClassicalError> {
    close_loop(&rlc_plant(xi0)?, poles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ackermann_spring_mass() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, -4.0, 0.0]);
        let b = RVec::from_vec(vec![0.0, 1.0]);
        let k = place_poles(&a, &b, &spring_mass_real_poles()).unwrap();
        assert!((k[0] - 6.0).abs() < 1e-12 && (k[1] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn existing_poles_need_no_feedback() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, -10.0, -7.0]);
        let b = RVec::from_vec(vec![0.0, 1.0]);
        let k = place_poles(&a, &b, &spring_mass_real_poles()).unwrap();
        assert!(k.amax() < 1e-12);
    }

    #[test]
    fn spring_mass_closed_loop() {
        let cl = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_real_poles()).unwrap();
        assert!((cl.k0 - 10.0).abs() < 1e-12);
        let v = cl.effective_input();
        assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
        assert!((cl.dc_gain() - 1.0).abs() < 1e-12);
        let expect = RMat::from_row_slice(2, 2, &[0.0, 1.0, -4.0, 0.0]);
        assert_eq!(spring_mass_plant(4.0).unwrap().nominal_a(), expect);
    }

    #[test]
    fn rlc_nominal_matrix() {
        let p = rlc_plant(RLC_XI0).unwrap();
        let expect = RMat::from_row_slice(3, 3, &[-1.0, 1.0, -1.0, 1.0, -2.0, 0.0, 0.5, 0.0, -0.5]);
        assert_eq!(p.nominal_a(), expect);
        let cl = close_loop(&p, &rlc_real_poles()).unwrap();
        assert!((cl.k0 - 16.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            spring_mass_plant(0.0),
            Err(ClassicalError::NonPositive { .. })
        ));
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, -4.0, 0.0]);
        let b = RVec::from_vec(vec![0.0, 1.0]);
        let bad = [C64::new(-1.0, 1.0), C64::new(-2.0, 0.0)];
        assert!(matches!(
            place_poles(&a, &b, &bad),
            Err(ClassicalError::NotSelfConjugate)
        ));
        let uncontrollable = RMat::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -2.0]);
        assert!(matches!(
            place_poles(
                &uncontrollable,
                &RVec::from_vec(vec![1.0, 0.0]),
                &spring_mass_real_poles()
            ),
            Err(ClassicalError::Uncontrollable(_))
        ));
    }
}
