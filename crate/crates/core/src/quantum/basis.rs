use nalgebra::SVD;

use super::QuantumError;
use crate::linalg::{CMat, RMat, RVec, C64};

/// Orthonormal Hermitian basis, `Tr(σ_m σ_n) = δ_mn`, with `σ_{N²} = I/√N`.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    pub dim: usize,
    pub sigmas: Vec<CMat>,
}

impl HermitianBasis {
    /// Number of basis elements, `N²`.
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }
}

/// Generalized Gell-Mann basis: symmetric pairs `(E_jk + E_kj)/√2` in
/// row-major order, antisymmetric pairs `(-iE_jk + iE_kj)/√2`, diagonal
/// matrices `diag(1,…,1,-l,0,…)/√(l(l+1))`, then `I/√N`.
pub fn gellmann_basis(n: usize) -> Result<HermitianBasis, QuantumError> {
    if n < 2 {
        return Err(QuantumError::DimensionTooSmall(n));
    }
    let one = C64::new(1.0, 0.0);
    let r2 = std::f64::consts::SQRT_2;
    let mut sigmas = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in j + 1..n {
            let mut m = CMat::zeros(n, n);
            m[(j, k)] = one / r2;
            m[(k, j)] = one / r2;
            sigmas.push(m);
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            let mut m = CMat::zeros(n, n);
            m[(j, k)] = C64::new(0.0, -1.0 / r2);
            m[(k, j)] = C64::new(0.0, 1.0 / r2);
            sigmas.push(m);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMat::zeros(n, n);
        for i in 0..l {
            m[(i, i)] = one / norm;
        }
        m[(l, l)] = -(l as f64) * one / norm;
        sigmas.push(m);
    }
    sigmas.push(CMat::identity(n, n) / C64::new((n as f64).sqrt(), 0.0));
    Ok(HermitianBasis { dim: n, sigmas })
}

fn check_square(m: &CMat, n: usize, what: &str) -> Result<(), QuantumError> {
    if m.nrows() != n || m.ncols() != n {
        return Err(QuantumError::Dimension(format!(
            "{what} is {}x{}, basis dimension is {n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn hermitian_residue(m: &CMat) -> f64 {
    (m - m.adjoint())
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn trace_product(a: &CMat, b: &CMat) -> C64 {
    // Tr(AB) without forming the product
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `A_mn = Tr(iH[σ_m, σ_n])`; real and antisymmetric for Hermitian `H`.
pub fn bloch_coherent(h: &CMat, basis: &HermitianBasis) -> Result<RMat, QuantumError> {
    check_square(h, basis.dim, "H")?;
    let scale = 1.0 + h.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let residue = hermitian_residue(h);
    if residue > 1e-12 * scale {
        return Err(QuantumError::NotHermitian(residue));
    }
    let n2 = basis.len();
    let i = C64::new(0.0, 1.0);
    // Hσ_m products reused across n
    let hs: Vec<CMat> = basis.sigmas.iter().map(|s| h * s).collect();
    let mut a = RMat::zeros(n2, n2);
    let mut imag = 0.0f64;
    for m in 0..n2 {
        for k in 0..n2 {
            // Tr(H σ_m σ_k) - Tr(H σ_k σ_m)
            let v = i
                * (trace_product(&hs[m], &basis.sigmas[k])
                    - trace_product(&hs[k], &basis.sigmas[m]));
            a[(m, k)] = v.re;
            imag = imag.max(v.im.abs());
        }
    }
    if imag > 1e-10 * scale {
        return Err(QuantumError::NotHermitian(imag));
    }
    Ok(a)
}

/// `L_mn = Tr(V†σ_m V σ_n - ½ V†V {σ_m, σ_n})`.
pub fn bloch_dissipator(v: &CMat, basis: &HermitianBasis) -> Result<RMat, QuantumError> {
    check_square(v, basis.dim, "V")?;
    let n2 = basis.len();
    let vd = v.adjoint();
    let vdv = &vd * v;
    let left: Vec<CMat> = basis.sigmas.iter().map(|s| &vd * s * v).collect();
    let anti: Vec<CMat> = basis.sigmas.iter().map(|s| &vdv * s).collect();
    let mut l = RMat::zeros(n2, n2);
    for m in 0..n2 {
        for k in 0..n2 {
            let val = trace_product(&left[m], &basis.sigmas[k])
                - 0.5
                    * (trace_product(&anti[m], &basis.sigmas[k])
                        + trace_product(&anti[k], &basis.sigmas[m]));
            l[(m, k)] = val.re;
        }
    }
    Ok(l)
}

/// `r_m = Tr(σ_m ρ)` for a valid density matrix.
pub fn bloch_state(rho: &CMat, basis: &HermitianBasis) -> Result<RVec, QuantumError> {
    check_square(rho, basis.dim, "rho")?;
    let residue = hermitian_residue(rho);
    if residue > 1e-10 {
        return Err(QuantumError::InvalidDensity(format!(
            "not Hermitian (residue {residue:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(QuantumError::InvalidDensity(format!("trace is {tr}")));
    }
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    let min_eig = herm.symmetric_eigenvalues().min();
    if min_eig < -1e-10 {
        return Err(QuantumError::InvalidDensity(format!(
            "not positive semidefinite (eigenvalue {min_eig:e})"
        )));
    }
    Ok(RVec::from_iterator(
        basis.len(),
        basis.sigmas.iter().map(|s| trace_product(s, rho).re),
    ))
}

/// `Σ r_m σ_m`.
pub fn density_from_bloch(r: &RVec, basis: &HermitianBasis) -> Result<CMat, QuantumError> {
    if r.len() != basis.len() {
        return Err(QuantumError::Dimension(format!(
            "Bloch vector has length {}, basis has {}",
            r.len(),
            basis.len()
        )));
    }
    let n = basis.dim;
    Ok(basis
        .sigmas
        .iter()
        .zip(r.iter())
        .fold(CMat::zeros(n, n), |acc, (s, &x)| acc + s * C64::new(x, 0.0)))
}

/// Null vector of the Bloch generator scaled so its identity component is
/// `1/√N`. The null space is found by SVD with threshold `1e-10·σ_max`.
pub fn steady_state(g: &RMat) -> Result<RVec, QuantumError> {
    let n2 = g.nrows();
    if g.ncols() != n2 || n2 < 4 {
        return Err(QuantumError::Dimension(format!(
            "generator is {}x{}, expected N²xN² with N ≥ 2",
            g.nrows(),
            g.ncols()
        )));
    }
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 {
        return Err(QuantumError::Dimension(format!(
            "{n2} is not a perfect square"
        )));
    }
    let svd = SVD::new(g.clone(), false, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let thresh = 1e-10 * smax;
    let null: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= thresh).collect();
    if null.len() != 1 {
        return Err(QuantumError::SteadyStateMultiplicity(null.len()));
    }
    let v_t = svd.v_t.expect("right singular vectors requested");
    let r = v_t.row(null[0]).transpose();
    let last = r[n2 - 1];
    if last.abs() < 1e-12 {
        return Err(QuantumError::SteadyStateNormalization);
    }
    Ok(r * (1.0 / ((n as f64).sqrt() * last)))
}

/// Error readout `c` for a target Bloch vector.
pub fn target_readout(target: &RVec) -> RVec {
    let n2 = target.len();
    let n = (n2 as f64).sqrt().round();
    let mut c = -target.clone();
    c[n2 - 1] = (n - 1.0) / n.sqrt();
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(b: &HermitianBasis) -> f64 {
        let mut worst = 0.0f64;
        for (m, sm) in b.sigmas.iter().enumerate() {
            for (k, sk) in b.sigmas.iter().enumerate() {
                let expect = if m == k { 1.0 } else { 0.0 };
                worst = worst.max((trace_product(sm, sk) - C64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    #[test]
    fn orthonormal_bases() {
        for n in 2..=5 {
            let b = gellmann_basis(n).unwrap();
            assert_eq!(b.len(), n * n);
            assert!(gram(&b) < 1e-12);
            let traceless = b.sigmas.iter().filter(|s| s.trace().norm() < 1e-14).count();
            assert_eq!(traceless, n * n - 1);
        }
        assert!(matches!(
            gellmann_basis(1),
            Err(QuantumError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn identity_hamiltonian_is_inert() {
        let b = gellmann_basis(3).unwrap();
        let a = bloch_coherent(&CMat::identity(3, 3), &b).unwrap();
        assert!(a.amax() < 1e-15);
    }

    #[test]
    fn maximally_mixed_state() {
        let b = gellmann_basis(3).unwrap();
        let r = bloch_state(&(CMat::identity(3, 3) / C64::new(3.0, 0.0)), &b).unwrap();
        for m in 0..8 {
            assert!(r[m].abs() < 1e-15);
        }
        assert!((r[8] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_density() {
        let b = gellmann_basis(2).unwrap();
        let bad = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            bloch_state(&bad, &b),
            Err(QuantumError::InvalidDensity(_))
        ));
    }

    #[test]
    fn zero_generator_has_full_null_space() {
        let g = RMat::zeros(4, 4);
        assert!(matches!(
            steady_state(&g),
            Err(QuantumError::SteadyStateMultiplicity(4))
        ));
    }
}
