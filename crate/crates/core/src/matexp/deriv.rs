use super::{check_time, phi_entry, phi_matrix, MatexpError, Spectrum};
use crate::linalg::{split_real, CMat, RMat, C64};

/// `∫₀¹ e^{xu} u^p/p! du` by its power series (for moderate `|x|`).
fn moment_series(x: C64, p: usize) -> C64 {
    let pfact: f64 = (1..=p).map(|k| k as f64).product();
    let mut sum = C64::new(0.0, 0.0);
    let mut xk = C64::new(1.0, 0.0);
    let mut kfact = 1.0;
    for k in 0..80 {
        if k > 0 {
            xk *= x;
            kfact *= k as f64;
        }
        let term = xk / (kfact * pfact * (p + k + 1) as f64);
        sum += term;
        if term.norm() <= f64::EPSILON * sum.norm() {
            break;
        }
    }
    sum
}

/// `C(μ, λ, p, t) = ∫₀ᵗ e^{μ(t-τ)} e^{λτ} τ^p/p! dτ`; `same` selects the
/// coincident-eigenvalue branch `e^{λt} t^{p+1}/(p+1)!`.
fn conv_moment(mu: C64, lambda: C64, p: usize, t: f64, same: bool) -> C64 {
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let pf: f64 = (1..=p).map(|k| k as f64).product();
    if same {
        return (lambda * t).exp() * t.powi(p as i32 + 1) / (pf * (p + 1) as f64);
    }
    let delta = lambda - mu;
    let x = delta * t;
    if x.norm() < 1.0 {
        // e^{μt} t^{p+1} ∫₀¹ e^{xu} u^p/p! du, with |x| < 1 so no overflow
        return (mu * t).exp() * t.powi(p as i32 + 1) * moment_series(x, p);
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut fact = pf;
    let mut dpow = delta;
    for i in 0..=p {
        // t^{p-i} / ((p-i)! δ^{i+1})
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * t.powi((p - i) as i32) / (fact * dpow);
        if p > i {
            fact /= (p - i) as f64;
        }
        dpow *= delta;
    }
    let sign = if (p + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    (lambda * t).exp() * sum + sign * (mu * t).exp() / (dpow / delta)
}

/// `∫₀ᵗ e^{μa(t-τ)} (t-τ)^p/p! · e^{μb τ} τ^q/q! dτ`.
fn kernel(mu_a: C64, mu_b: C64, p: usize, q: usize, t: f64, same: bool) -> C64 {
    match (p, q) {
        (0, 0) if !same => phi_entry(mu_a, mu_b, t),
        (0, _) => conv_moment(mu_a, mu_b, q, t, same),
        (_, 0) => conv_moment(mu_b, mu_a, p, t, same),
        _ => {
            // both inside the block, so μa = μb
            let n = p + q + 1;
            let nf: f64 = (1..=n).map(|k| k as f64).product();
            (mu_a * t).exp() * t.powi(n as i32) / nf
        }
    }
}

fn check_sbar(spec: &Spectrum, sbar: &CMat) -> Result<(), MatexpError> {
    let n = spec.dim();
    if sbar.nrows() != n || sbar.ncols() != n {
        return Err(MatexpError::Dimension(format!(
            "S̄ is {}x{}, spectrum has dimension {n}",
            sbar.nrows(),
            sbar.ncols()
        )));
    }
    Ok(())
}

/// `X(t) = ∫₀ᵗ e^{(t-τ)J} S̄ e^{τJ} dτ` in eigen-coordinates.
///
/// On the diagonalizable path this is `S̄ ⊙ Φ(t)`; a Jordan chain adds the
/// block-coupling integrals.
pub fn eigen_derivative(spec: &Spectrum, sbar: &CMat, t: f64) -> Result<CMat, MatexpError> {
    check_time(t)?;
    check_sbar(spec, sbar)?;
    if spec.jordan_blocks.is_empty() {
        return Ok(sbar.component_mul(&phi_matrix(spec, t)?));
    }
    let n = spec.dim();
    let lam = &spec.eigenvalues;
    // (first, last) index of the block each eigenvalue belongs to
    let span: Vec<(usize, usize)> = (0..n)
        .map(|i| match spec.block_of(i) {
            Some(b) => (b.start, b.start + b.size - 1),
            None => (i, i),
        })
        .collect();
    let mut x = CMat::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let same = spec.cluster_of(i) == spec.cluster_of(k);
            let mut acc = C64::new(0.0, 0.0);
            for j in i..=span[i].1 {
                for l in span[k].0..=k {
                    let s = sbar[(j, l)];
                    if s == C64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += s * kernel(lam[i], lam[k], j - i, k - l, t, same);
                }
            }
            x[(i, k)] = acc;
        }
    }
    Ok(x)
}

fn to_real(spec: &Spectrum, x: &CMat) -> Result<RMat, MatexpError> {
    let full = &spec.m * x * &spec.minv;
    let (re, residue) = split_real(&full);
    // magnitude of the summands, which may cancel in the result
    let abs = |m: &CMat| m.map(|z| z.norm());
    let summands = (abs(&spec.m) * abs(x) * abs(&spec.minv)).amax();
    let xmax = x.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let tolerance = 1e-9 * re.amax().max(summands) + 1e3 * f64::EPSILON * spec.condition * xmax;
    if residue > tolerance {
        return Err(MatexpError::ImaginaryResidue { residue, tolerance });
    }
    Ok(re)
}

/// `∂e^{At}/∂ξ = M (S̄ ⊙ Φ(t)) M⁻¹` for a diagonalizable spectrum.
pub fn dderiv_diag(spec: &Spectrum, sbar: &CMat, t: f64) -> Result<RMat, MatexpError> {
    if !spec.jordan_blocks.is_empty() || spec.near_defective {
        return Err(MatexpError::Defective {
            condition: spec.condition,
        });
    }
    let x = eigen_derivative(spec, sbar, t)?;
    to_real(spec, &x)
}

/// `∂e^{At}/∂ξ` for a spectrum with one dominant Jordan block.
pub fn dderiv_jordan(spec: &Spectrum, sbar: &CMat, t: f64) -> Result<RMat, MatexpError> {
    match spec.jordan_blocks.as_slice() {
        [] => Err(MatexpError::MissingJordanChain),
        [b] if b.size < 2 => Err(MatexpError::TrivialJordanBlock),
        [_] => {
            let x = eigen_derivative(spec, sbar, t)?;
            to_real(spec, &x)
        }
        _ => Err(MatexpError::UnsupportedJordan(
            "more than one non-trivial block".into(),
        )),
    }
}
