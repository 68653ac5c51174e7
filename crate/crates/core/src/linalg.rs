//! Dense matrix aliases and small helpers shared across modules.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;
pub type RVec = DVector<f64>;
pub type CVec = DVector<C64>;

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn to_complex_vec(v: &RVec) -> CVec {
    v.map(|x| C64::new(x, 0.0))
}

/// Largest imaginary magnitude and the real part of a complex matrix.
pub fn split_real(m: &CMat) -> (RMat, f64) {
    let residue = m.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    (m.map(|z| z.re), residue)
}

pub fn all_finite(m: &RMat) -> bool {
    m.iter().all(|x| x.is_finite())
}

/// `‖a - b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn rel_diff(a: &RMat, b: &RMat) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// `e^x - 1` divided by `x`, accurate near zero.
pub(crate) fn expm1_over_x(x: C64) -> C64 {
    if x.norm() < 1e-3 {
        // 1 + x/2 + x²/6 + x³/24 + x⁴/120 + x⁵/720
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=7 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - 1.0) / x
    }
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Option<RMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(RMat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}
