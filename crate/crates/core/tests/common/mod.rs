#![allow(dead_code)]

use logsens::linalg::{RMat, C64};
use logsens::matexp::{eig_decompose, DEFAULT_CLUSTER_TOL};
use proptest::prelude::*;

/// `max|a - b| / max(max|a|, max|b|)`, or the absolute deviation when both vanish.
pub fn rel_dev(a: &RMat, b: &RMat) -> f64 {
    let diff = (a - b).amax();
    let scale = a.amax().max(b.amax());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn mat(n: usize, vals: &[f64]) -> RMat {
    RMat::from_row_slice(n, n, &vals[..n * n])
}

/// Shifts `m` so its spectral abscissa is `-margin`.
pub fn stabilize(m: RMat, margin: f64) -> RMat {
    let n = m.nrows();
    let alpha = eig_decompose(&m, DEFAULT_CLUSTER_TOL)
        .map(|s| s.spectral_abscissa())
        .unwrap_or_else(|_| m.norm());
    m - RMat::identity(n, n) * (alpha + margin)
}

/// Dimension and enough entries for two `n x n` matrices.
pub fn square_pair(max_n: usize) -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(-1.0f64..1.0, n * n),
            prop::collection::vec(-1.0f64..1.0, n * n),
        )
    })
}

/// `P J P⁻¹` with a Jordan block of size `ell` at `lambda` and simple real
/// eigenvalues `rest`, all below `lambda`.
pub fn defective(lambda: f64, ell: usize, rest: &[f64], p: &RMat) -> RMat {
    let n = ell + rest.len();
    let mut j = RMat::zeros(n, n);
    for i in 0..ell {
        j[(i, i)] = lambda;
        if i + 1 < ell {
            j[(i, i + 1)] = 1.0;
        }
    }
    for (k, &mu) in rest.iter().enumerate() {
        j[(ell + k, ell + k)] = mu;
    }
    let pinv = p.clone().try_inverse().expect("well-conditioned transform");
    p * j * pinv
}

/// `I + scale·R` for a matrix of entries in `[-1, 1]`.
pub fn near_identity(n: usize, vals: &[f64], scale: f64) -> RMat {
    RMat::identity(n, n) + mat(n, vals) * scale
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
