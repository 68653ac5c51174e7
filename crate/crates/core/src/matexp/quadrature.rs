//! Adaptive Gauss–Kronrod (7/15) quadrature of matrix-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::linalg::RMat;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target bound on the summed entrywise error estimate.
    pub abs_tol: f64,
    /// Relative target against the largest entry of the running integral.
    pub rel_tol: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_panels: 1 << 16,
            initial_panels: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: RMat,
    /// Largest entry of the summed per-panel error estimates.
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: RMat,
    err: RMat,
    err_max: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err_max == other.err_max
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err_max
            .total_cmp(&other.err_max)
            .then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> RMat>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = &fc * WGK[7];
    let mut gauss = &fc * WG[3];
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        let sum = f1 + f2;
        kron += &sum * w;
        if k % 2 == 1 {
            gauss += &sum * WG[k / 2];
        }
    }
    let value = kron * h;
    let err = (&value - gauss * h).abs();
    let err_max = err.amax();
    Panel {
        a,
        b,
        value,
        err,
        err_max,
    }
}

/// Integrate `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the summed estimate meets the tolerance or the panel budget
/// is exhausted. Deterministic for a fixed integrand.
pub fn integrate<F: Fn(f64) -> RMat>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    let probe = f(a);
    let (r, c) = probe.shape();
    if a == b {
        return QuadResult {
            value: RMat::zeros(r, c),
            error: 0.0,
            panels: 0,
            converged: true,
        };
    }
    let init = opts.initial_panels.max(1);
    let width = (b - a) / init as f64;
    let mut heap = BinaryHeap::new();
    let mut value = RMat::zeros(r, c);
    let mut err = RMat::zeros(r, c);
    for k in 0..init {
        let lo = a + width * k as f64;
        let hi = if k + 1 == init { b } else { lo + width };
        let p = gk15(&f, lo, hi);
        value += &p.value;
        err += &p.err;
        heap.push(p);
    }
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.amax());
        let err_max = err.amax();
        if err_max <= target {
            return QuadResult {
                value,
                error: err_max,
                panels: heap.len(),
                converged: true,
            };
        }
        if heap.len() >= opts.max_panels {
            return QuadResult {
                value,
                error: err_max,
                panels: heap.len(),
                converged: false,
            };
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot refine further in floating point
            heap.push(worst);
            return QuadResult {
                value,
                error: err_max,
                panels: heap.len(),
                converged: false,
            };
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        value += &left.value + &right.value - &worst.value;
        err += &left.err + &right.err - &worst.err;
        // keep accumulated error non-negative under cancellation
        err.iter_mut().for_each(|e| *e = e.max(0.0));
        heap.push(left);
        heap.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x| RMat::from_element(1, 1, x.powi(5) - 2.0 * x),
            0.0,
            2.0,
            QuadOptions::default(),
        );
        assert!((r.value[(0, 0)] - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn oscillatory_integrand_refines() {
        let r = integrate(
            |x| RMat::from_element(1, 1, (10.0 * x).sin()),
            0.0,
            50.0,
            QuadOptions::default(),
        );
        let exact = (1.0 - (500.0f64).cos()) / 10.0;
        assert!((r.value[(0, 0)] - exact).abs() < 1e-10);
        assert!(r.panels > 1);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            abs_tol: 1e-30,
            max_panels: 4,
            ..QuadOptions::default()
        };
        let r = integrate(|x| RMat::from_element(1, 1, x.sqrt()), 0.0, 1.0, opts);
        assert!(!r.converged);
        assert!(r.error > 0.0);
    }
}
