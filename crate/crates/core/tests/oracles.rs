mod common;

use common::{defective, mat, near_identity, rel_dev, square_pair, stabilize};
use logsens::linalg::RMat;
use logsens::matexp::{
    dderiv_jordan, dderiv_oracle_quadrature, directional_derivative, eig_decompose,
    jordan_decompose, DerivMethod, DEFAULT_CLUSTER_TOL, DEFAULT_QUADRATURE_TOL,
};
use proptest::prelude::*;

/// Central differences: roundoff `eps/h` plus `O(h²)` truncation.
const FD_TOL: f64 = 1e-7;

fn all_routes(a: &RMat, s: &RMat, t: f64) -> Vec<RMat> {
    DerivMethod::ALL
        .iter()
        .map(|&m| directional_derivative(a, s, t, m).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn routes_agree_pairwise((n, av, sv) in square_pair(6), margin in 0.05f64..1.0, t in 0.01f64..10.0) {
        let a = stabilize(mat(n, &av), margin);
        let s = mat(n, &sv);
        let ds = all_routes(&a, &s, t);
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                let d = rel_dev(&ds[i], &ds[j]);
                prop_assert!(d < 1e-6, "{:?} vs {:?}: {d:e}", DerivMethod::ALL[i], DerivMethod::ALL[j]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn jordan_route_matches_quadrature(
        ell in 2usize..=3,
        lambda in -1.0f64..-0.1,
        gaps in prop::collection::vec(0.3f64..1.5, 0..=3),
        pv in prop::collection::vec(-1.0f64..1.0, 36),
        sv in prop::collection::vec(-1.0f64..1.0, 36),
        t in 0.1f64..10.0,
    ) {
        let rest: Vec<f64> = gaps.iter().scan(lambda, |acc, g| { *acc -= g; Some(*acc) }).collect();
        let n = ell + rest.len();
        let a = defective(lambda, ell, &rest, &near_identity(n, &pv, 0.3));
        let s = mat(n, &sv);
        let spec = jordan_decompose(&a, ell, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!((spec.reconstruct().map(|z| z.re) - &a).amax() < 1e-8 * (1.0 + a.amax()));
        let jd = dderiv_jordan(&spec, &spec.to_eigenbasis(&s).unwrap(), t).unwrap();
        let q = dderiv_oracle_quadrature(&a, &s, t, DEFAULT_QUADRATURE_TOL).unwrap();
        let d = rel_dev(&jd, &q);
        prop_assert!(d < 1e-8, "{d:e}");
    }

    #[test]
    fn commuting_structure_gives_t_s_exp((n, av, _) in square_pair(6), margin in 0.05f64..1.0,
                                         t in 0.01f64..10.0, alpha in -1.0f64..1.0) {
        let a = stabilize(mat(n, &av), margin);
        prop_assume!(eig_decompose(&a, DEFAULT_CLUSTER_TOL).unwrap().condition < 1e6);
        let s = &a * &a * 0.5 + &a * alpha + RMat::identity(n, n);
        let exact = &s * a.clone().scale(t).exp() * t;
        for (m, d) in DerivMethod::ALL.iter().zip(all_routes(&a, &s, t)) {
            let tol = if *m == DerivMethod::Fd { FD_TOL } else { 1e-9 };
            let dev = rel_dev(&d, &exact);
            prop_assert!(dev < tol, "{m:?}: {dev:e}");
        }
    }

    #[test]
    fn linear_in_direction((n, av, sv) in square_pair(5), wv in prop::collection::vec(-1.0f64..1.0, 25),
                           alpha in -2.0f64..2.0, beta in -2.0f64..2.0, t in 0.01f64..5.0) {
        let a = stabilize(mat(n, &av), 0.2);
        let (s1, s2) = (mat(n, &sv), mat(n, &wv));
        let combo = &s1 * alpha + &s2 * beta;
        for m in DerivMethod::ALL {
            let lhs = directional_derivative(&a, &combo, t, m).unwrap();
            let rhs = directional_derivative(&a, &s1, t, m).unwrap() * alpha
                + directional_derivative(&a, &s2, t, m).unwrap() * beta;
            let scale = 1.0 + lhs.amax();
            let tol = if m == DerivMethod::Fd { FD_TOL } else { 1e-10 };
            prop_assert!((lhs - rhs).amax() < tol * scale, "{m:?}");
        }
    }

    #[test]
    fn similarity_covariance((n, av, sv) in square_pair(5), tv in prop::collection::vec(-1.0f64..1.0, 25),
                             t in 0.01f64..5.0) {
        let a = stabilize(mat(n, &av), 0.2);
        let s = mat(n, &sv);
        let tm = near_identity(n, &tv, 0.2);
        let tinv = tm.clone().try_inverse().unwrap();
        for m in [DerivMethod::Analytic, DerivMethod::Quadrature, DerivMethod::Blockaug] {
            let lhs = directional_derivative(&(&tm * &a * &tinv), &(&tm * &s * &tinv), t, m).unwrap();
            let rhs = &tm * directional_derivative(&a, &s, t, m).unwrap() * &tinv;
            prop_assert!(rel_dev(&lhs, &rhs) < 1e-8, "{m:?}");
        }
    }
}

#[test]
fn zero_time_gives_zero() {
    let a = stabilize(
        mat(3, &[0.3, -0.2, 0.5, 0.1, 0.4, -0.7, 0.9, 0.2, -0.1]),
        0.3,
    );
    let s = mat(3, &[1.0, 0.0, -2.0, 0.5, 0.3, 0.0, 0.0, 1.0, 0.2]);
    for m in DerivMethod::ALL {
        assert_eq!(
            directional_derivative(&a, &s, 0.0, m).unwrap().amax(),
            0.0,
            "{m:?}"
        );
    }
}

#[test]
fn small_time_slope_is_structure() {
    let a = stabilize(
        mat(3, &[0.3, -0.2, 0.5, 0.1, 0.4, -0.7, 0.9, 0.2, -0.1]),
        0.3,
    );
    let s = mat(3, &[1.0, 0.0, -2.0, 0.5, 0.3, 0.0, 0.0, 1.0, 0.2]);
    let first_order = (&a * &s + &s * &a) * 0.5;
    for h in [1e-6, 1e-5, 1e-4] {
        // at h = 1e-4 the O(h) term is itself ~1e-4, so include it
        let reference = if h < 1e-4 {
            s.clone()
        } else {
            &s + &first_order * h
        };
        for m in DerivMethod::ALL {
            let d = directional_derivative(&a, &s, h, m).unwrap() / h;
            assert!((d - &reference).amax() < 1e-4, "{m:?} h={h}");
        }
    }
}

#[test]
fn negative_time_rejected() {
    let a = RMat::identity(2, 2) * -1.0;
    for m in DerivMethod::ALL {
        assert!(directional_derivative(&a, &a, -1.0, m).is_err());
        assert!(directional_derivative(&a, &a, f64::NAN, m).is_err());
    }
}
