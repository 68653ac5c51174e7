mod common;

use std::f64::consts::PI;

use common::{c, near_identity};
use logsens::classical::{
    close_loop, place_poles, rlc_plant, spring_mass_plant, spring_mass_real_poles,
    spring_mass_scenario, SPRING_MASS_XI0,
};
use logsens::cli::{table1_repro, Chain};
use logsens::linalg::{CMat, C64};
use logsens::matexp::{eig_decompose, DerivMethod, DEFAULT_CLUSTER_TOL};
use logsens::quantum::{
    bloch_coherent, bloch_dissipator, bloch_state, density_from_bloch, gellmann_basis,
    spin_chain_scenario, SpinChainParams,
};
use logsens::sensan::{
    classify, detect_spikes, fit_slope, spike_schedule, trace, ErrorSystem, TimeGrid,
    DEFAULT_PRUNE_TOL,
};
use proptest::prelude::*;

fn hermitian(n: usize, vals: &[f64]) -> CMat {
    let m = CMat::from_fn(n, n, |i, j| c(vals[i * n + j], vals[n * n + i * n + j]));
    (&m + m.adjoint()) * c(0.5, 0.0)
}

fn density(n: usize, vals: &[f64]) -> CMat {
    let b = CMat::from_fn(n, n, |i, j| c(vals[i * n + j], vals[n * n + i * n + j]));
    let rho = &b * b.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Stable real poles, distinct by at least 0.2.
fn real_poles(n: usize) -> impl Strategy<Value = Vec<C64>> {
    (0.2f64..3.0, prop::collection::vec(0.2f64..2.0, n - 1)).prop_map(|(first, gaps)| {
        let mut p = vec![-first];
        for g in gaps {
            let last = *p.last().unwrap();
            p.push(last - g);
        }
        p.into_iter().map(|x| c(x, 0.0)).collect()
    })
}

fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    v.into_iter().map(|z| z.re).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_loops_start_at_one_and_track(poles in real_poles(2), xi0 in 0.5f64..8.0) {
        let cl = close_loop(&spring_mass_plant(xi0).unwrap(), &poles).unwrap();
        let sys = cl.error_system().unwrap();
        prop_assert!((sys.error_signal(0.0) - 1.0).abs() < 1e-12);
        prop_assert!((cl.dc_gain() - 1.0).abs() < 1e-12);
        let t_end = 20.0 / poles[0].re.abs();
        prop_assert!(sys.error_signal(t_end).abs() < 1e-6);
    }

    #[test]
    fn rlc_loops_start_at_one(poles in real_poles(3), xi0 in 0.1f64..2.0) {
        let cl = close_loop(&rlc_plant(xi0).unwrap(), &poles).unwrap();
        let sys = cl.error_system().unwrap();
        prop_assert!((sys.error_signal(0.0) - 1.0).abs() < 1e-10);
        prop_assert!((cl.dc_gain() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pole_placement_round_trip(poles in real_poles(3), xi0 in 0.1f64..2.0) {
        let plant = rlc_plant(xi0).unwrap();
        let k = place_poles(&plant.nominal_a(), &plant.b, &poles).unwrap();
        let acl = plant.nominal_a() - &plant.b * k.transpose();
        let got = sorted_re(eig_decompose(&acl, DEFAULT_CLUSTER_TOL).unwrap().eigenvalues);
        let want = sorted_re(poles.clone());
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-8 * (1.0 + w.abs()), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn parameter_split_is_additive(xi0 in 0.5f64..8.0, xi in -4.0f64..12.0) {
        let plant = spring_mass_plant(xi0).unwrap();
        let diff = plant.a_at(xi) - plant.nominal_a() - &plant.s * (xi - xi0);
        prop_assert!(diff.amax() < 1e-12);
    }

    #[test]
    fn log_sensitivity_is_similarity_invariant(poles in real_poles(2), tv in prop::collection::vec(-1.0f64..1.0, 4),
                                               t in 0.05f64..10.0) {
        let sys = spring_mass_scenario(SPRING_MASS_XI0, &poles).unwrap().error_system().unwrap();
        let tsys = sys.transformed(&near_identity(2, &tv, 0.4)).unwrap();
        if let (Some(a), Some(b)) = (sys.log_sensitivity(t).unwrap(), tsys.log_sensitivity(t).unwrap()) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn log_sensitivity_depends_on_xi0_times_s(t in 0.05f64..10.0, alpha in 0.25f64..4.0) {
        let sys = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_real_poles()).unwrap().error_system().unwrap();
        let scaled = ErrorSystem::new(sys.a0().clone(), sys.s() / alpha, sys.c().clone(), sys.v().clone(), sys.xi0() * alpha).unwrap();
        let (a, b) = (sys.log_sensitivity(t).unwrap().unwrap(), scaled.log_sensitivity(t).unwrap().unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn coherent_map_is_antisymmetric_and_linear(n in 2usize..=4, hv in prop::collection::vec(-1.0f64..1.0, 32),
                                                gv in prop::collection::vec(-1.0f64..1.0, 32), eps in -2.0f64..2.0) {
        let basis = gellmann_basis(n).unwrap();
        let (h1, h2) = (hermitian(n, &hv), hermitian(n, &gv));
        let a1 = bloch_coherent(&h1, &basis).unwrap();
        prop_assert!((&a1 + a1.transpose()).amax() < 1e-12);
        let a2 = bloch_coherent(&h2, &basis).unwrap();
        let sum = bloch_coherent(&(&h1 + &h2 * c(eps, 0.0)), &basis).unwrap();
        prop_assert!((sum - a1 - a2 * eps).amax() < 1e-12);
    }

    #[test]
    fn evolution_preserves_trace(n in 2usize..=4, hv in prop::collection::vec(-1.0f64..1.0, 32),
                                 vv in prop::collection::vec(-1.0f64..1.0, 32),
                                 rv in prop::collection::vec(-1.0f64..1.0, 32), t in 0.0f64..20.0) {
        let basis = gellmann_basis(n).unwrap();
        let v = CMat::from_fn(n, n, |i, j| c(vv[i * n + j], vv[n * n + i * n + j]));
        let g = bloch_coherent(&hermitian(n, &hv), &basis).unwrap() + bloch_dissipator(&v, &basis).unwrap();
        let r0 = bloch_state(&density(n, &rv), &basis).unwrap();
        let r = g.scale(t).exp() * r0;
        prop_assert!((r[n * n - 1] - 1.0 / (n as f64).sqrt()).abs() < 1e-10);
        let rho = density_from_bloch(&r, &basis).unwrap();
        prop_assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn purity_constant_when_unitary_and_falls_when_unital(n in 2usize..=4, hv in prop::collection::vec(-1.0f64..1.0, 32),
                                                         vv in prop::collection::vec(-1.0f64..1.0, 32),
                                                         rv in prop::collection::vec(-1.0f64..1.0, 32)) {
        let basis = gellmann_basis(n).unwrap();
        let a = bloch_coherent(&hermitian(n, &hv), &basis).unwrap();
        let l = bloch_dissipator(&hermitian(n, &vv), &basis).unwrap();
        let r0 = bloch_state(&density(n, &rv), &basis).unwrap();
        let mut prev = r0.norm();
        for k in 1..=20 {
            let t = 0.25 * k as f64;
            prop_assert!(((a.clone().scale(t).exp() * &r0).norm() - r0.norm()).abs() < 1e-10);
            let now = ((&a + &l).scale(t).exp() * &r0).norm();
            prop_assert!(now <= prev + 1e-10, "t={t}: {now} > {prev}");
            prev = now;
        }
    }
}

#[test]
fn chain_generators_are_normal_and_transfer_perfectly() {
    for n in 2..=6 {
        let p = SpinChainParams::new(n);
        let m = spin_chain_scenario(&p).unwrap();
        let g = m.generator();
        assert!(
            (&g * g.transpose() - g.transpose() * &g).amax() <= 1e-12,
            "N={n}"
        );
        let sys = m.error_system().unwrap();
        assert!((sys.error_signal(0.0) - 1.0).abs() < 1e-12, "N={n}");
        if n <= 5 {
            assert!(sys.error_signal(p.transfer_time()).abs() <= 1e-10, "N={n}");
        }
        for k in 0..20 {
            let t = 1.7 * k as f64;
            let r = g.clone().scale(t).exp() * &m.r0;
            assert!((r[n * n - 1] - 1.0 / (n as f64).sqrt()).abs() < 1e-10);
        }
    }
}

#[test]
fn sensitivity_vanishes_where_log_sensitivity_diverges() {
    let sys = spin_chain_scenario(&SpinChainParams::new(2))
        .unwrap()
        .error_system()
        .unwrap();
    let step = 1e-3;
    for n in 0..3 {
        let tn = 5.0 * (2 * n + 1) as f64;
        assert!(
            sys.derror(tn, DerivMethod::Analytic).unwrap().abs() < 1e-6,
            "t={tn}"
        );
        for t in [tn - step, tn + step] {
            let s = sys.log_sensitivity(t).unwrap().unwrap();
            assert!(s.abs() > 1e3, "t={t}: {s}");
        }
    }
}

#[test]
fn fidelity_trade_off_is_monotone() {
    for chain in [Chain::N2, Chain::N3] {
        let rows = table1_repro(chain, &[0.9, 0.99, 0.999, 0.9999]).unwrap();
        let s: Vec<f64> = rows.iter().map(|r| r.abs_logsens.unwrap()).collect();
        assert!(s.windows(2).all(|w| w[0] < w[1]), "{}: {s:?}", chain.name());
    }
}

#[test]
fn linear_real_fit_approaches_prediction() {
    let sys = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_real_poles())
        .unwrap()
        .error_system()
        .unwrap();
    let cls = classify(
        sys.spectrum(),
        sys.couplings(),
        sys.xi0(),
        DEFAULT_PRUNE_TOL,
    );
    let predicted = cls.slope.unwrap().abs();
    // subdominant decay e^{-3T} < 1e-6 from T = 5
    for t_lo in [5.0, 10.0, 20.0] {
        let tr = trace(
            &sys,
            &TimeGrid::new(0.0, 2.0 * t_lo, 0.01).unwrap().points(),
            DerivMethod::Analytic,
        )
        .unwrap();
        let fitted = fit_slope(&tr, (t_lo, 2.0 * t_lo)).unwrap().abs();
        assert!(
            (fitted - predicted).abs() < 0.01 * predicted,
            "T={t_lo}: {fitted} vs {predicted}"
        );
    }
}

#[test]
fn detected_spikes_follow_schedule() {
    let poles = [c(-1.0, PI / 5.0), c(-1.0, -PI / 5.0)];
    let sys = spring_mass_scenario(SPRING_MASS_XI0, &poles)
        .unwrap()
        .error_system()
        .unwrap();
    let cls = classify(
        sys.spectrum(),
        sys.couplings(),
        sys.xi0(),
        DEFAULT_PRUNE_TOL,
    );
    let step = 1e-3;
    let tr = trace(
        &sys,
        &TimeGrid::new(0.0, 30.0, step).unwrap().points(),
        DerivMethod::Analytic,
    )
    .unwrap();
    let detected = detect_spikes(&tr);
    let schedule = spike_schedule(&cls, 10).unwrap();
    assert!(detected.len() >= 4);
    for t in detected.iter().skip(2) {
        let nearest = schedule
            .iter()
            .map(|p| (p - t).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest <= step,
            "spike at {t} is {nearest} from the schedule"
        );
    }
}

#[test]
fn spring_mass_real_design_has_no_overshoot() {
    let sys = spring_mass_scenario(SPRING_MASS_XI0, &spring_mass_real_poles())
        .unwrap()
        .error_system()
        .unwrap();
    let es: Vec<f64> = (0..=2000)
        .map(|k| sys.error_signal(0.005 * k as f64))
        .collect();
    assert!(es.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    assert!(es.iter().all(|&e| e >= -1e-15));
}

#[test]
fn mixed_state_round_trip() {
    let basis = gellmann_basis(3).unwrap();
    let rho = density(
        3,
        &[
            0.3, -0.1, 0.5, 0.2, 0.7, 0.0, -0.4, 0.1, 0.9, 0.1, 0.0, -0.3, 0.2, 0.1, 0.4, 0.0,
            -0.2, 0.3,
        ],
    );
    let r = bloch_state(&rho, &basis).unwrap();
    assert!((density_from_bloch(&r, &basis).unwrap() - rho).camax() < 1e-12);
}
