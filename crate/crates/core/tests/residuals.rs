//! Closed-form solutions substituted back into their differential equations.

use abflux::fields::{AxialProfile, Equation, FieldParams, Pulse, RadialProfile, Slot};
use abflux::oracle::*;
use abflux::spectra::*;
use abflux::wavefunctions::*;
use num_complex::Complex64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn radial_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

#[test]
fn kg_scalar_radial_residuals() {
    let p = FieldParams { alpha: 0.3, gamma: 0.5, ..Default::default() };
    let qn = QuantumNumbers::new(Equation::KleinGordon, 1, 1).with_k3(0.2);
    let k0 = energy_case1(&qn, &p).unwrap().k0;
    let idx = radial_indices(RadialCase::Case1, 0, &qn, &p, k0).unwrap();
    let pr = problem_kg_case1(&qn, &p);
    let u = |r: f64| (pr.u)(r, k0);
    let v = |r: f64| radial_v(&idx, c(1.0), c(0.0), r).unwrap();
    let grid = radial_grid(0.1, 12.0, 60);
    assert!(residual_second_order(&u, &v, &grid) < 1e-6);

    // off-shell k0 with both solutions still solves the ODE
    let k0 = 0.4;
    let idx = radial_indices(RadialCase::Case1, 0, &qn, &p, k0).unwrap();
    let u = |r: f64| (pr.u)(r, k0);
    let v = |r: f64| radial_v(&idx, c(0.7), Complex64::new(0.2, -0.3), r).unwrap();
    assert!(residual_second_order(&u, &v, &grid) < 1e-6);
}

#[test]
fn case3_second_order_residuals() {
    for (variant, p) in [
        (Variant::A, FieldParams { alpha: 0.2, beta: 0.1, gamma: 0.6, ..Default::default() }),
        (Variant::B, FieldParams { alpha: 0.05, beta: 0.1, gamma: 0.4, epsilon: -1.0, ..Default::default() }),
    ] {
        for s in [0u8, 1, 2] {
            let qn = QuantumNumbers::new(Equation::Dirac, 2, 1).with_k3(0.1);
            let k0 = energy_case3(&qn, variant, &p, s, 1).unwrap()[0].k0;
            let idx = radial_indices(RadialCase::Case3(variant), s, &qn, &p, k0).unwrap();
            let pr = problem_case3(&qn, variant, &p, s);
            let u = |r: f64| (pr.u)(r, k0);
            let v = |r: f64| radial_v(&idx, c(1.0), c(0.0), r).unwrap();
            let res = residual_second_order(&u, &v, &radial_grid(0.1, 6.0, 50));
            assert!(res < 1e-6, "{variant:?} s={s}: {res:e}");
        }
    }
}

#[test]
fn dirac_case1_pair_and_full_system() {
    let p = FieldParams { alpha: 0.3, gamma: 0.5, ..Default::default() };
    for zeta in [1i8, -1] {
        let qn = QuantumNumbers::new(Equation::Dirac, 1, 1).with_k3(0.2).with_zeta(zeta);
        let k0 = energy_case1(&qn, &p).unwrap().k0;
        let grid = radial_grid(0.1, 10.0, 50);
        let pair = |r: f64| case1_pair(&p, &qn, k0, c(1.0), c(0.0), r).unwrap().0;
        let res = residual_first_order_pair(PairSystem::Case1, &p, &qn, k0, &pair, &grid);
        assert!(res < 1e-7, "zeta={zeta}: {res:e}");
        let comps = |r: f64| case1_components(&p, &qn, k0, c(1.0), c(0.0), r).unwrap();
        let f0 = RadialProfile::InverseR { alpha: p.alpha };
        let f2 = RadialProfile::Linear { gamma: p.gamma };
        let res = residual_dirac_radial(&p, &qn, k0, &f0, &RadialProfile::Zero, &f2, &comps, &grid);
        assert!(res < 1e-7, "zeta={zeta}: full system {res:e}");
    }
}

#[test]
fn dirac_case2_pair_and_full_system() {
    let p = FieldParams { alpha: 0.4, gamma: 0.7, ..Default::default() };
    for zeta in [1i8, -1] {
        let qn = QuantumNumbers::new(Equation::Dirac, 1, 0).with_k3(0.3).with_zeta(zeta);
        let k0 = energy_case2(&qn, &p, 1.0).unwrap().k0;
        let grid = radial_grid(0.1, 10.0, 50);
        let pair = |r: f64| case2_pair(&p, &qn, k0, c(1.0), c(0.0), r).unwrap().0;
        let res = residual_first_order_pair(PairSystem::Case2, &p, &qn, k0, &pair, &grid);
        assert!(res < 1e-7, "zeta={zeta}: {res:e}");
        let comps = |r: f64| case2_components(&p, &qn, k0, c(1.0), c(0.0), r).unwrap();
        let f1 = RadialProfile::InverseR { alpha: p.alpha };
        let f2 = RadialProfile::Linear { gamma: p.gamma };
        let res = residual_dirac_radial(&p, &qn, k0, &RadialProfile::Zero, &f1, &f2, &comps, &grid);
        assert!(res < 1e-7, "zeta={zeta}: full system {res:e}");
    }
}

#[test]
fn case3_bispinors_solve_full_system() {
    for (variant, p) in [
        (Variant::A, FieldParams { alpha: 0.2, beta: 0.1, gamma: 0.6, ..Default::default() }),
        (Variant::B, FieldParams { alpha: 0.05, beta: 0.1, gamma: 0.4, epsilon: -1.0, ..Default::default() }),
    ] {
        let (f, f2) = match variant {
            Variant::A => (
                RadialProfile::InverseRPlusInverseR2 { alpha: p.alpha, beta: p.beta },
                RadialProfile::Linear { gamma: p.gamma },
            ),
            Variant::B => (
                RadialProfile::QuadraticPlusInverseR2 { alpha: p.alpha, beta: p.beta },
                RadialProfile::Quadratic { gamma: p.gamma },
            ),
        };
        // f0 = f, f1 = ε f
        let f1 = match f {
            RadialProfile::InverseRPlusInverseR2 { alpha, beta } => {
                RadialProfile::InverseRPlusInverseR2 { alpha: p.epsilon * alpha, beta: p.epsilon * beta }
            }
            RadialProfile::QuadraticPlusInverseR2 { alpha, beta } => {
                RadialProfile::QuadraticPlusInverseR2 { alpha: p.epsilon * alpha, beta: p.epsilon * beta }
            }
            _ => unreachable!(),
        };
        for s in [1u8, 2] {
            let qn = QuantumNumbers::new(Equation::Dirac, 1, 0).with_k3(0.1);
            let k0 = energy_case3(&qn, variant, &p, s, 0).unwrap()[0].k0;
            let comps = |r: f64| case3_components(&p, &qn, variant, s, k0, c(1.0), c(0.0), r).unwrap();
            let res = residual_dirac_radial(&p, &qn, k0, &f, &f1, &f2, &comps, &radial_grid(0.1, 6.0, 40));
            assert!(res < 1e-7, "{variant:?} s={s}: {res:e}");
        }
    }
}

#[test]
fn schrodinger_polynomial_forms_solve_radial_equation() {
    let m = 1.0;
    let qn = QuantumNumbers::new(Equation::Schrodinger, 1, 2).with_k3(0.2);
    let p = FieldParams { alpha: 0.1, beta: 0.2, gamma: 0.9, delta: 0.1, lambda: 0.05, mass: m, ..Default::default() };
    let k0 = energy_schrodinger_a(&qn, &p).unwrap().k0;
    let f0 = RadialProfile::SchrodingerAScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: m };
    let f1 = RadialProfile::SchrodingerAVector { beta: p.beta, lambda: p.lambda, mass: m };
    let pr = problem_schrodinger(&qn, &p, f0, f1, RadialProfile::Linear { gamma: p.gamma });
    let u = |r: f64| (pr.u)(r, k0);
    let v = |r: f64| c(psi_schrodinger(SchrodingerCase::A, &p, &qn, r).unwrap());
    assert!(residual_second_order(&u, &v, &radial_grid(0.2, 10.0, 50)) < 1e-6);

    let p = FieldParams { alpha: 0.3, beta: 0.2, gamma: 0.5, delta: 0.05, lambda: 0.05, mass: m, ..Default::default() };
    let k0 = energy_schrodinger_b(&qn, &p).unwrap().k0;
    let f0 = RadialProfile::SchrodingerBScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: m };
    let f1 = RadialProfile::SchrodingerBVector { delta: p.delta, lambda: p.lambda, mass: m };
    let pr = problem_schrodinger(&qn, &p, f0, f1, RadialProfile::Quadratic { gamma: p.gamma });
    let u = |r: f64| (pr.u)(r, k0);
    let v = |r: f64| c(psi_schrodinger(SchrodingerCase::B, &p, &qn, r).unwrap());
    assert!(residual_second_order(&u, &v, &radial_grid(0.2, 5.0, 50)) < 1e-6);
}

#[test]
fn lightfront_w_solves_longitudinal_equation() {
    let pulse = Pulse::Tanh { alpha: 0.8, beta: 1.3 };
    let half = |z: f64, x0: f64| 0.5 * pulse.value(x0 - z).unwrap();
    for nu in [-1i8, 0, 1] {
        let st = LightfrontState { lambda_ev: 2.0, nu, m: 1.0, kperp2: 0.3 };
        let w = |z: f64, x0: f64| lightfront_w(&st, &pulse, z, x0).unwrap();
        let grid: Vec<(f64, f64)> = (0..25).map(|i| (-1.0 + 0.09 * i as f64, 0.3 + 0.07 * i as f64)).collect();
        let res = residual_w_equation(&half, &half, nu, 1.0, 0.3, &w, &grid);
        assert!(res < 1e-6, "nu={nu}: {res:e}");
    }
}

#[test]
fn boost_solutions_solve_both_equations() {
    for (variant, prof) in [
        (BoostVariant::A, AxialProfile::BoostLinear { alpha: 0.6 }),
        (BoostVariant::B, AxialProfile::BoostSqrt { alpha: 0.6 }),
    ] {
        let (lam, m, kp2) = (0.7, 1.0, 0.2);
        for nu in [-1i8, 1] {
            let w = |z: f64, x0: f64| boost_w(nu, lam, variant, 0.6, m, kp2, c(1.0), c(0.0), z, x0).unwrap();
            let grid: Vec<(f64, f64)> = (0..20).map(|i| (0.1 + 0.02 * i as f64, 1.0 + 0.05 * i as f64)).collect();
            let f0 = SlotProfile(&prof, Slot::F0);
            let f1 = SlotProfile(&prof, Slot::F1);
            let res = residual_w_equation(&f0, &f1, nu, m, kp2, &w, &grid);
            assert!(res < 1e-6, "{variant:?} nu={nu}: {res:e}");
            assert!(residual_boost_eigen(lam, &w, &grid) < 1e-6);
        }
    }
}

#[test]
fn time_phase_and_gauge_reduction() {
    let pulse = Pulse::Exp { alpha: 0.5, beta: -0.7 };
    let (k3, kp2, m) = (0.4, 0.3, 1.5);
    let f = |t: f64| pulse.value(t).unwrap();
    let s = |t: f64| schrodinger_time_phase(&pulse, k3, kp2, m, t).unwrap();
    let grid: Vec<f64> = (0..30).map(|i| -1.0 + 0.1 * i as f64).collect();
    assert!(residual_time_phase(&f, k3, kp2, m, &s, &grid) < 1e-8);

    let f0 = |z: f64, x0: f64| 0.3 * z * x0 + 0.1 * (z + x0).sin();
    let f1 = |z: f64, x0: f64| 0.2 * (0.5 * z).cos() * x0 * x0;
    let red = gauge_reduce(&f0, &f1, 0.25, 1.2);
    let psi = |z: f64, x0: f64| Complex64::from_polar((-(z - 0.2 * x0).powi(2)).exp(), 0.8 * z - 0.3 * x0);
    let grid: Vec<(f64, f64)> = (0..20).map(|i| (-1.0 + 0.1 * i as f64, 0.2 + 0.05 * i as f64)).collect();
    let res = residual_gauge(&red, &psi, &grid).unwrap();
    assert!(res < 1e-8, "{res:e}");
}

#[test]
fn normalization_of_bound_states() {
    let p = FieldParams { alpha: 0.3, gamma: 0.5, ..Default::default() };
    let qn = QuantumNumbers::new(Equation::KleinGordon, 1, 0);
    let k0 = energy_case1(&qn, &p).unwrap().k0;
    let idx = radial_indices(RadialCase::Case1, 0, &qn, &p, k0).unwrap();
    let v = |r: f64| radial_v(&idx, c(1.0), c(0.0), r).unwrap();
    let n = normalize(&v, Weight::RDr, 1.0 / idx.x_scale).unwrap();
    assert!(n.is_finite() && n > 0.0);
    // the second solution is singular at the origin once p − n ≥ 2
    assert!(idx.p - idx.n >= 2.0);
    let w = |r: f64| radial_v(&idx, c(0.0), c(1.0), r).unwrap();
    assert!(matches!(normalize(&w, Weight::RDr, 1.0 / idx.x_scale), Err(OracleError::Divergent(_))));
}
