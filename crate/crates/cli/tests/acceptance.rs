//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command as Proc;
use std::result::Result;
use std::time::Instant;

use abflux::fields::{AxialProfile, Equation, FieldParams, Pulse, RadialProfile, Slot};
use abflux::oracle::*;
use abflux::spectra::*;
use abflux::special_fn::*;
use abflux::wavefunctions::*;
use abflux_cli::{run_spectrum, Command, JobSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

fn radial_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

// 1 -------------------------------------------------------------------------

fn special_functions() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_ode, mut worst_link) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let a = rng.random_range(-5.0..5.0);
        let b = loop {
            let b: f64 = rng.random_range(-5.0..5.0);
            if b > 0.0 || (b - b.round()).abs() > 0.1 {
                break b;
            }
        };
        let x = rng.random_range(0.01..10.0);
        let f = kummer(a, b, x).map_err(|e| e.to_string())?;
        let d1 = kummer_derivative(a, b, x, 1).map_err(|e| e.to_string())?;
        let d2 = kummer_derivative(a, b, x, 2).map_err(|e| e.to_string())?;
        let terms = [x * d2, (b - x) * d1, -a * f];
        let scale: f64 = terms.iter().map(|t| t.norm()).fold(1e-300, f64::max);
        worst_ode = worst_ode.max(terms.iter().sum::<Complex64>().norm() / scale);

        let n = rng.random_range(0..10u32);
        let gap = rng.random_range(0.0..6.0);
        let p = n as f64 + gap;
        let want = (0.5 * (ln_gamma(1.0 + n as f64).unwrap().re - ln_gamma(1.0 + p).unwrap().re)).exp();
        for _ in 0..3 {
            let x: f64 = rng.random_range(0.1..20.0);
            let poly = laguerre_poly(n, gap, x);
            if poly.abs() < 1e-3 * laguerre_poly(n, gap, -x) {
                continue;
            }
            let got = laguerre_i(p, n as f64, x).map_err(|e| e.to_string())?.re;
            worst_link = worst_link.max(rel(got / ((-x / 2.0).exp() * x.powf(gap / 2.0) * poly), want));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("500 sets, ODE residual {worst_ode:.1e}, Laguerre linkage {worst_link:.1e}, {secs:.2} s");
    if worst_ode < 1e-7 && worst_link < 1e-10 && secs < 10.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 2 -------------------------------------------------------------------------

/// The n-th eigenvalue, NaN when the oracle failed.
fn nth(rep: Result<OracleReport, OracleError>, n: u32) -> f64 {
    rep.ok().and_then(|r| r.eigenvalues.get(n as usize).copied()).unwrap_or(f64::NAN)
}

struct Trial {
    closed: f64,
    oracle: f64,
    what: String,
}

fn sample_family(
    name: &str,
    rng: &mut ChaCha8Rng,
    draw: &dyn Fn(&mut ChaCha8Rng) -> Option<Trial>,
    lines: &mut Vec<String>,
) -> bool {
    let t = Instant::now();
    let (mut ok, mut worst, mut tries) = (0, 0.0f64, 0);
    while ok < 20 && tries < 400 {
        tries += 1;
        if let Some(t) = draw(rng) {
            let d = rel(t.closed, t.oracle);
            let d = if d.is_nan() { f64::INFINITY } else { d };
            if !(d < 1e-6) {
                println!("    {name}: {} closed {} oracle {} rel {d:.1e}", t.what, t.closed, t.oracle);
            }
            worst = worst.max(d);
            ok += 1;
        }
    }
    lines.push(format!("{name}: {ok} sets, worst {worst:.1e}, {:.1} s", t.elapsed().as_secs_f64()));
    ok == 20 && worst < 1e-6
}

/// Levels closer than 1e-3 (relative) to the window edge are beyond what a
/// finite-domain oracle can resolve and are not drawn.
fn resolvable(window: (f64, f64), x: f64) -> Option<()> {
    let (lo, hi) = window;
    (x < hi - 1e-3 * hi.abs() && x > lo + 1e-3 * lo.abs()).then_some(())
}

fn bound(res: &Result<SpectralResult, SpectraError>) -> Option<f64> {
    match res {
        Ok(r) if r.flags.is_empty() => Some(r.k0),
        _ => None,
    }
}

fn subcase_params(rng: &mut ChaCha8Rng, alpha: (f64, f64)) -> FieldParams {
    FieldParams {
        alpha: rng.random_range(alpha.0..alpha.1),
        gamma: rng.random_range(0.3..1.2),
        mu: rng.random_range(0.05..0.95),
        ..Default::default()
    }
}

fn spectrum_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut lines = Vec::new();
    let mut pass = true;

    pass &= sample_family("subcase 1 Dirac", &mut rng, &|rng| {
        let p = subcase_params(rng, (-0.5, 0.5));
        let qn = QuantumNumbers::new(Equation::Dirac, rng.random_range(0..3), rng.random_range(0..3))
            .with_k3(rng.random_range(-0.5..0.5));
        let k0 = bound(&energy_case1(&qn, &p))?;
        let pr = problem_dirac_case1(&qn, &p);
        resolvable((-pr.threshold, pr.threshold), k0)?;
        let oracle = solve_dirac_shooting_near(&pr, k0).unwrap_or(f64::NAN);
        Some(Trial { closed: k0, oracle, what: format!("{p:?} {qn:?}") })
    }, &mut lines);

    pass &= sample_family("subcase 1 KG", &mut rng, &|rng| {
        let p = subcase_params(rng, (-0.5, 0.5));
        let n = rng.random_range(0..4u32);
        let qn = QuantumNumbers::new(Equation::KleinGordon, rng.random_range(-2..3), n)
            .with_k3(rng.random_range(-0.5..0.5));
        let k0 = bound(&energy_case1(&qn, &p))?;
        let pr = problem_kg_case1(&qn, &p);
        resolvable(pr.window, k0)?;
        let oracle = solve_radial_eigen_near(&pr, k0).unwrap_or(f64::NAN);
        Some(Trial { closed: k0, oracle, what: format!("{p:?} {qn:?}") })
    }, &mut lines);

    pass &= sample_family("subcase 2 tau=0", &mut rng, &|rng| {
        let p = subcase_params(rng, (0.0, 0.6));
        let n = rng.random_range(0..4u32);
        let qn = QuantumNumbers::new(Equation::KleinGordon, rng.random_range(-2..3), n)
            .with_k3(rng.random_range(-0.5..0.5));
        let k0 = bound(&energy_case2(&qn, &p, 0.0))?;
        let pr = problem_kg_case2(&qn, &p);
        resolvable(pr.window, k0 * k0)?;
        let rep = solve_radial_eigen(&pr, n as usize + 1);
        let k2 = nth(rep, n);
        Some(Trial { closed: k0 * k0, oracle: k2, what: format!("{p:?} {qn:?}") })
    }, &mut lines);

    pass &= sample_family("subcase 2 tau=1", &mut rng, &|rng| {
        let p = subcase_params(rng, (0.0, 0.6));
        let qn = QuantumNumbers::new(Equation::Dirac, rng.random_range(0..3), rng.random_range(0..3))
            .with_k3(rng.random_range(-0.5..0.5));
        let k0 = bound(&energy_case2(&qn, &p, 1.0))?;
        let pr = problem_dirac_case2(&qn, &p);
        resolvable((-pr.threshold, pr.threshold), k0)?;
        let oracle = solve_dirac_shooting_near(&pr, k0).unwrap_or(f64::NAN);
        Some(Trial { closed: k0, oracle, what: format!("{p:?} {qn:?}") })
    }, &mut lines);

    let schrodinger = |rng: &mut ChaCha8Rng, b: bool| -> Option<Trial> {
        let m = rng.random_range(0.5..2.0);
        let p = FieldParams {
            alpha: rng.random_range(0.0..0.3),
            beta: rng.random_range(0.0..0.3),
            gamma: rng.random_range(0.3..1.2),
            delta: rng.random_range(0.0..0.15),
            lambda: rng.random_range(0.0..0.08),
            mu: rng.random_range(0.05..0.95),
            mass: m,
            ..Default::default()
        };
        let n = rng.random_range(0..4u32);
        let qn = QuantumNumbers::new(Equation::Schrodinger, rng.random_range(-2..3), n)
            .with_k3(rng.random_range(-0.5..0.5));
        let pr = if b {
            let f0 = RadialProfile::SchrodingerBScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: m };
            let f1 = RadialProfile::SchrodingerBVector { delta: p.delta, lambda: p.lambda, mass: m };
            problem_schrodinger(&qn, &p, f0, f1, RadialProfile::Quadratic { gamma: p.gamma })
        } else {
            let f0 = RadialProfile::SchrodingerAScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: m };
            let f1 = RadialProfile::SchrodingerAVector { beta: p.beta, lambda: p.lambda, mass: m };
            problem_schrodinger(&qn, &p, f0, f1, RadialProfile::Linear { gamma: p.gamma })
        };
        let k0 = bound(&if b { energy_schrodinger_b(&qn, &p) } else { energy_schrodinger_a(&qn, &p) })?;
        resolvable(pr.window, k0)?;
        let rep = solve_radial_eigen(&pr, n as usize + 1);
        Some(Trial { closed: k0, oracle: nth(rep, n), what: format!("{p:?} {qn:?}") })
    };
    pass &= sample_family("Schrodinger-a", &mut rng, &|rng| schrodinger(rng, false), &mut lines);
    pass &= sample_family("Schrodinger-b", &mut rng, &|rng| schrodinger(rng, true), &mut lines);

    pass &= sample_family("Case II", &mut rng, &|rng| {
        let dirac = rng.random_bool(0.5);
        let p = FieldParams { gamma: rng.random_range(0.3..1.5), mu: rng.random_range(0.05..0.95), ..Default::default() };
        let n = rng.random_range(0..4u32);
        let l = if dirac { rng.random_range(1..4) } else { rng.random_range(0..4) };
        let eq = if dirac { Equation::Dirac } else { Equation::KleinGordon };
        let qn = QuantumNumbers::new(eq, l, n);
        let (tau, s) = if dirac { (0.5, 2) } else { (0.0, 0) };
        let kp = kperp_case_ii(&qn, &p, tau).ok()?;
        let pr = problem_case_ii(&qn, &p, s, RadialProfile::Linear { gamma: p.gamma });
        resolvable(pr.window, kp.kperp2)?;
        let rep = solve_radial_eigen(&pr, n as usize + 1);
        Some(Trial { closed: kp.kperp2, oracle: nth(rep, n), what: format!("{p:?} {qn:?}") })
    }, &mut lines);

    let secs = t.elapsed().as_secs_f64();
    let msg = format!("{}; {secs:.1} s", lines.join("; "));
    if pass && secs < 300.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 3 -------------------------------------------------------------------------

fn worked_values() -> Outcome {
    let p = FieldParams { gamma: 1.0, mu: 0.5, ..Default::default() };
    let mut out = Vec::new();
    let mut pass = true;

    let qn = QuantumNumbers::new(Equation::KleinGordon, 1, 0);
    let k0 = energy_case2(&qn, &p, 0.0).map_err(|e| e.to_string())?.k0;
    let or = solve_radial_eigen(&problem_kg_case2(&qn, &p), 1).map_err(|e| e.to_string())?.eigenvalues[0];
    pass &= rel(k0 * k0, 1.4375) < 1e-12 && rel(or, 1.4375) < 1e-6;
    out.push(format!("k0^2 {:.10} oracle {or:.10}", k0 * k0));

    let kp = kperp_case_ii(&qn, &p, 0.0).map_err(|e| e.to_string())?.kperp2;
    let or = solve_radial_eigen(&problem_case_ii(&qn, &p, 0, RadialProfile::Linear { gamma: 1.0 }), 1)
        .map_err(|e| e.to_string())?
        .eigenvalues[0];
    pass &= rel(kp, 0.4375) < 1e-12 && rel(or, 0.4375) < 1e-6;
    out.push(format!("kperp^2 {kp:.10} oracle {or:.10}"));

    let ps = FieldParams { gamma: 1.0, mu: 0.5, mass: 1.0, ..Default::default() };
    let qs = QuantumNumbers::new(Equation::Schrodinger, 0, 0);
    let k0 = energy_schrodinger_a(&qs, &ps).map_err(|e| e.to_string())?.k0;
    let f0 = RadialProfile::SchrodingerAScalar { alpha: 0.0, beta: 0.0, delta: 0.0, lambda: 0.0, mass: 1.0 };
    let f1 = RadialProfile::SchrodingerAVector { beta: 0.0, lambda: 0.0, mass: 1.0 };
    let or = solve_radial_eigen(&problem_schrodinger(&qs, &ps, f0, f1, RadialProfile::Linear { gamma: 1.0 }), 1)
        .map_err(|e| e.to_string())?
        .eigenvalues[0];
    pass &= rel(k0, 0.375) < 1e-12 && rel(or, 0.375) < 1e-6;
    out.push(format!("Schrodinger-a k0 {k0:.10} oracle {or:.10}"));

    if pass {
        Ok(out.join("; "))
    } else {
        Err(out.join("; "))
    }
}

// 4 -------------------------------------------------------------------------

fn case3_roots() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    let mut pass = true;
    for variant in [Variant::A, Variant::B] {
        let (mut ok, mut tries, mut worst) = (0, 0, 0.0f64);
        while ok < 10 && tries < 400 {
            tries += 1;
            let p = match variant {
                Variant::A => FieldParams {
                    alpha: rng.random_range(0.05..0.4),
                    beta: rng.random_range(0.02..0.2),
                    gamma: rng.random_range(0.3..1.0),
                    mu: rng.random_range(0.05..0.95),
                    ..Default::default()
                },
                Variant::B => FieldParams {
                    alpha: rng.random_range(0.01..0.1),
                    beta: rng.random_range(0.02..0.2),
                    gamma: rng.random_range(0.2..0.6),
                    mu: rng.random_range(0.05..0.95),
                    ..Default::default()
                },
            };
            let s = rng.random_range(0..3u8);
            let eq = if s == 0 { Equation::KleinGordon } else { Equation::Dirac };
            let n = rng.random_range(0..3u32);
            let qn = QuantumNumbers::new(eq, rng.random_range(0..3), n).with_k3(rng.random_range(-0.3..0.3));
            let Ok(roots) = energy_case3(&qn, variant, &p, s, n as i64) else { continue };
            let pr = problem_case3(&qn, variant, &p, s);
            if roots.iter().any(|r| resolvable(pr.window, r.k0).is_none()) {
                continue;
            }
            for r in &roots {
                let o = solve_radial_eigen_near(&pr, r.k0).unwrap_or(f64::NAN);
                let d = rel(r.k0, o);
                let d = if d.is_nan() { f64::INFINITY } else { d };
                if !(d < 1e-5) {
                    println!("    {variant:?} s={s}: {p:?} {qn:?} closed {} oracle {o}", r.k0);
                }
                worst = worst.max(d);
            }
            ok += 1;
        }
        pass &= ok == 10 && worst < 1e-5;
        out.push(format!("variant {variant:?}: {ok} sets, worst {worst:.1e}, {:.1} s", t.elapsed().as_secs_f64()));
    }
    if pass {
        Ok(out.join("; "))
    } else {
        Err(out.join("; "))
    }
}

// 5 -------------------------------------------------------------------------

/// A longitudinal profile whose time derivative is off by 1%.
struct SkewedTime<'a>(&'a dyn Longitudinal);

impl Longitudinal for SkewedTime<'_> {
    fn value(&self, z: f64, x0: f64) -> f64 {
        self.0.value(z, x0)
    }

    fn d_time(&self, z: f64, x0: f64) -> f64 {
        1.01 * self.0.d_time(z, x0)
    }
}

fn residual_suite() -> Outcome {
    // (name, clean residual, faulted residual, clean limit)
    let mut rows: Vec<(String, f64, f64, f64)> = Vec::new();
    let grid = radial_grid(0.1, 8.0, 50);
    let bump = |r: f64| c(1.0 + 0.01 * r);

    let p1 = FieldParams { alpha: 0.3, gamma: 0.5, ..Default::default() };
    let q1 = QuantumNumbers::new(Equation::Dirac, 1, 1).with_k3(0.2);
    let k1 = energy_case1(&q1, &p1).map_err(|e| e.to_string())?.k0;
    let (f0, f2) = (RadialProfile::InverseR { alpha: p1.alpha }, RadialProfile::Linear { gamma: p1.gamma });
    let run = |d: &dyn Fn(f64) -> Complex64| {
        let comps = |r: f64| case1_components(&p1, &q1, k1, c(1.0), c(0.0), r).unwrap().map(|v| v * d(r));
        residual_dirac_radial(&p1, &q1, k1, &f0, &RadialProfile::Zero, &f2, &comps, &grid)
    };
    rows.push(("spinor subcase 1".into(), run(&|_| c(1.0)), run(&bump), 1e-6));

    let p2 = FieldParams { alpha: 0.4, gamma: 0.7, ..Default::default() };
    let q2 = QuantumNumbers::new(Equation::Dirac, 1, 0).with_k3(0.3);
    let k2 = energy_case2(&q2, &p2, 1.0).map_err(|e| e.to_string())?.k0;
    let (g1, g2) = (RadialProfile::InverseR { alpha: p2.alpha }, RadialProfile::Linear { gamma: p2.gamma });
    let run = |d: &dyn Fn(f64) -> Complex64| {
        let comps = |r: f64| case2_components(&p2, &q2, k2, c(1.0), c(0.0), r).unwrap().map(|v| v * d(r));
        residual_dirac_radial(&p2, &q2, k2, &RadialProfile::Zero, &g1, &g2, &comps, &grid)
    };
    rows.push(("spinor subcase 2".into(), run(&|_| c(1.0)), run(&bump), 1e-6));

    for (variant, p) in [
        (Variant::A, FieldParams { alpha: 0.2, beta: 0.1, gamma: 0.6, epsilon: 1.0, ..Default::default() }),
        (Variant::B, FieldParams { alpha: 0.05, beta: 0.1, gamma: 0.4, epsilon: -1.0, ..Default::default() }),
    ] {
        let (f, f1, f2) = match variant {
            Variant::A => (
                RadialProfile::InverseRPlusInverseR2 { alpha: p.alpha, beta: p.beta },
                RadialProfile::InverseRPlusInverseR2 { alpha: p.epsilon * p.alpha, beta: p.epsilon * p.beta },
                RadialProfile::Linear { gamma: p.gamma },
            ),
            Variant::B => (
                RadialProfile::QuadraticPlusInverseR2 { alpha: p.alpha, beta: p.beta },
                RadialProfile::QuadraticPlusInverseR2 { alpha: p.epsilon * p.alpha, beta: p.epsilon * p.beta },
                RadialProfile::Quadratic { gamma: p.gamma },
            ),
        };
        let qn = QuantumNumbers::new(Equation::Dirac, 1, 0).with_k3(0.1);
        let k0 = energy_case3(&qn, variant, &p, 1, 0).map_err(|e| e.to_string())?[0].k0;
        let g = radial_grid(0.1, 6.0, 40);
        let run = |d: &dyn Fn(f64) -> Complex64| {
            let comps = |r: f64| case3_components(&p, &qn, variant, 1, k0, c(1.0), c(0.0), r).unwrap().map(|v| v * d(r));
            residual_dirac_radial(&p, &qn, k0, &f, &f1, &f2, &comps, &g)
        };
        rows.push((format!("spinor subcase 3{variant:?}"), run(&|_| c(1.0)), run(&bump), 1e-6));
    }

    let pulse = Pulse::Tanh { alpha: 0.8, beta: 1.3 };
    let half = |z: f64, x0: f64| 0.5 * pulse.value(x0 - z).unwrap();
    let zx: Vec<(f64, f64)> = (0..25).map(|i| (-1.0 + 0.09 * i as f64, 0.3 + 0.07 * i as f64)).collect();
    for nu in [-1i8, 0, 1] {
        let st = LightfrontState { lambda_ev: 2.0, nu, m: 1.0, kperp2: 0.3 };
        let run = |fz: f64| {
            let w = |z: f64, x0: f64| lightfront_w(&st, &pulse, z, x0).unwrap() * (1.0 + fz * z);
            residual_w_equation(&half, &half, nu, 1.0, 0.3, &w, &zx)
        };
        rows.push((format!("lightfront nu={nu}"), run(0.0), run(0.01), 1e-6));
    }

    let bz: Vec<(f64, f64)> = (0..20).map(|i| (0.1 + 0.02 * i as f64, 1.0 + 0.05 * i as f64)).collect();
    for (variant, prof) in [
        (BoostVariant::A, AxialProfile::BoostLinear { alpha: 0.6 }),
        (BoostVariant::B, AxialProfile::BoostSqrt { alpha: 0.6 }),
    ] {
        let (lam, m, kp2) = (0.7, 1.0, 0.2);
        let (f0, f1) = (SlotProfile(&prof, Slot::F0), SlotProfile(&prof, Slot::F1));
        for nu in [-1i8, 1] {
            let run = |fz: f64| {
                let w = |z: f64, x0: f64| {
                    boost_w(nu, lam, variant, 0.6, m, kp2, c(1.0), c(0.0), z, x0).unwrap() * (1.0 + fz * z)
                };
                residual_w_equation(&f0, &f1, nu, m, kp2, &w, &bz).max(residual_boost_eigen(lam, &w, &bz))
            };
            rows.push((format!("boost {variant:?} nu={nu}"), run(0.0), run(0.01), 1e-6));
        }
    }

    let tp = Pulse::Exp { alpha: 0.5, beta: -0.7 };
    let (k3, kp2, m) = (0.4, 0.3, 1.5);
    let f = |t: f64| tp.value(t).unwrap();
    let tg: Vec<f64> = (0..30).map(|i| -1.0 + 0.1 * i as f64).collect();
    let run = |scale: f64| {
        let s = |t: f64| scale * schrodinger_time_phase(&tp, k3, kp2, m, t).unwrap();
        residual_time_phase(&f, k3, kp2, m, &s, &tg)
    };
    rows.push(("time phase".into(), run(1.0), run(1.01), 1e-8));

    let g0 = |z: f64, x0: f64| 0.3 * z * x0 + 0.1 * (z + x0).sin();
    let g1 = |z: f64, x0: f64| 0.2 * (0.5 * z).cos() * x0 * x0;
    let psi = |z: f64, x0: f64| Complex64::from_polar((-(z - 0.2 * x0).powi(2)).exp(), 0.8 * z - 0.3 * x0);
    let gg: Vec<(f64, f64)> = (0..20).map(|i| (-1.0 + 0.1 * i as f64, 0.2 + 0.05 * i as f64)).collect();
    let clean = residual_gauge(&gauge_reduce(&g0, &g1, 0.25, 1.2), &psi, &gg).map_err(|e| e.to_string())?;
    let skew = SkewedTime(&g1);
    let bad = residual_gauge(&gauge_reduce(&g0, &skew, 0.25, 1.2), &psi, &gg).map_err(|e| e.to_string())?;
    rows.push(("gauge reduction".into(), clean, bad, 1e-8));

    let mut pass = true;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_clean = 0.0f64;
    for (name, clean, bad, lim) in &rows {
        let ratio = bad / clean.max(1e-300);
        let ok = *clean < *lim && ratio >= 1e3;
        if !ok {
            println!("    {name}: clean {clean:.1e} faulted {bad:.1e}");
        }
        pass &= ok;
        worst_ratio = worst_ratio.min(ratio);
        worst_clean = worst_clean.max(*clean);
    }
    let msg = format!("{} checks, worst clean residual {worst_clean:.1e}, smallest fault ratio {worst_ratio:.1e}", rows.len());
    if pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 6 -------------------------------------------------------------------------

fn cross_checks() -> Outcome {
    let mut mismatch = 0.0f64;
    for (gamma, mu) in [(0.4, 0.2), (1.0, 0.5), (1.7, 0.9)] {
        let p = FieldParams { gamma, mu, ..Default::default() };
        for l in -2..4 {
            for n in 0..5 {
                let qn = QuantumNumbers::new(Equation::KleinGordon, l, n).with_k3(0.3);
                let (Ok(a), Ok(b)) = (energy_case1(&qn, &p), energy_case2(&qn, &p, 0.0)) else { continue };
                mismatch = mismatch.max(rel(a.k0, b.k0));
            }
        }
    }
    let p = FieldParams { gamma: 1.0, mu: 0.5, mass: 1.0, ..Default::default() };
    let mut msf = 0.0f64;
    for n in 0..20 {
        let qn = QuantumNumbers::new(Equation::Schrodinger, 0, n);
        let k0 = energy_schrodinger_b(&qn, &p).map_err(|e| e.to_string())?.k0;
        msf = msf.max((k0 - (2 * n + 1) as f64).abs());
    }
    // both are the same formula reached by different algebra
    let msg = format!("subcase 1 vs 2 at alpha=0: max rel {mismatch:.1e}; MSF k0 - (2n+1): max {msf:.1e}");
    if mismatch <= 4.0 * f64::EPSILON && msf < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// 7 -------------------------------------------------------------------------

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run_once = |name: &str| -> Result<Vec<u8>, String> {
        let mut job = JobSpec::new(Command::Spectrum, config("subcase2_kg.toml"));
        job.n = (0..4).collect();
        job.l = (-1..3).collect();
        job.verify = true;
        job.output_path = Some(dir.path().join(name));
        run_spectrum(&job).map_err(|e| format!("{e:#}"))?;
        std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())
    };
    let (a, b) = (run_once("a.csv")?, run_once("b.csv")?);
    if a != b || a.is_empty() {
        return Err("two spectrum runs differ".into());
    }

    let bin = env!("CARGO_BIN_EXE_abflux");
    let cfg = config("subcase2_kg.toml");
    let cfg = cfg.to_str().unwrap();
    let cases: [(&str, Vec<&str>, i32); 4] = [
        ("empty n range", vec!["spectrum", "--config", cfg, "--n", "3..1"], 1),
        ("grid min <= 0", vec!["wavefunction", "--config", cfg, "--grid", "0:1:5"], 1),
        ("fault injection", vec!["spectrum", "--config", cfg, "--verify", "--inject-fault", "0.01"], 2),
        ("Case II Dirac l=0", vec!["spectrum", "--config", "CASE_II", "--l", "0"], 3),
    ];
    let case_ii = config("case_ii_dirac.toml");
    let mut out = vec![format!("identical CSV ({} bytes)", a.len())];
    let mut pass = true;
    for (name, args, want) in cases {
        let args: Vec<&str> = args.into_iter().map(|a| if a == "CASE_II" { case_ii.to_str().unwrap() } else { a }).collect();
        let st = Proc::new(bin).args(&args).output().map_err(|e| e.to_string())?;
        let got = st.status.code().unwrap_or(-1);
        pass &= got == want;
        out.push(format!("{name} -> {got} (want {want})"));
    }
    if pass {
        Ok(out.join("; "))
    } else {
        Err(out.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 special functions", special_functions),
        ("2 spectrum vs oracle", spectrum_oracle),
        ("3 worked values", worked_values),
        ("4 subcase-3 roots", case3_roots),
        ("5 residual suite", residual_suite),
        ("6 cross-checks", cross_checks),
        ("7 CLI determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
