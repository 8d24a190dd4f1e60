//! Independent numerical checks.
//!
//! Nothing in here evaluates Kummer or Laguerre functions. Radial
//! eigenvalues come from a finite-difference Sturm count on the smooth map
//! r = ρ·ln(1 + eˢ), which is logarithmic near the regular singular origin
//! and linear far out. Dirac spectra are found by shooting the first-order
//! radial system in the same variable. Residuals use five-point central
//! differences on the sampled solution.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::fields::{FieldParams, RadialProfile};
use crate::numerics::{bisect, find_root, integrate, NumericsError};
use crate::spectra::{case3_shifts, QuantumNumbers, Variant};
use crate::wavefunctions::{GaugeReduction, Longitudinal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no bound state found in [{lo}, {hi}]")]
    NoBoundStateFound { lo: f64, hi: f64 },
    #[error("grid too coarse: Richardson estimates differ by {0:e} (relative)")]
    GridTooCoarse(f64),
    #[error("norm integral diverges ({0})")]
    Divergent(&'static str),
    #[error("ill-posed problem: {0}")]
    BadProblem(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// U(r, k) in v'' + v'/r + U v = 0.
pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// How the eigenparameter k enters U.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenDependence {
    /// U = U0(r) + k W(r) with W > 0
    Linear,
    /// any continuous dependence
    General,
}

#[derive(Clone)]
pub struct RadialProblem {
    pub u: Coefficient,
    pub dependence: EigenDependence,
    /// search window for k
    pub window: (f64, f64),
    /// length scale of the map r = ρ ln(1 + eˢ)
    pub rho: f64,
    pub r_min: f64,
}

impl std::fmt::Debug for RadialProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProblem")
            .field("dependence", &self.dependence)
            .field("window", &self.window)
            .field("rho", &self.rho)
            .field("r_min", &self.r_min)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridInfo {
    pub points: Vec<usize>,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub eigenvalues: Vec<f64>,
    /// number of interior nodes of each eigenfunction
    pub node_counts: Vec<usize>,
    pub residual_max: f64,
    pub norm: f64,
    /// worst relative disagreement between the two Richardson estimates
    pub richardson_delta: f64,
    pub grid: GridInfo,
}

const BASE_POINTS: usize = 8000;
/// largest outer radius in units of ρ
const OUTER_CAP: f64 = 20000.0;
/// coarsest step in s on the first grid
const MAX_STEP: f64 = 0.05;
const RICHARDSON_TOL: f64 = 1e-6;

struct Grid {
    h: f64,
    r: Vec<f64>,
    /// r·r′ at nodes
    w: Vec<f64>,
    /// r/r′ at half nodes i + 1/2
    p_half: Vec<f64>,
}

fn softplus(s: f64) -> f64 {
    if s > 30.0 {
        s + (-s).exp()
    } else {
        s.exp().ln_1p()
    }
}

fn sigmoid(s: f64) -> f64 {
    1.0 / (1.0 + (-s).exp())
}

fn inv_softplus(y: f64) -> f64 {
    if y > 30.0 {
        y + (-(-y).exp()).ln_1p()
    } else {
        y.exp_m1().ln()
    }
}

impl Grid {
    fn new(rho: f64, r_min: f64, r_max: f64, n: usize) -> Grid {
        let s0 = inv_softplus(r_min / rho);
        let s1 = inv_softplus(r_max / rho);
        let h = (s1 - s0) / n as f64;
        let mut r = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        let mut p_half = Vec::with_capacity(n);
        for i in 0..n {
            let s = s0 + i as f64 * h;
            let ri = rho * softplus(s);
            let rp = rho * sigmoid(s);
            r.push(ri);
            w.push(ri * rp);
            let sh = s + 0.5 * h;
            p_half.push(softplus(sh) / sigmoid(sh));
        }
        Grid { h, r, w, p_half }
    }

    /// Number of negative pivots of the LDLᵀ factorization of the
    /// discretized −(p v_s)_s − r r′ U v with a Robin row at r_min and a
    /// Dirichlet condition at r_max.
    fn count(&self, u: &dyn Fn(f64, f64) -> f64, k: f64) -> Result<usize> {
        let nu = origin_exponent(u, self.r[0], k)?;
        let h2 = self.h * self.h;
        let n = self.r.len();
        let mut neg = 0;
        let q0 = self.w[0] * u(self.r[0], k);
        let mut d = self.p_half[0] / h2 + nu / self.h - 0.5 * q0;
        if d < 0.0 {
            neg += 1;
        }
        for i in 1..n {
            let b = -self.p_half[i - 1] / h2;
            let q = self.w[i] * u(self.r[i], k);
            let a = (self.p_half[i - 1] + self.p_half[i]) / h2 - q;
            if !a.is_finite() {
                return Err(OracleError::BadProblem(format!("U not finite at r = {}", self.r[i])));
            }
            let dd = if d == 0.0 { f64::MIN_POSITIVE } else { d };
            d = a - b * b / dd;
            if d < 0.0 {
                neg += 1;
            }
        }
        Ok(neg)
    }
}

/// ν in v ~ r^ν at the origin from the limit of −r²U, with the linear
/// correction removed.
fn origin_exponent(u: &dyn Fn(f64, f64) -> f64, r0: f64, k: f64) -> Result<f64> {
    let g = |r: f64| -r * r * u(r, k);
    let nu2 = 2.0 * g(r0) - g(2.0 * r0);
    if !nu2.is_finite() || nu2 < -1e-9 {
        return Err(OracleError::BadProblem(format!("origin exponent squared {nu2} < 0")));
    }
    Ok(nu2.max(0.0).sqrt())
}

/// Domain size from the outer turning point and a WKB decay integral.
fn outer_radius(u: &dyn Fn(f64, f64) -> f64, k: f64, rho: f64) -> f64 {
    let cap = OUTER_CAP * rho;
    let mut r_t = rho;
    let mut r = 0.01 * rho;
    while r < cap {
        if u(r, k) > 0.0 {
            r_t = r;
        }
        r *= 1.02;
    }
    let mut acc = 0.0;
    let mut r = r_t;
    while acc < 25.0 && r < cap {
        let dr = (0.01 * rho).max(1e-3 * r);
        acc += (-u(r + 0.5 * dr, k)).max(0.0).sqrt() * dr;
        r += dr;
    }
    (8.0 * r_t).max(r).clamp(10.0 * rho, cap)
}

/// Points of the first grid: at least `BASE_POINTS`, and enough to keep
/// the step in s below `MAX_STEP` on long domains.
fn base_points(rho: f64, r_min: f64, r_max: f64) -> usize {
    let span = inv_softplus(r_max / rho) - inv_softplus(r_min / rho);
    BASE_POINTS.max((span / MAX_STEP).ceil() as usize)
}

fn count_on(grid: &Grid, problem: &RadialProblem, k: f64) -> Result<usize> {
    grid.count(&*problem.u, k)
}

/// Eigenvalues of a radial problem by Sturm counting, bisection and
/// Richardson extrapolation over 3 grids.
///
/// Linear problems return the `count` lowest eigenvalues with node counts
/// 0, 1, …; general problems return every eigenvalue in the window whose
/// Sturm count label is below `count`.
pub fn solve_radial_eigen(problem: &RadialProblem, count: usize) -> Result<OracleReport> {
    if count == 0 {
        return Err(OracleError::BadProblem("count = 0".into()));
    }
    let (lo, hi, approx) = locate(problem, count)?;
    let mut eigenvalues = Vec::new();
    let mut nodes = Vec::new();
    let mut worst = 0.0f64;
    let mut points = Vec::new();
    let mut r_max_seen = 0.0f64;
    for &(k_approx, node) in &approx {
        let lv = refine_level(problem, lo, hi, k_approx, node)?;
        worst = worst.max(lv.delta);
        r_max_seen = r_max_seen.max(lv.r_max);
        points = lv.points;
        eigenvalues.push(lv.value);
        nodes.push(node);
    }
    if worst > RICHARDSON_TOL {
        return Err(OracleError::GridTooCoarse(worst));
    }
    let mut pairs: Vec<(f64, usize)> = eigenvalues.into_iter().zip(nodes).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // two coarse crossings can refine onto the same eigenvalue
    pairs.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9 * (1.0 + b.0.abs()));
    Ok(OracleReport {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        node_counts: pairs.iter().map(|p| p.1).collect(),
        residual_max: 0.0,
        norm: f64::NAN,
        richardson_delta: worst,
        grid: GridInfo { points, r_min: problem.r_min, r_max: r_max_seen },
    })
}

/// The eigenvalue closest to `guess`: a local count scan on a domain sized
/// for the guess, then refinement of the nearest crossing only.
pub fn solve_radial_eigen_near(problem: &RadialProblem, guess: f64) -> Result<f64> {
    let (lo, hi) = search_window(problem)?;
    let u = &*problem.u;
    let g = guess.clamp(lo, hi);
    let edge = if problem.dependence == EigenDependence::General && g - lo < hi - g { lo } else { hi };
    let r_max = outer_radius(u, g + 0.05 * (edge - g), problem.rho);
    let g1 = Grid::new(problem.rho, problem.r_min, r_max, base_points(problem.rho, problem.r_min, r_max) / 2);
    let mut w = 0.01 * (hi - lo);
    for _ in 0..8 {
        let (a, b) = ((g - w).max(lo), (g + w).min(hi));
        let npts = 40;
        let ks: Vec<f64> = (0..=npts).map(|i| a + (b - a) * i as f64 / npts as f64).collect();
        let counts: Vec<usize> = ks.iter().map(|&k| count_on(&g1, problem, k)).collect::<Result<_>>()?;
        let dist = |i: usize| if ks[i] <= g && g <= ks[i + 1] { 0.0 } else { (ks[i] - g).abs().min((ks[i + 1] - g).abs()) };
        let best = (0..npts)
            .filter(|&i| counts[i] != counts[i + 1])
            .min_by(|&i, &j| dist(i).total_cmp(&dist(j)));
        if let Some(i) = best {
            let mut found = Vec::new();
            split_transitions(&g1, problem, (ks[i], counts[i]), (ks[i + 1], counts[i + 1]), 0, &mut found)?;
            let &(k, c) = found
                .iter()
                .min_by(|x, y| (x.0 - g).abs().total_cmp(&(y.0 - g).abs()))
                .ok_or(OracleError::NoBoundStateFound { lo: a, hi: b })?;
            let node = match problem.dependence {
                EigenDependence::Linear => c - count_on(&g1, problem, lo)?,
                EigenDependence::General => c,
            };
            let lv = refine_level(problem, lo, hi, k, node)?;
            if lv.delta > RICHARDSON_TOL {
                return Err(OracleError::GridTooCoarse(lv.delta));
            }
            return Ok(lv.value);
        }
        if a == lo && b == hi {
            break;
        }
        w *= 3.0;
    }
    Err(OracleError::NoBoundStateFound { lo, hi })
}

/// The window, with the lower end raised for linear problems to where the
/// operator stops being positive.
fn search_window(problem: &RadialProblem) -> Result<(f64, f64)> {
    let (mut lo, hi) = problem.window;
    if !(hi > lo) || !(problem.rho > 0.0) || !(problem.r_min > 0.0) {
        return Err(OracleError::BadProblem("window, rho or r_min".into()));
    }
    let u = &*problem.u;
    if problem.dependence == EigenDependence::Linear {
        // below min(−U0/W) the operator is positive
        let r_hi = outer_radius(u, hi, problem.rho);
        let mut floor = f64::INFINITY;
        let mut r = problem.r_min;
        while r < r_hi {
            let u0 = u(r, 0.0);
            let wt = u(r, 1.0) - u0;
            if wt > 0.0 {
                floor = floor.min(-u0 / wt);
            }
            r *= 1.01;
        }
        if floor.is_finite() {
            lo = lo.max(floor - 1e-3 * (1.0 + floor.abs()));
        }
    }
    Ok((lo, hi))
}

/// Pass 1: the search window and coarse crossings on a domain sized for
/// the window top.
fn locate(problem: &RadialProblem, count: usize) -> Result<(f64, f64, Vec<(f64, usize)>)> {
    let (lo, hi) = search_window(problem)?;
    let u = &*problem.u;
    let r_max1 = outer_radius(u, hi, problem.rho);
    let g1 = Grid::new(problem.rho, problem.r_min, r_max1, base_points(problem.rho, problem.r_min, r_max1) / 2);
    let approx: Vec<(f64, usize)> = match problem.dependence {
        EigenDependence::Linear => {
            let c_lo = count_on(&g1, problem, lo)?;
            let c_hi = count_on(&g1, problem, hi)?;
            let mut out = Vec::new();
            for j in c_lo..c_hi.min(c_lo.saturating_add(count)) {
                let k = bisect(
                    |k| if count_on(&g1, problem, k).unwrap_or(usize::MAX) > j { 1.0 } else { -1.0 },
                    lo,
                    hi,
                    1e-10 * (1.0 + hi.abs()),
                )?;
                out.push((k, j - c_lo));
            }
            out
        }
        EigenDependence::General => {
            let mut v = scan_transitions(&g1, problem, lo, hi, 400)?;
            v.retain(|x| x.1 < count);
            v
        }
    };
    if approx.is_empty() {
        return Err(OracleError::NoBoundStateFound { lo, hi });
    }
    Ok((lo, hi, approx))
}

struct Refined {
    value: f64,
    delta: f64,
    points: Vec<usize>,
    r_max: f64,
}

/// Pass 2: one eigenvalue on a domain sized for it, on 3 grids, with
/// Richardson extrapolation.
fn refine_level(problem: &RadialProblem, lo: f64, hi: f64, k_approx: f64, node: usize) -> Result<Refined> {
    let u = &*problem.u;
    // size the domain a little closer to the continuum edge
    let edge = if problem.dependence == EigenDependence::General && k_approx - lo < hi - k_approx { lo } else { hi };
    let k_dom = k_approx + 0.05 * (edge - k_approx);
    let r_max = outer_radius(u, k_dom, problem.rho);
    let base = base_points(problem.rho, problem.r_min, r_max);
    let mut est = Vec::new();
    let mut points = Vec::new();
    for level in 0..3 {
        let n = base << level;
        points.push(n);
        let g = Grid::new(problem.rho, problem.r_min, r_max, n);
        let k = match problem.dependence {
            EigenDependence::Linear => {
                let j = count_on(&g, problem, lo)? + node;
                bisect(
                    |k| if count_on(&g, problem, k).unwrap_or(usize::MAX) > j { 1.0 } else { -1.0 },
                    lo,
                    hi,
                    1e-14 * (1.0 + k_approx.abs()),
                )?
            }
            EigenDependence::General => refine_transition(&g, problem, k_approx, lo, hi)?,
        };
        est.push(k);
    }
    let r1 = (4.0 * est[1] - est[0]) / 3.0;
    let r2 = (4.0 * est[2] - est[1]) / 3.0;
    let scale = r2.abs().max(1e-3 * (hi - lo));
    Ok(Refined { value: r2 + (r2 - r1) / 15.0, delta: (r2 - r1).abs() / scale, points, r_max })
}

/// Locate changes of the Sturm count on a k grid; returns the approximate
/// crossing and the smaller of the two counts.
fn scan_transitions(g: &Grid, problem: &RadialProblem, lo: f64, hi: f64, npts: usize) -> Result<Vec<(f64, usize)>> {
    let ks: Vec<f64> = (0..=npts).map(|i| lo + (hi - lo) * i as f64 / npts as f64).collect();
    let counts: Vec<usize> = ks.iter().map(|&k| count_on(g, problem, k)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..npts {
        split_transitions(g, problem, (ks[i], counts[i]), (ks[i + 1], counts[i + 1]), 0, &mut out)?;
    }
    Ok(out)
}

/// Bisect a count change; intervals where the count moves by more than
/// one are split until each holds a single crossing.
fn split_transitions(
    g: &Grid,
    problem: &RadialProblem,
    (ka, a): (f64, usize),
    (kb, b): (f64, usize),
    depth: u32,
    out: &mut Vec<(f64, usize)>,
) -> Result<()> {
    if a == b {
        return Ok(());
    }
    if a.abs_diff(b) > 1 && depth < 50 {
        let km = 0.5 * (ka + kb);
        let m = count_on(g, problem, km)?;
        split_transitions(g, problem, (ka, a), (km, m), depth + 1, out)?;
        return split_transitions(g, problem, (km, m), (kb, b), depth + 1, out);
    }
    let k = bisect(
        |k| if count_on(g, problem, k).unwrap_or(a) == a { -1.0 } else { 1.0 },
        ka,
        kb,
        1e-12 * (1.0 + ka.abs()),
    )?;
    out.push((k, a.min(b)));
    Ok(())
}

fn refine_transition(g: &Grid, problem: &RadialProblem, k0: f64, lo: f64, hi: f64) -> Result<f64> {
    // grow the bracket from tiny so that the nearest crossing wins
    let mut width = 1e-7 * (1.0 + k0.abs());
    for _ in 0..40 {
        let a = (k0 - width).max(lo);
        let b = (k0 + width).min(hi);
        let (ca, cb) = (count_on(g, problem, a)?, count_on(g, problem, b)?);
        if ca != cb {
            return Ok(bisect(
                |k| if count_on(g, problem, k).unwrap_or(ca) == ca { -1.0 } else { 1.0 },
                a,
                b,
                1e-14 * (1.0 + k0.abs()),
            )?);
        }
        if a == lo && b == hi {
            break;
        }
        width *= 2.0;
    }
    Err(OracleError::NoBoundStateFound { lo: k0 - width, hi: k0 + width })
}

// ---------------------------------------------------------------------------
// Dirac shooting

/// t-form matrix: dΦ/d(ln r) = M(r, k) Φ.
pub type TMatrix = Arc<dyn Fn(f64, f64) -> [[f64; 2]; 2] + Send + Sync>;

#[derive(Clone)]
pub struct DiracProblem {
    pub m_t: TMatrix,
    /// decay rate at infinity as a function of k (None outside the gap)
    pub decay: Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>,
    pub window: (f64, f64),
    /// |k| at which the decay rate vanishes; levels accumulate below it
    pub threshold: f64,
    pub rho: f64,
    pub r_min: f64,
}

fn eig2(m: [[f64; 2]; 2]) -> Option<((f64, [f64; 2]), (f64, [f64; 2]))> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let vec_for = |lam: f64| {
        let a = [m[0][1], lam - m[0][0]];
        let b = [lam - m[1][1], m[1][0]];
        let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
        if na >= nb {
            [a[0] / na, a[1] / na]
        } else {
            [b[0] / nb, b[1] / nb]
        }
    };
    let (l1, l2) = (tr / 2.0 + sq, tr / 2.0 - sq);
    Some(((l1, vec_for(l1)), (l2, vec_for(l2))))
}

fn rk4_shoot(m_t: &dyn Fn(f64, f64) -> [[f64; 2]; 2], k: f64, rho: f64, s_from: f64, s_to: f64, h: f64, y0: [f64; 2]) -> [f64; 2] {
    let n = (((s_to - s_from) / h).abs().ceil() as usize).max(1);
    let hs = (s_to - s_from) / n as f64;
    let rhs = |s: f64, y: [f64; 2]| {
        let r = rho * softplus(s);
        let jac = sigmoid(s) / softplus(s);
        let m = m_t(r, k);
        [
            jac * (m[0][0] * y[0] + m[0][1] * y[1]),
            jac * (m[1][0] * y[0] + m[1][1] * y[1]),
        ]
    };
    let mut y = y0;
    let mut s = s_from;
    for i in 0..n {
        let k1 = rhs(s, y);
        let k2 = rhs(s + hs / 2.0, [y[0] + hs / 2.0 * k1[0], y[1] + hs / 2.0 * k1[1]]);
        let k3 = rhs(s + hs / 2.0, [y[0] + hs / 2.0 * k2[0], y[1] + hs / 2.0 * k2[1]]);
        let k4 = rhs(s + hs, [y[0] + hs * k3[0], y[1] + hs * k3[1]]);
        y = [
            y[0] + hs / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + hs / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        s += hs;
        if i % 64 == 0 {
            let nrm = y[0].hypot(y[1]);
            if nrm > 0.0 && nrm.is_finite() {
                y = [y[0] / nrm, y[1] / nrm];
            }
        }
    }
    y
}

/// sin 2θ between the outward (regular) and inward (decaying) solutions at
/// the match point, and |cos θ|. Independent of eigenvector signs.
fn dirac_mismatch(pr: &DiracProblem, k: f64, h: f64) -> Option<(f64, f64)> {
    let e = (pr.decay)(k)?;
    if !(e > 0.0) {
        return None;
    }
    let m0 = (pr.m_t)(pr.r_min, k);
    let ((nu, reg), _) = eig2(m0)?;
    // the inward start's error decays like e^{-2E(r_max - r_match)}
    let r_match = ((1.0 + nu.abs()) / e).max(10.0 * pr.r_min);
    let r_max = (r_match + 25.0 / e + 10.0 * pr.rho).min(4000.0 * pr.rho);
    let r_match = r_match.min(0.5 * r_max);
    let minf = (pr.m_t)(r_max, k);
    let scaled = [[minf[0][0] / r_max, minf[0][1] / r_max], [minf[1][0] / r_max, minf[1][1] / r_max]];
    let (_, (_, dec)) = eig2(scaled)?;
    let s_min = inv_softplus(pr.r_min / pr.rho);
    let s_match = inv_softplus(r_match / pr.rho);
    let s_max = inv_softplus(r_max / pr.rho);
    let o = rk4_shoot(&*pr.m_t, k, pr.rho, s_min, s_match, h, reg);
    let i = rk4_shoot(&*pr.m_t, k, pr.rho, s_max, s_match, h, dec);
    let (no, ni) = (o[0].hypot(o[1]), i[0].hypot(i[1]));
    let sin = (o[0] * i[1] - o[1] * i[0]) / (no * ni);
    let cos = (o[0] * i[0] + o[1] * i[1]) / (no * ni);
    Some((2.0 * sin * cos, cos.abs()))
}

const SHOOT_STEP: f64 = 0.004;

/// Indices i with a sign change of the mismatch on [ks[i], ks[i+1]].
fn dirac_brackets(pr: &DiracProblem, ks: &[f64]) -> Vec<usize> {
    // a coarse step is enough to locate sign changes
    let vals: Vec<Option<f64>> = ks.iter().map(|&k| dirac_mismatch(pr, k, 10.0 * SHOOT_STEP).map(|v| v.0)).collect();
    (0..ks.len() - 1)
        .filter(|&i| matches!((vals[i], vals[i + 1]), (Some(a), Some(b)) if a.signum() != b.signum()))
        .collect()
}

/// Uniform points in the window plus points log-uniform in the decay rate
/// E between `e_lo` and `e_hi` on both sides of the gap, where shallow
/// levels crowd together.
fn scan_points(pr: &DiracProblem, e_lo: f64, e_hi: f64, n_log: usize) -> Vec<f64> {
    let (lo, hi) = pr.window;
    let mut ks: Vec<f64> = (0..=200).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect();
    let big = pr.threshold;
    for j in 0..=n_log {
        let e = e_hi * (e_lo / e_hi).powf(j as f64 / n_log as f64);
        let k = (big * big - e * e).max(0.0).sqrt();
        ks.extend([k, -k].into_iter().filter(|k| *k > lo && *k < hi));
    }
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + a.abs()));
    ks
}

/// Bisection at two fine steps plus Richardson; None for an orthogonal
/// crossing, which is not an eigenvalue.
fn refine_bracket(pr: &DiracProblem, ks: &[f64], i: usize) -> Option<f64> {
    let last = ks.len() - 1;
    let mut est = Vec::new();
    for h in [SHOOT_STEP / 2.0, SHOOT_STEP / 4.0] {
        let f = |k: f64| dirac_mismatch(pr, k, h).map_or(f64::NAN, |v| v.0);
        // the finer step may move the root slightly past a scan point
        let (mut x0, mut x1) = (ks[i], ks[i + 1]);
        if f(x0).signum() == f(x1).signum() {
            x0 = ks[i.saturating_sub(1)];
            x1 = ks[(i + 2).min(last)];
        }
        let k = find_root(f, x0, x1, 1e-14 * (1.0 + ks[i].abs())).ok()?;
        if dirac_mismatch(pr, k, h).map_or(true, |v| v.1 < 0.5) {
            return None;
        }
        est.push(k);
    }
    Some((16.0 * est[1] - est[0]) / 15.0)
}

/// Eigenvalues of a first-order radial Dirac system in the window.
pub fn solve_dirac_shooting(pr: &DiracProblem) -> Result<Vec<f64>> {
    let big = pr.threshold;
    let ks = scan_points(pr, (0.02 / pr.rho).min(0.5 * big), big, 300);
    let roots: Vec<f64> = dirac_brackets(pr, &ks).into_iter().filter_map(|i| refine_bracket(pr, &ks, i)).collect();
    if roots.is_empty() {
        return Err(OracleError::NoBoundStateFound { lo: pr.window.0, hi: pr.window.1 });
    }
    Ok(roots)
}

/// The eigenvalue nearest to `guess`. The scan is dense only around the
/// guess and just the closest brackets are refined, which keeps the cost
/// down near the threshold where levels crowd.
pub fn solve_dirac_shooting_near(pr: &DiracProblem, guess: f64) -> Result<f64> {
    let big = pr.threshold;
    let eg = (big * big - guess * guess).max(0.0).sqrt().max((0.02 / pr.rho).min(0.5 * big));
    let ks = scan_points(pr, 0.5 * eg, (2.0 * eg).min(big), 120);
    let mut idx = dirac_brackets(pr, &ks);
    let dist = |i: &usize| {
        let (a, b) = (ks[*i], ks[*i + 1]);
        if guess < a {
            a - guess
        } else if guess > b {
            guess - b
        } else {
            0.0
        }
    };
    idx.sort_by(|a, b| dist(a).total_cmp(&dist(b)));
    let found: Vec<f64> = idx.iter().take(3).filter_map(|&i| refine_bracket(pr, &ks, i)).collect();
    found
        .into_iter()
        .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
        .ok_or(OracleError::NoBoundStateFound { lo: pr.window.0, hi: pr.window.1 })
}

// ---------------------------------------------------------------------------
// Problem builders. These use the field profiles directly.

fn length_scale(p: &FieldParams, quadratic: bool) -> f64 {
    let g = if quadratic { p.gamma.abs().sqrt() } else { p.gamma.abs() };
    1.0 / g.max(0.2 * p.mass).max(0.05)
}

const ETA: f64 = 1e-4;

/// Klein-Gordon, f0 = α/r, f1 = 0, f2 = γr; eigenparameter k0.
pub fn problem_kg_case1(qn: &QuantumNumbers, p: &FieldParams) -> RadialProblem {
    let (a, g, m, k3) = (p.alpha, p.gamma, p.mass, qn.k3);
    let l = qn.l as f64 + p.mu;
    let f0 = RadialProfile::InverseR { alpha: a };
    let f2 = RadialProfile::Linear { gamma: g };
    let big_m = (m * m + k3 * k3 + g * g).sqrt();
    RadialProblem {
        u: Arc::new(move |r, k| {
            let t = f2.value(r) - l;
            (k - f0.value(r)).powi(2) - k3 * k3 - m * m - t * t / (r * r)
        }),
        dependence: EigenDependence::General,
        window: (-big_m * (1.0 - ETA), big_m * (1.0 - ETA)),
        rho: length_scale(p, false),
        r_min: 1e-7 * length_scale(p, false),
    }
}

/// Klein-Gordon, f0 = 0, f1 = α/r, f2 = γr; eigenparameter k0².
pub fn problem_kg_case2(qn: &QuantumNumbers, p: &FieldParams) -> RadialProblem {
    let (a, g, m, k3) = (p.alpha, p.gamma, p.mass, qn.k3);
    let l = qn.l as f64 + p.mu;
    let f1 = RadialProfile::InverseR { alpha: a };
    let f2 = RadialProfile::Linear { gamma: g };
    let m2 = m * m + k3 * k3 + g * g;
    RadialProblem {
        u: Arc::new(move |r, k| {
            let t = f2.value(r) - l;
            k - m * m - (k3 - f1.value(r)).powi(2) - t * t / (r * r)
        }),
        dependence: EigenDependence::Linear,
        window: (-m2, m2 * (1.0 - ETA)),
        rho: length_scale(p, false),
        r_min: 1e-7 * length_scale(p, false),
    }
}

/// Second-order equation of the f0 = ε f1 subcase for component s
/// (s = 0 Klein-Gordon, s = 1, 2 Dirac); eigenparameter k0.
pub fn problem_case3(qn: &QuantumNumbers, variant: Variant, p: &FieldParams, s: u8) -> RadialProblem {
    let (tau, delta) = case3_shifts(s);
    let (a, b, g, m, k3, eps) = (p.alpha, p.beta, p.gamma, p.mass, qn.k3, p.epsilon);
    let l = qn.l as f64 + p.mu;
    let (f, f2) = match variant {
        Variant::A => (RadialProfile::InverseRPlusInverseR2 { alpha: a, beta: b }, RadialProfile::Linear { gamma: g }),
        Variant::B => (RadialProfile::QuadraticPlusInverseR2 { alpha: a, beta: b }, RadialProfile::Quadratic { gamma: g }),
    };
    let window = match variant {
        Variant::A => {
            let big_m = (m * m + k3 * k3 + g * g).sqrt();
            (-big_m * (1.0 - ETA), big_m * (1.0 - ETA))
        }
        Variant::B => {
            // k0² grows like 4 E0 n with E0² = γ² + 2ακ
            let levels = qn.n as f64 + 3.0 + l.abs() + b.abs();
            let base = m * m + k3 * k3 + 2.0 * g.abs() * (l.abs() + 2.0);
            let mut span = (base + 4.0 * g.abs() * levels).sqrt();
            for _ in 0..4 {
                let e0 = (g * g + 2.0 * a.abs() * (span + k3.abs())).sqrt();
                span = 1.5 * (base + 4.0 * e0 * levels).sqrt();
            }
            // E0² = γ² + 2α(k0 − εk3) must stay positive
            let mut lo = -span;
            let mut hi = span;
            if a > 0.0 {
                lo = lo.max(eps * k3 - g * g / (2.0 * a) + 1e-3);
            } else if a < 0.0 {
                hi = hi.min(eps * k3 - g * g / (2.0 * a) - 1e-3);
            }
            (lo, hi)
        }
    };
    // the origin exponent (L − τ)² + 2βκ must stay non-negative
    let (mut lo, mut hi) = window;
    let lt2 = (l - tau).powi(2);
    if b > 0.0 {
        lo = lo.max(eps * k3 - lt2 / (2.0 * b) + 1e-6);
    } else if b < 0.0 {
        hi = hi.min(eps * k3 - lt2 / (2.0 * b) - 1e-6);
    }
    let window = (lo, hi);
    let quadratic = variant == Variant::B;
    RadialProblem {
        u: Arc::new(move |r, k| {
            let kap = k - eps * k3;
            let t = f2.value(r) - l + tau;
            -2.0 * kap * f.value(r) - t * t / (r * r) + delta * f2.derivative(r) / r + k * k - k3 * k3 - m * m
        }),
        dependence: EigenDependence::General,
        window,
        rho: length_scale(p, quadratic),
        r_min: 1e-7 * length_scale(p, quadratic),
    }
}

/// Transverse equation of the longitudinal case; eigenparameter k⊥².
pub fn problem_case_ii(qn: &QuantumNumbers, p: &FieldParams, s: u8, f2: RadialProfile) -> RadialProblem {
    let (tau, delta) = case3_shifts(s);
    let l = qn.l as f64 + p.mu;
    let quadratic = matches!(f2, RadialProfile::Quadratic { .. });
    let top = match f2 {
        RadialProfile::Linear { gamma } => gamma * gamma * (1.0 - ETA),
        _ => 1e3,
    };
    RadialProblem {
        u: Arc::new(move |r, k| {
            let t = f2.value(r) - l + tau;
            -t * t / (r * r) + delta * f2.derivative(r) / r + k
        }),
        dependence: EigenDependence::Linear,
        window: (-top.abs() - 10.0, top),
        rho: length_scale(p, quadratic),
        r_min: 1e-7 * length_scale(p, quadratic),
    }
}

/// Schrödinger radial equation for arbitrary radial f0, f1, f2; eigenparameter k0.
pub fn problem_schrodinger(
    qn: &QuantumNumbers,
    p: &FieldParams,
    f0: RadialProfile,
    f1: RadialProfile,
    f2: RadialProfile,
) -> RadialProblem {
    let (m, k3) = (p.mass, qn.k3);
    let l = qn.l as f64 + p.mu;
    let quadratic = matches!(f2, RadialProfile::Quadratic { .. });
    let top = match f2 {
        RadialProfile::Linear { gamma } => (gamma * gamma + k3 * k3) / (2.0 * m) * (1.0 - ETA),
        _ => 50.0 + 20.0 * qn.n as f64 * (p.gamma.abs() + p.alpha.abs().sqrt()),
    };
    // cancellation of the r⁻³, r⁻⁴ terms limits how close to 0 we can go
    let r_min_rel = if p.lambda != 0.0 { 1e-4 } else { 1e-7 };
    let rho = length_scale(p, quadratic);
    RadialProblem {
        u: Arc::new(move |r, k| {
            let t = f2.value(r) - l;
            2.0 * m * (k - f0.value(r)) - t * t / (r * r) - (k3 - f1.value(r)).powi(2)
        }),
        dependence: EigenDependence::Linear,
        window: (-1e4, top),
        rho,
        r_min: r_min_rel * rho,
    }
}

/// Dirac subcase 1 (f0 = α/r) as a first-order system.
pub fn problem_dirac_case1(qn: &QuantumNumbers, p: &FieldParams) -> DiracProblem {
    let (a, g, m, k3) = (p.alpha, p.gamma, p.mass, qn.k3);
    let l = qn.l as f64 + p.mu;
    let zeta = qn.zeta as f64;
    let l1 = (m * m + k3 * k3).sqrt();
    let m2 = m * m + k3 * k3 + g * g;
    DiracProblem {
        m_t: Arc::new(move |r, k| {
            let gg = g * r - l;
            let f = a / r;
            [[-(gg + 1.0), r * (k - f + zeta * l1)], [-r * (k - f - zeta * l1), gg]]
        }),
        decay: Arc::new(move |k| {
            let e2 = m2 - k * k;
            (e2 > 0.0).then(|| e2.sqrt())
        }),
        window: (-m2.sqrt() * (1.0 - ETA), m2.sqrt() * (1.0 - ETA)),
        threshold: m2.sqrt(),
        rho: length_scale(p, false),
        r_min: 1e-7 * length_scale(p, false),
    }
}

/// Dirac subcase 2 (f1 = α/r) as a first-order system; k0 > m only.
pub fn problem_dirac_case2(qn: &QuantumNumbers, p: &FieldParams) -> DiracProblem {
    let (a, g, m, k3) = (p.alpha, p.gamma, p.mass, qn.k3);
    let l = qn.l as f64 + p.mu;
    let zeta = qn.zeta as f64;
    let m2 = m * m + k3 * k3 + g * g;
    DiracProblem {
        m_t: Arc::new(move |r, k| {
            let gg = g * r - l;
            let f = a / r;
            let l2 = (k * k - m * m).max(0.0).sqrt();
            [[-(gg + 1.0), -r * (zeta * l2 - k3 + f)], [r * (zeta * l2 + k3 - f), gg]]
        }),
        decay: Arc::new(move |k| {
            let e2 = m2 - k * k;
            (e2 > 0.0 && k >= m).then(|| e2.sqrt())
        }),
        window: (m * (1.0 + ETA), m2.sqrt() * (1.0 - ETA)),
        threshold: m2.sqrt(),
        rho: length_scale(p, false),
        r_min: 1e-7 * length_scale(p, false),
    }
}

// ---------------------------------------------------------------------------
// Residuals

fn fd1<F: Fn(f64) -> Complex64>(f: &F, x: f64, h: f64) -> Complex64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn fd2<F: Fn(f64) -> Complex64>(f: &F, x: f64, h: f64) -> Complex64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

const FLOOR: f64 = 1e-300;

/// max over the grid of |v'' + v'/r + U v| relative to the sum of the
/// magnitudes of the three terms.
pub fn residual_second_order(u: &dyn Fn(f64) -> f64, solution: &dyn Fn(f64) -> Complex64, grid: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &r in grid {
        let h = 1e-3 * r;
        let v = solution(r);
        let d1 = fd1(&solution, r, h);
        let d2 = fd2(&solution, r, h);
        let uv = u(r) * v;
        let res = (d2 + d1 / r + uv).norm();
        let scale = d2.norm() + (d1 / r).norm() + uv.norm() + FLOOR;
        worst = worst.max(res / scale);
    }
    worst
}

/// Which first-order pair system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSystem {
    /// f0 = α/r, spin integral T1
    Case1,
    /// f1 = α/r, helicity
    Case2,
}

/// Residual of the coupled first-order radial system for (φ1, φ2).
pub fn residual_first_order_pair(
    system: PairSystem,
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    pair: &dyn Fn(f64) -> [Complex64; 2],
    grid: &[f64],
) -> f64 {
    let l = qn.l as f64 + p.mu;
    let zeta = qn.zeta as f64;
    let mut worst = 0.0f64;
    for &r in grid {
        let h = 1e-3 * r;
        let [f1, f2] = pair(r);
        let d1 = fd1(&|t| pair(t)[0], r, h);
        let d2 = fd1(&|t| pair(t)[1], r, h);
        let g = p.gamma * r - l;
        let f = p.alpha / r;
        let (terms1, terms2): ([Complex64; 3], [Complex64; 3]) = match system {
            PairSystem::Case1 => {
                let l1 = (p.mass * p.mass + qn.k3 * qn.k3).sqrt();
                (
                    [(k0 - f - zeta * l1) * f1, -(g / r) * f2, d2],
                    [(g + 1.0) / r * f1, d1, -(k0 - f + zeta * l1) * f2],
                )
            }
            PairSystem::Case2 => {
                let l2 = (k0 * k0 - p.mass * p.mass).max(0.0).sqrt();
                (
                    [(zeta * l2 + qn.k3 - f) * f1, g / r * f2, -d2],
                    [(g + 1.0) / r * f1, d1, (zeta * l2 - qn.k3 + f) * f2],
                )
            }
        };
        for terms in [terms1, terms2] {
            let res: Complex64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() + FLOOR;
            worst = worst.max(res.norm() / scale);
        }
    }
    worst
}

/// Residual of the full radial Dirac system
/// [ρ3π0 + iρ2Σ3π3 + ρ2Σ2(∂r + 1/2r) + iρ2Σ1(f2 − l − μ + 1/2)/r − m]Φ = 0
/// with π0 = k0 − f0(r), π3 = k3 − f1(r).
#[allow(clippy::too_many_arguments)]
pub fn residual_dirac_radial(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    f0: &RadialProfile,
    f1: &RadialProfile,
    f2: &RadialProfile,
    comps: &dyn Fn(f64) -> [Complex64; 4],
    grid: &[f64],
) -> f64 {
    let l = qn.l as f64 + p.mu;
    let m = p.mass;
    let mut worst = 0.0f64;
    for &r in grid {
        let h = 1e-3 * r;
        let [u1, u2, l1, l2] = comps(r);
        let d: Vec<Complex64> = (0..4).map(|i| fd1(&|t| comps(t)[i], r, h)).collect();
        let dd = |i: usize, v: Complex64| d[i] + v / (2.0 * r);
        let pi0 = k0 - f0.value(r);
        let pi3 = qn.k3 - f1.value(r);
        let g = (f2.value(r) - l + 0.5) / r;
        let rows: [[Complex64; 5]; 4] = [
            [pi0 * u1, pi3 * l1, -dd(3, l2), g * l2, -m * u1],
            [pi0 * u2, -pi3 * l2, dd(2, l1), g * l1, -m * u2],
            [-pi0 * l1, -pi3 * u1, dd(1, u2), -g * u2, -m * l1],
            [-pi0 * l2, pi3 * u2, -dd(0, u1), -g * u1, -m * l2],
        ];
        let scale: f64 = rows.iter().flatten().map(|t| t.norm()).sum::<f64>() / 4.0 + FLOOR;
        for row in rows {
            let res: Complex64 = row.iter().sum();
            worst = worst.max(res.norm() / scale);
        }
    }
    worst
}

/// Residual of {π0² − m² − π3² − k⊥² + iν[∂z f0 − ∂0 f1]} w = 0 on (z, x0)
/// samples, π0 = i∂0 − f0, π3 = i∂z − f1.
pub fn residual_w_equation(
    f0: &dyn Longitudinal,
    f1: &dyn Longitudinal,
    nu: i8,
    m: f64,
    kperp2: f64,
    w: &dyn Fn(f64, f64) -> Complex64,
    grid: &[(f64, f64)],
) -> f64 {
    let i = Complex64::i();
    let h = 1e-3;
    let mut worst = 0.0f64;
    for &(z, x0) in grid {
        let wv = w(z, x0);
        let w0 = fd1(&|t| w(z, t), x0, h);
        let wz = fd1(&|t| w(t, x0), z, h);
        let w00 = fd2(&|t| w(z, t), x0, h);
        let wzz = fd2(&|t| w(t, x0), z, h);
        let re = |f: &dyn Longitudinal, dz: bool| {
            let g = |t: f64| Complex64::new(if dz { f.value(t, x0) } else { f.value(z, t) }, 0.0);
            fd1(&g, if dz { z } else { x0 }, h).re
        };
        let (a0, a1) = (f0.value(z, x0), f1.value(z, x0));
        let (d0a0, dza0) = (re(f0, false), re(f0, true));
        let (d0a1, dza1) = (re(f1, false), re(f1, true));
        // π0² w = −w00 − i(∂0 f0) w − 2i f0 w0 + f0² w
        let terms = [
            -w00,
            -i * d0a0 * wv,
            -2.0 * i * a0 * w0,
            a0 * a0 * wv,
            -(m * m + kperp2) * wv,
            wzz,
            i * dza1 * wv,
            2.0 * i * a1 * wz,
            -a1 * a1 * wv,
            i * nu as f64 * (dza0 - d0a1) * wv,
        ];
        let res: Complex64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() + FLOOR;
        worst = worst.max(res.norm() / scale);
    }
    worst
}

/// Residual of 4ξ̄²w'' + 4ξ̄w' + [(λ − f)² + ξ̄(m² + k⊥² + 2iν f′)] w = 0.
#[allow(clippy::too_many_arguments)]
pub fn residual_boost_reduced(
    f: &dyn Fn(f64) -> (f64, f64),
    lambda_ev: f64,
    nu: i8,
    m: f64,
    kperp2: f64,
    w: &dyn Fn(f64) -> Complex64,
    grid: &[f64],
) -> f64 {
    let i = Complex64::i();
    let c = m * m + kperp2;
    let mut worst = 0.0f64;
    for &xi in grid {
        let h = 1e-3 * xi.abs().max(1e-3);
        let wv = w(xi);
        let (fv, fp) = f(xi);
        let terms = [
            4.0 * xi * xi * fd2(&w, xi, h),
            4.0 * xi * fd1(&w, xi, h),
            (lambda_ev - fv).powi(2) * wv,
            xi * (c + 2.0 * i * nu as f64 * fp) * wv,
        ];
        let res: Complex64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() + FLOOR;
        worst = worst.max(res.norm() / scale);
    }
    worst
}

/// Residual of the eigen-equation i(z∂0 + x0∂z) w = λ w.
pub fn residual_boost_eigen(lambda_ev: f64, w: &dyn Fn(f64, f64) -> Complex64, grid: &[(f64, f64)]) -> f64 {
    let i = Complex64::i();
    let h = 1e-4;
    let mut worst = 0.0f64;
    for &(z, x0) in grid {
        let wv = w(z, x0);
        let a = i * z * fd1(&|t| w(z, t), x0, h);
        let b = i * x0 * fd1(&|t| w(t, x0), z, h);
        let res = (a + b - lambda_ev * wv).norm();
        worst = worst.max(res / (a.norm() + b.norm() + (lambda_ev * wv).norm() + FLOOR));
    }
    worst
}

/// Residual of {2im∂0 − k⊥² − (k3 − f(x0))²} e^{−iS(x0)} = 0.
pub fn residual_time_phase(
    f: &dyn Fn(f64) -> f64,
    k3: f64,
    kperp2: f64,
    m: f64,
    s: &dyn Fn(f64) -> f64,
    grid: &[f64],
) -> f64 {
    let i = Complex64::i();
    let w = |t: f64| Complex64::from_polar(1.0, -s(t));
    let mut worst = 0.0f64;
    for &x0 in grid {
        let h = 1e-3;
        let wv = w(x0);
        let terms = [2.0 * i * m * fd1(&w, x0, h), -kperp2 * wv, -(k3 - f(x0)).powi(2) * wv];
        let res: Complex64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() + FLOOR;
        worst = worst.max(res.norm() / scale);
    }
    worst
}

/// Check of the gauge reduction: for any smooth ψ(z, x0), the (z, x0)
/// Schrödinger operator applied to w = e^{−iφ}ψ must equal
/// e^{−iφ}·2m(i∂0ψ − Hψ) with H = −∂z²/2m + V.
pub fn residual_gauge(
    red: &GaugeReduction,
    psi: &dyn Fn(f64, f64) -> Complex64,
    grid: &[(f64, f64)],
) -> Result<f64> {
    let i = Complex64::i();
    let h = 2e-3;
    let m = red.m;
    let phase = |z: f64, x0: f64| red.phase(z, x0).unwrap_or(f64::NAN);
    let w = |z: f64, x0: f64| Complex64::from_polar(1.0, -phase(z, x0)) * psi(z, x0);
    let mut worst = 0.0f64;
    for &(z, x0) in grid {
        let wv = w(z, x0);
        let w0 = fd1(&|t| w(z, t), x0, h);
        let wz = fd1(&|t| w(t, x0), z, h);
        let wzz = fd2(&|t| w(t, x0), z, h);
        let (a0, a1) = (red.f0.value(z, x0), red.f1.value(z, x0));
        let dza1 = fd1(&|t| Complex64::new(red.f1.value(t, x0), 0.0), z, h).re;
        // 2m(i∂0 − f0)w − k⊥²w − (i∂z − f1)²w
        let lhs_terms = [
            2.0 * m * i * w0,
            -2.0 * m * a0 * wv,
            -red.kperp2 * wv,
            wzz,
            i * dza1 * wv,
            2.0 * i * a1 * wz,
            -a1 * a1 * wv,
        ];
        let lhs: Complex64 = lhs_terms.iter().sum();
        let pv = psi(z, x0);
        let p0 = fd1(&|t| psi(z, t), x0, h);
        let pzz = fd2(&|t| psi(t, x0), z, h);
        let v = red
            .potential(z, x0)
            .map_err(|e| OracleError::BadProblem(e.to_string()))?;
        let rhs_terms = [2.0 * m * i * p0, pzz, -2.0 * m * v * pv];
        let rhs: Complex64 = rhs_terms.iter().sum::<Complex64>() * Complex64::from_polar(1.0, -phase(z, x0));
        let scale: f64 = lhs_terms.iter().chain(rhs_terms.iter()).map(|t| t.norm()).sum::<f64>() + FLOOR;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// r dr
    RDr,
    /// dr
    Dr,
}

/// ∫₀^∞ |v|² weight, on dyadic shells around `scale` until the shells stop
/// contributing at the 1e-13 level.
pub fn normalize(solution: &dyn Fn(f64) -> Complex64, weight: Weight, scale: f64) -> Result<f64> {
    let integrand = |r: f64| {
        let v = solution(r).norm_sqr();
        match weight {
            Weight::RDr => v * r,
            Weight::Dr => v,
        }
    };
    let shell = |a: f64, b: f64| -> Result<f64> {
        // one G7K15 panel for the magnitude, then a relative tolerance
        let rough = integrate(integrand, a, b, f64::INFINITY)?;
        Ok(integrate(integrand, a, b, (1e-13 * rough.abs()).max(1e-300))?)
    };
    let mut total = shell(scale, 2.0 * scale)?;
    let shells = |inward: bool, total: &mut f64| -> Result<()> {
        let mut quiet = 0;
        for k in 1..80 {
            let f = 2f64.powi(k);
            let piece = if inward {
                shell(scale / f, 2.0 * scale / f)?
            } else {
                shell(2.0 * scale * f / 2.0, 2.0 * scale * f)?
            };
            if !piece.is_finite() {
                return Err(OracleError::Divergent(if inward { "origin" } else { "infinity" }));
            }
            *total += piece;
            if piece <= 1e-13 * *total {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(());
                }
            } else {
                quiet = 0;
            }
        }
        Err(OracleError::Divergent(if inward { "origin" } else { "infinity" }))
    };
    shells(true, &mut total)?;
    shells(false, &mut total)?;
    Ok(total)
}
