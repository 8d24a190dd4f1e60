//! Assembly of closed-form solutions: phases, Laguerre radial factors,
//! Dirac spinors for the three Case I subcases, longitudinal factors
//! (lightfront and boost-invariant) and the Schrödinger time phase and
//! gauge reduction.
//!
//! Square roots of the spinor constants are taken in complex arithmetic;
//! whether the assembled spinor solves its radial system is checked by the
//! residuals in `oracle`, not assumed.

use num_complex::Complex64;
use thiserror::Error;

use crate::fields::{FieldError, FieldParams, Pulse};
use crate::numerics::{integrate, integrate_complex, NumericsError, QUAD_TOL};
use crate::special_fn::{laguerre_i, laguerre_i_derivative, laguerre_poly, SpecialFnError};
use crate::spectra::{
    self, indices_case12, indices_case3, indices_case_ii, schrodinger_a_indices, schrodinger_b_indices,
    LaguerreIndices, QuantumNumbers, SpectraError, Variant,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("discriminant {0} under a square root is negative")]
    DiscriminantNegative(f64),
    #[error("scale is not real and positive: {0}")]
    ScaleImaginary(String),
    #[error("k0 = {k0} is below the mass m = {m}")]
    SubluminalError { k0: f64, m: f64 },
    #[error("lambda - f(xi) vanishes near xi = {0}")]
    TurningPoint(f64),
    #[error("point lies on the light cone x0 = ±z")]
    LightconeSingularity,
    #[error("branch point: radicand vanishes")]
    BranchPoint,
    #[error("alpha = 0 makes the boost-invariant indices diverge")]
    DegenerateField,
    #[error("r = {0} must be positive")]
    Domain(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Spectra(SpectraError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<SpectraError> for WaveError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::DiscriminantNegative(d) | SpectraError::SubcriticalCharge(d) => {
                WaveError::DiscriminantNegative(d)
            }
            SpectraError::NoBoundState(s) => WaveError::ScaleImaginary(s),
            other => WaveError::Spectra(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, WaveError>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn csqrt(x: f64) -> Complex64 {
    c(x).sqrt()
}

fn sign0(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Q = (l − l0)φ − k0 x0 − k3 z. Pass k0 = 0 or k3 = 0 to drop a term when
/// the corresponding separation does not apply.
pub fn phase_q(l: i64, l0: i64, k0: f64, k3: f64, phi: f64, z: f64, x0: f64) -> f64 {
    (l - l0) as f64 * phi - k0 * x0 - k3 * z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XOfR {
    /// x = 2rE
    TwoRE,
    /// x = r²E0
    R2E0,
    /// x = 2r√E
    TwoRSqrtE,
    /// x = √b r²
    SqrtBR2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIndexSet {
    pub s: u8,
    pub p: f64,
    pub n: f64,
    pub x_scale: f64,
    pub x_of_r: XOfR,
}

impl RadialIndexSet {
    pub fn x(&self, r: f64) -> f64 {
        match self.x_of_r {
            XOfR::TwoRE | XOfR::TwoRSqrtE => 2.0 * r * self.x_scale,
            XOfR::R2E0 | XOfR::SqrtBR2 => r * r * self.x_scale,
        }
    }

    pub fn dx_dr(&self, r: f64) -> f64 {
        match self.x_of_r {
            XOfR::TwoRE | XOfR::TwoRSqrtE => 2.0 * self.x_scale,
            XOfR::R2E0 | XOfR::SqrtBR2 => 2.0 * r * self.x_scale,
        }
    }
}

/// Which radial equation the indices belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialCase {
    Case1,
    Case2,
    Case3(Variant),
    /// the eigenparameter passed is k⊥², not k0
    CaseII,
    SchrodingerA,
    SchrodingerB,
}

fn snap(ix: LaguerreIndices) -> LaguerreIndices {
    // quantized indices carry roundoff; an almost-integer n would sit next
    // to the pole of Γ(1+n) and leak into the normalization
    let r = ix.n.round() + 0.0;
    if (ix.n - r).abs() < 1e-9 * ix.n.abs().max(1.0) {
        LaguerreIndices { s: ix.s, p: ix.p + (r - ix.n), n: r }
    } else {
        ix
    }
}

/// Laguerre indices (p_s, n_s), scale and x(r) mapping at eigenparameter `k`.
pub fn radial_indices(
    case: RadialCase,
    s: u8,
    qn: &QuantumNumbers,
    p: &FieldParams,
    k: f64,
) -> Result<RadialIndexSet> {
    if s > 2 {
        return Err(WaveError::Invalid(format!("s = {s}")));
    }
    let (ix, scale, map) = match case {
        RadialCase::Case1 => {
            let (ix, e) = indices_case12(1, s, qn, p, k)?;
            (ix, e, XOfR::TwoRE)
        }
        RadialCase::Case2 => {
            let (ix, e) = indices_case12(2, s, qn, p, k)?;
            (ix, e, XOfR::TwoRE)
        }
        RadialCase::Case3(v) => {
            let (ix, e) = indices_case3(v, s, qn, p, k)?;
            (ix, e, if v == Variant::A { XOfR::TwoRE } else { XOfR::R2E0 })
        }
        RadialCase::CaseII => {
            let (ix, e) = indices_case_ii(s, qn.l as f64 + p.mu, p.gamma, k)?;
            (ix, e, XOfR::TwoRE)
        }
        RadialCase::SchrodingerA => {
            let (ix, e) = schrodinger_a_indices(qn, p, k)?;
            (ix, e, XOfR::TwoRSqrtE)
        }
        RadialCase::SchrodingerB => {
            let (ix, e) = schrodinger_b_indices(qn, p, k)?;
            (ix, e, XOfR::SqrtBR2)
        }
    };
    let ix = snap(ix);
    Ok(RadialIndexSet { s, p: ix.p, n: ix.n, x_scale: scale, x_of_r: map })
}

/// v_s(r) = A·I_{p,n}(x) + B·I_{n,p}(x).
pub fn radial_v(idx: &RadialIndexSet, a: Complex64, b: Complex64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(WaveError::Domain(r));
    }
    let x = idx.x(r);
    let mut v = Complex64::new(0.0, 0.0);
    if a != Complex64::new(0.0, 0.0) {
        v += a * laguerre_i(idx.p, idx.n, x)?;
    }
    if b != Complex64::new(0.0, 0.0) {
        v += b * laguerre_i(idx.n, idx.p, x)?;
    }
    Ok(v)
}

/// dv_s/dr.
pub fn radial_v_derivative(idx: &RadialIndexSet, a: Complex64, b: Complex64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(WaveError::Domain(r));
    }
    let x = idx.x(r);
    let mut v = Complex64::new(0.0, 0.0);
    if a != Complex64::new(0.0, 0.0) {
        v += a * laguerre_i_derivative(idx.p, idx.n, x)?;
    }
    if b != Complex64::new(0.0, 0.0) {
        v += b * laguerre_i_derivative(idx.n, idx.p, x)?;
    }
    Ok(v * idx.dx_dr(r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub x0: f64,
}

impl Position {
    pub fn radial(r: f64) -> Self {
        Position { r, phi: 0.0, z: 0.0, x0: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorSample {
    pub psi: [Complex64; 4],
    pub position: Position,
}

/// Eigen-decomposition constants of the spin integral (m ρ3Σ3 − k3 ρ1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorCoefficients {
    pub a: f64,
    pub b: f64,
    pub zeta: f64,
    pub lambda1: f64,
}

pub fn spinor_coefficients(m: f64, k3: f64, zeta: i8) -> SpinorCoefficients {
    let l1 = (m * m + k3 * k3).sqrt();
    let z = zeta as f64;
    SpinorCoefficients {
        a: l1 + m + k3 + z * (l1 + m - k3),
        b: l1 + m - k3 - z * (l1 + m + k3),
        zeta: z,
        lambda1: l1,
    }
}

fn check_zeta(zeta: i8) -> Result<f64> {
    match zeta {
        1 | -1 => Ok(zeta as f64),
        _ => Err(WaveError::Invalid(format!("zeta = {zeta}"))),
    }
}

type PairOut = ([Complex64; 2], [Complex64; 2]);

/// Radial amplitudes (φ1, φ2) solving the subcase-1 first-order system at k0.
/// Also returns (φ1′, φ2′).
pub fn case1_pair(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<PairOut> {
    let big_m = (p.mass * p.mass + qn.k3 * qn.k3 + p.gamma * p.gamma).sqrt();
    with_limit(|k| case1_pair_at(p, qn, k, a, b, r), k0, big_m - k0.abs())
}

/// Radial amplitudes (φ̄1, φ̄2) of the subcase-2 system and their derivatives.
pub fn case2_pair(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<PairOut> {
    let big_m = (p.mass * p.mass + qn.k3 * qn.k3 + p.gamma * p.gamma).sqrt();
    with_limit(|k| case2_pair_at(p, qn, k, a, b, r), k0, (k0 - p.mass).min(big_m - k0))
}

/// On some eigenvalues an index n_s lands on a negative integer, killing
/// I_{p,n}, while the coefficients of the other component vanish as well:
/// the pair is then ∝ √(k − k0). Return the finite limit of pair/√|k − k0|,
/// extrapolated from three offsets small against `reach`, the distance to
/// the nearest branch point of the spectrum.
fn with_limit<F: Fn(f64) -> Result<(PairOut, bool)>>(f: F, k0: f64, reach: f64) -> Result<PairOut> {
    let (out, degenerate) = f(k0)?;
    if !degenerate {
        return Ok(out);
    }
    let d = 1e-3 * reach.abs().min(1.0).max(1e-12);
    let mut last = None;
    for sgn in [1.0, -1.0] {
        let at = |h: f64| f(k0 + sgn * h).map(|(o, _)| o);
        let pts: Vec<Result<PairOut>> = [d, 2.0 * d, 4.0 * d].iter().map(|&h| at(h)).collect();
        if let Some(Err(e)) = pts.iter().find(|p| p.is_err()) {
            last = Some(e.clone());
            continue;
        }
        let pts: Vec<PairOut> = pts.into_iter().map(|p| p.unwrap()).collect();
        // F(h) = F + a h + b h²
        let lim = |get: &dyn Fn(&PairOut) -> Complex64| {
            let g = |i: usize, h: f64| get(&pts[i]) / h.sqrt();
            (8.0 * g(0, d) - 6.0 * g(1, 2.0 * d) + g(2, 4.0 * d)) / 3.0
        };
        let res = (
            [lim(&|o| o.0[0]), lim(&|o| o.0[1])],
            [lim(&|o| o.1[0]), lim(&|o| o.1[1])],
        );
        if res.0.iter().chain(res.1.iter()).all(|v| v.is_finite()) {
            return Ok(res);
        }
    }
    Err(last.unwrap_or(WaveError::Invalid("degenerate pair has no finite limit".into())))
}

fn case1_pair_at(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<(PairOut, bool)> {
    let zeta = check_zeta(qn.zeta)?;
    let lh = qn.l as f64 + p.mu - 0.5;
    let disc = lh * lh - p.alpha * p.alpha;
    if disc < 0.0 {
        return Err(WaveError::DiscriminantNegative(disc));
    }
    let nu1 = disc.sqrt();
    let l1 = (p.mass * p.mass + qn.k3 * qn.k3).sqrt();
    let (qp, qm) = (lh + nu1, lh - nu1);
    let om = |z: f64| p.gamma * p.alpha - k0 * lh + z * l1 * nu1;
    let (sa, sl) = (sign0(p.alpha), sign0(lh));
    let c11 = csqrt(qm * om(zeta));
    let c12 = -sa * csqrt(qp * om(-zeta));
    let c21 = sa * sl * csqrt(qp * om(zeta));
    let c22 = -sl * csqrt(qm * om(-zeta));
    combine_pair(RadialCase::Case1, p, qn, k0, a, b, r, [c11, c12, c21, c22])
}

fn case2_pair_at(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<(PairOut, bool)> {
    let zeta = check_zeta(qn.zeta)?;
    if k0 < p.mass {
        return Err(WaveError::SubluminalError { k0, m: p.mass });
    }
    let lh = qn.l as f64 + p.mu - 0.5;
    let l2 = (k0 * k0 - p.mass * p.mass).sqrt();
    let sq = (lh * lh + p.alpha * p.alpha).sqrt();
    let (qp, qm) = (sq + lh, sq - lh);
    let om = |z: f64| l2 * sq + z * (qn.k3 * lh - p.gamma * p.alpha);
    let sa = sign0(p.alpha);
    let c11 = csqrt(qm * om(zeta));
    let c12 = sa * zeta * csqrt(qp * om(-zeta));
    let c21 = sa * csqrt(qp * om(zeta));
    let c22 = -zeta * csqrt(qm * om(-zeta));
    combine_pair(RadialCase::Case2, p, qn, k0, a, b, r, [c11, c12, c21, c22])
}

#[allow(clippy::too_many_arguments)]
fn combine_pair(
    case: RadialCase,
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
    cs: [Complex64; 4],
) -> Result<(PairOut, bool)> {
    let i1 = radial_indices(case, 1, qn, p, k0)?;
    let i2 = radial_indices(case, 2, qn, p, k0)?;
    let (v1, v2) = (radial_v(&i1, a, b, r)?, radial_v(&i2, a, b, r)?);
    let (d1, d2) = (radial_v_derivative(&i1, a, b, r)?, radial_v_derivative(&i2, a, b, r)?);
    let dead = |n: f64| n < 0.0 && n == n.round();
    let cmax = cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let small = |x: Complex64, y: Complex64| x.norm().max(y.norm()) <= 1e-6 * cmax;
    let degenerate = b == Complex64::new(0.0, 0.0)
        && ((dead(i1.n) && small(cs[1], cs[3])) || (dead(i2.n) && small(cs[0], cs[2])));
    Ok((
        (
            [cs[0] * v1 + cs[1] * v2, cs[2] * v1 + cs[3] * v2],
            [cs[0] * d1 + cs[1] * d2, cs[2] * d1 + cs[3] * d2],
        ),
        degenerate,
    ))
}

/// Apply the angular/plane-wave factors: e^{iQ}(e^{−iφ}ψ1, iψ2, e^{−iφ}ψ3, iψ4).
pub fn dirac_phases(psi: [Complex64; 4], l: i64, l0: i64, k0: f64, k3: f64, pos: Position) -> [Complex64; 4] {
    let q = Complex64::from_polar(1.0, phase_q(l, l0, k0, k3, pos.phi, pos.z, pos.x0));
    let e = Complex64::from_polar(1.0, -pos.phi);
    let i = Complex64::i();
    [q * e * psi[0], q * i * psi[1], q * e * psi[2], q * i * psi[3]]
}

/// Radial components (ψ1..ψ4) of subcase 1 before the (b7)-type phases.
pub fn case1_components(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<[Complex64; 4]> {
    let ([f1, f2], _) = case1_pair(p, qn, k0, a, b, r)?;
    let co = spinor_coefficients(p.mass, qn.k3, qn.zeta);
    Ok([co.a * f1, -co.b * f2, co.b * f1, -co.a * f2])
}

/// Radial components of subcase 2.
pub fn case2_components(
    p: &FieldParams,
    qn: &QuantumNumbers,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<[Complex64; 4]> {
    let ([f1, f2], _) = case2_pair(p, qn, k0, a, b, r)?;
    let (up, lo) = ((k0 + p.mass).sqrt(), qn.zeta as f64 * (k0 - p.mass).sqrt());
    Ok([up * f1, up * f2, lo * f1, lo * f2])
}

#[allow(clippy::too_many_arguments)]
pub fn spinor_case1(
    p: &FieldParams,
    qn: &QuantumNumbers,
    l0: i64,
    k0: f64,
    a: Complex64,
    b: Complex64,
    pos: Position,
) -> Result<SpinorSample> {
    let psi = case1_components(p, qn, k0, a, b, pos.r)?;
    Ok(SpinorSample { psi: dirac_phases(psi, qn.l, l0, k0, qn.k3, pos), position: pos })
}

#[allow(clippy::too_many_arguments)]
pub fn spinor_case2(
    p: &FieldParams,
    qn: &QuantumNumbers,
    l0: i64,
    k0: f64,
    a: Complex64,
    b: Complex64,
    pos: Position,
) -> Result<SpinorSample> {
    let psi = case2_components(p, qn, k0, a, b, pos.r)?;
    Ok(SpinorSample { psi: dirac_phases(psi, qn.l, l0, k0, qn.k3, pos), position: pos })
}

/// Radial bispinor of the f0 = ε f1 subcase built from V = (v1, v2):
/// upper (κ+m)V − ε Q̂σ3V, lower ε(κ−m)σ3V − Q̂V.
/// `v` and `dv` are (v1, v2) and their r-derivatives.
pub fn bispinor_from_v(
    p: &FieldParams,
    qn: &QuantumNumbers,
    f2: f64,
    k0: f64,
    r: f64,
    v: [Complex64; 2],
    dv: [Complex64; 2],
) -> [Complex64; 4] {
    let eps = p.epsilon;
    let kap = k0 - eps * qn.k3;
    let m = p.mass;
    let g = (f2 - (qn.l as f64 + p.mu) + 0.5) / r;
    let q1 = g * v[1] - (dv[1] + v[1] / (2.0 * r));
    let q2 = g * v[0] + dv[0] + v[0] / (2.0 * r);
    [
        (kap + m) * v[0] + eps * q1,
        (kap + m) * v[1] - eps * q2,
        eps * (kap - m) * v[0] - q1,
        -eps * (kap - m) * v[1] - q2,
    ]
}

/// Bispinor for the f0 = ε f1 subcase. `s` selects V = (v1, 0) (s = 1) or
/// V = (0, v2) (s = 2); each family solves the Dirac system on its own.
#[allow(clippy::too_many_arguments)]
pub fn bispinor_case3(
    p: &FieldParams,
    qn: &QuantumNumbers,
    variant: Variant,
    s: u8,
    l0: i64,
    k0: f64,
    a: Complex64,
    b: Complex64,
    pos: Position,
) -> Result<SpinorSample> {
    let comps = case3_components(p, qn, variant, s, k0, a, b, pos.r)?;
    Ok(SpinorSample { psi: dirac_phases(comps, qn.l, l0, k0, qn.k3, pos), position: pos })
}

#[allow(clippy::too_many_arguments)]
pub fn case3_components(
    p: &FieldParams,
    qn: &QuantumNumbers,
    variant: Variant,
    s: u8,
    k0: f64,
    a: Complex64,
    b: Complex64,
    r: f64,
) -> Result<[Complex64; 4]> {
    if s != 1 && s != 2 {
        return Err(WaveError::Invalid(format!("bispinor needs s = 1 or 2, got {s}")));
    }
    let idx = radial_indices(RadialCase::Case3(variant), s, qn, p, k0)?;
    let (vv, dd) = (radial_v(&idx, a, b, r)?, radial_v_derivative(&idx, a, b, r)?);
    let zero = Complex64::new(0.0, 0.0);
    let (v, dv) = if s == 1 { ([vv, zero], [dd, zero]) } else { ([zero, vv], [zero, dd]) };
    let f2 = match variant {
        Variant::A => p.gamma * r,
        Variant::B => p.gamma * r * r,
    };
    Ok(bispinor_from_v(p, qn, f2, k0, r, v, dv))
}

/// Scalar (Klein-Gordon or Schrödinger) solution e^{iQ} v(r).
pub fn scalar_solution(
    idx: &RadialIndexSet,
    a: Complex64,
    b: Complex64,
    l: i64,
    l0: i64,
    k0: f64,
    k3: f64,
    pos: Position,
) -> Result<Complex64> {
    let v = radial_v(idx, a, b, pos.r)?;
    Ok(v * Complex64::from_polar(1.0, phase_q(l, l0, k0, k3, pos.phi, pos.z, pos.x0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchrodingerCase {
    A,
    B,
}

/// Bound-state radial function in Laguerre-polynomial form (A = 1).
pub fn psi_schrodinger(case: SchrodingerCase, p: &FieldParams, qn: &QuantumNumbers, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(WaveError::Domain(r));
    }
    let n = qn.n;
    match case {
        SchrodingerCase::A => {
            let res = spectra::energy_schrodinger_a(qn, p)?;
            let l = qn.l as f64 + p.mu;
            let sa = (l * l + p.beta * p.beta + 2.0 * p.mass * p.delta + 4.0 * p.mass * p.lambda * qn.k3).sqrt();
            if !(res.scale > 0.0) {
                return Err(WaveError::ScaleImaginary("E = 0".into()));
            }
            let x = 2.0 * r * res.scale;
            Ok((-x / 2.0).exp() * x.powf(sa) * laguerre_poly(n, 2.0 * sa, x))
        }
        SchrodingerCase::B => {
            let res = spectra::energy_schrodinger_b(qn, p)?;
            let l = qn.l as f64 + p.mu;
            let sa = (l * l + 2.0 * p.beta * p.mass + 4.0 * p.mass * p.lambda * qn.k3).sqrt();
            let x = res.scale * r * r;
            Ok((-x / 2.0).exp() * x.powf(sa / 2.0) * laguerre_poly(n, sa, x))
        }
    }
}

/// Quantum numbers of a lightfront factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightfrontState {
    /// eigenvalue of i(∂0 + ∂z)
    pub lambda_ev: f64,
    pub nu: i8,
    pub m: f64,
    pub kperp2: f64,
}

/// w_ν(z, x0) = (λ − f(ξ))^{−(1+ν)/2} e^{iS} for f0 = f1 = f(ξ)/2, ξ = x0 − z,
/// with the phase integral taken from ξ = 0.
pub fn lightfront_w(state: &LightfrontState, f: &Pulse, z: f64, x0: f64) -> Result<Complex64> {
    if !(-1..=1).contains(&state.nu) {
        return Err(WaveError::Invalid(format!("nu = {}", state.nu)));
    }
    let lam = state.lambda_ev;
    let xi = x0 - z;
    let floor = 1e-8 * (1.0 + lam.abs());
    // reject paths through a turning point before integrating
    let steps = 256;
    for k in 0..=steps {
        let t = xi * k as f64 / steps as f64;
        let d = lam - f.value(t)?;
        if d.abs() < floor {
            return Err(WaveError::TurningPoint(t));
        }
    }
    let d_end = lam - f.value(xi)?;
    let integral = integrate(
        |t| match f.value(t) {
            Ok(v) => 1.0 / (lam - v),
            Err(_) => f64::NAN,
        },
        0.0,
        xi,
        QUAD_TOL,
    )
    .map_err(|e| match e {
        NumericsError::NonFinite(t) => WaveError::TurningPoint(t),
        other => other.into(),
    })?;
    let cc = state.m * state.m + state.kperp2;
    let s = -0.5 * (lam * (x0 + z) + cc * integral);
    let pre = c(d_end).powf(-(1.0 + state.nu as f64) / 2.0);
    Ok(pre * Complex64::from_polar(1.0, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoostVariant {
    /// f(ξ̄) = α ξ̄
    A,
    /// f(ξ̄) = α √|ξ̄|
    B,
}

/// Complex (p, n, x) of the boost-invariant solution at ξ̄.
pub fn boost_indices(
    variant: BoostVariant,
    nu: i8,
    lambda_ev: f64,
    alpha: f64,
    m: f64,
    kperp2: f64,
    xib: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    let cc = m * m + kperp2;
    let i = Complex64::i();
    let nu = nu as f64;
    match variant {
        BoostVariant::A => {
            if alpha == 0.0 {
                return Err(WaveError::DegenerateField);
            }
            let x = -i * alpha * xib;
            let p = (i * cc - 2.0 * alpha * (1.0 + nu)) / (4.0 * alpha);
            Ok((p, p - i * lambda_ev, x))
        }
        BoostVariant::B => {
            let eps = sign0(xib);
            let rad = alpha * alpha * xib.abs() + xib * cc;
            let k2 = alpha * alpha + eps * cc;
            if rad == 0.0 || k2 == 0.0 {
                return Err(WaveError::BranchPoint);
            }
            let x = 2.0 * i * csqrt(rad);
            let p = alpha * (nu + 2.0 * i * lambda_ev) / (2.0 * csqrt(k2)) - 0.5 + i * lambda_ev;
            Ok((p, p - 2.0 * i * lambda_ev, x))
        }
    }
}

/// w_ν(z, x0) = ((x0 − z)/(x0 + z))^{iλ/2} [A I_{p,n}(x) + B I_{n,p}(x)].
#[allow(clippy::too_many_arguments)]
pub fn boost_w(
    nu: i8,
    lambda_ev: f64,
    variant: BoostVariant,
    alpha: f64,
    m: f64,
    kperp2: f64,
    a: Complex64,
    b: Complex64,
    z: f64,
    x0: f64,
) -> Result<Complex64> {
    if x0 - z == 0.0 || x0 + z == 0.0 {
        return Err(WaveError::LightconeSingularity);
    }
    let xib = x0 * x0 - z * z;
    let (p, n, x) = boost_indices(variant, nu, lambda_ev, alpha, m, kperp2, xib)?;
    let pre = c((x0 - z) / (x0 + z)).powc(Complex64::new(0.0, lambda_ev / 2.0));
    let mut w = Complex64::new(0.0, 0.0);
    if a != Complex64::new(0.0, 0.0) {
        w += a * laguerre_i(p, n, x)?;
    }
    if b != Complex64::new(0.0, 0.0) {
        w += b * laguerre_i(n, p, x)?;
    }
    Ok(pre * w)
}

/// S(x0) = k⊥² x0/(2m) + ∫₀^{x0} (k3 − f)²/(2m); the factor is e^{−iS}.
pub fn schrodinger_time_phase(f: &Pulse, k3: f64, kperp2: f64, m: f64, x0: f64) -> Result<f64> {
    let integral = integrate(
        |t| match f.value(t) {
            Ok(v) => (k3 - v).powi(2),
            Err(_) => f64::NAN,
        },
        0.0,
        x0,
        QUAD_TOL,
    )?;
    Ok(kperp2 * x0 / (2.0 * m) + integral / (2.0 * m))
}

/// A longitudinal potential f(z, x0) with its time derivative.
pub trait Longitudinal: Sync {
    fn value(&self, z: f64, x0: f64) -> f64;

    fn d_time(&self, z: f64, x0: f64) -> f64 {
        let h = 1e-4 * (1.0 + x0.abs());
        (self.value(z, x0 - 2.0 * h) - 8.0 * self.value(z, x0 - h) + 8.0 * self.value(z, x0 + h)
            - self.value(z, x0 + 2.0 * h))
            / (12.0 * h)
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> Longitudinal for F {
    fn value(&self, z: f64, x0: f64) -> f64 {
        self(z, x0)
    }
}

/// An axial profile evaluated in a fixed slot.
pub struct SlotProfile<'a>(pub &'a crate::fields::AxialProfile, pub crate::fields::Slot);

impl Longitudinal for SlotProfile<'_> {
    fn value(&self, z: f64, x0: f64) -> f64 {
        self.0.value(self.1, z, x0).unwrap_or(f64::NAN)
    }

    fn d_time(&self, z: f64, x0: f64) -> f64 {
        self.0.eval(self.1, z, x0).map(|v| v.2).unwrap_or(f64::NAN)
    }
}

/// Effective 1-D potential and gauge phase that map the (z, x0)
/// Schrödinger equation onto i∂0ψ = (−∂z²/2m + V)ψ via w = e^{−iφ}ψ.
/// Reference point z = 0 for both integrals.
pub struct GaugeReduction<'a> {
    pub f0: &'a dyn Longitudinal,
    pub f1: &'a dyn Longitudinal,
    pub kperp2: f64,
    pub m: f64,
}

pub fn gauge_reduce<'a>(f0: &'a dyn Longitudinal, f1: &'a dyn Longitudinal, kperp2: f64, m: f64) -> GaugeReduction<'a> {
    GaugeReduction { f0, f1, kperp2, m }
}

impl GaugeReduction<'_> {
    pub fn potential(&self, z: f64, x0: f64) -> Result<f64> {
        let i = integrate(|t| self.f1.d_time(t, x0), 0.0, z, QUAD_TOL)?;
        Ok(self.f0.value(z, x0) - i)
    }

    pub fn phase(&self, z: f64, x0: f64) -> Result<f64> {
        let i = integrate(|t| self.f1.value(t, x0), 0.0, z, QUAD_TOL)?;
        Ok(self.kperp2 * x0 / (2.0 * self.m) + i)
    }
}

/// ∫ of a complex sampler, exposed for phase bookkeeping in callers.
pub fn phase_integral<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Result<Complex64> {
    Ok(integrate_complex(f, a, b, QUAD_TOL)?)
}
