//! Bound-state energies k0 (and the transverse quantum k⊥² of the
//! longitudinal case) from the closed-form quantization conditions, and
//! numeric root finding for the subcase with f0 = ε f1.

use thiserror::Error;

use crate::fields::FieldParams;
pub use crate::fields::Equation;
use crate::numerics::bisect;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("discriminant (l+mu-tau)^2 - alpha^2 = {0} is negative (supercritical coupling)")]
    SubcriticalCharge(f64),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("a = {0} is negative")]
    NegativeA(f64),
    #[error("b = {0} must be positive")]
    NonpositiveB(f64),
    #[error("condition gamma*(l+mu-tau) >= 0 violated ({0})")]
    ConditionViolated(f64),
    #[error("the s=1 index shift n1 = n + l/|l| is undefined for l = 0")]
    UndefinedShift,
    #[error("no root of n_s(k0) = {target} found in [{lo}, {hi}]")]
    NoRootInBracket { target: i64, lo: f64, hi: f64 },
    #[error("discriminant {0} negative at candidate root")]
    DiscriminantNegative(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Labels of a stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNumbers {
    pub l: i64,
    pub n: u32,
    pub k3: f64,
    pub zeta: i8,
    pub nu: i8,
    pub equation: Equation,
}

impl QuantumNumbers {
    pub fn new(equation: Equation, l: i64, n: u32) -> Self {
        QuantumNumbers {
            l,
            n,
            k3: 0.0,
            zeta: 1,
            nu: 1,
            equation,
        }
    }

    pub fn with_k3(mut self, k3: f64) -> Self {
        self.k3 = k3;
        self
    }

    pub fn with_zeta(mut self, zeta: i8) -> Self {
        self.zeta = zeta;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreIndices {
    pub s: u8,
    pub p: f64,
    pub n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralFlag {
    /// square-root discriminant exactly zero
    BoundaryCase,
    /// binding term vanishes; k0 sits on the continuum edge
    ContinuumThreshold,
    /// Dirac only: one component's n_s is a negative integer and the
    /// coefficients of the other vanish for the requested ζ, so the spinor
    /// is identically zero. The level exists for the opposite ζ only.
    SpinForbidden,
}

/// `om(z)` weighs the surviving component: component 2 carries om(−ζ),
/// component 1 carries om(ζ).
fn spin_forbidden(indices: &[LaguerreIndices], zeta: f64, om: impl Fn(f64) -> f64) -> bool {
    let dead = |s: u8| {
        indices
            .iter()
            .any(|ix| ix.s == s && ix.n < -0.5 && (ix.n - ix.n.round()).abs() < 1e-9)
    };
    let scale = om(1.0).abs().max(om(-1.0).abs()).max(f64::MIN_POSITIVE);
    let gone = |z: f64| om(z).abs() <= 1e-9 * scale;
    (dead(1) && gone(-zeta)) || (dead(2) && gone(zeta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub k0: f64,
    /// E, E0, √E or √b depending on the case
    pub scale: f64,
    pub indices: Vec<LaguerreIndices>,
    pub tau: f64,
    pub flags: Vec<SpectralFlag>,
    /// the other admissible root of a sign-ambiguous formula
    pub negative_branch: Option<f64>,
}

/// Field variants of the f0 = ε f1 subcase: a) f2 = γr, b) f2 = γr².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    A,
    B,
}

fn big_l(qn: &QuantumNumbers, p: &FieldParams) -> f64 {
    qn.l as f64 + p.mu
}

fn mass_shell2(qn: &QuantumNumbers, p: &FieldParams) -> f64 {
    p.mass * p.mass + qn.k3 * qn.k3 + p.gamma * p.gamma
}

fn active_s(eq: Equation) -> &'static [u8] {
    match eq {
        Equation::Dirac => &[1, 2],
        _ => &[0],
    }
}

fn c_of_s(l: f64, s: u8) -> f64 {
    let s = s as f64;
    l - s * (3.0 - s) / 4.0
}

fn offsets(s: u8) -> (f64, f64) {
    let s = s as f64;
    ((2.0 - 3.0 * s) * (s - 1.0) / 4.0, (3.0 * s + 1.0) * (s - 2.0) / 4.0)
}

/// Indices (p_s, n_s) of subcases 1 and 2 at a given k0. `subcase` is 1 or 2.
pub(crate) fn indices_case12(
    subcase: u8,
    s: u8,
    qn: &QuantumNumbers,
    p: &FieldParams,
    k0: f64,
) -> Result<(LaguerreIndices, f64), SpectraError> {
    let c = c_of_s(big_l(qn, p), s);
    let (disc, b) = if subcase == 1 {
        (c * c - p.alpha * p.alpha, p.gamma * c - k0 * p.alpha)
    } else {
        (c * c + p.alpha * p.alpha, p.gamma * c + qn.k3 * p.alpha)
    };
    if disc < 0.0 {
        return Err(SpectraError::DiscriminantNegative(disc));
    }
    let e2 = mass_shell2(qn, p) - k0 * k0;
    if !(e2 > 0.0) {
        return Err(SpectraError::NoBoundState(format!("E^2 = {e2} is not positive")));
    }
    let e = e2.sqrt();
    let sq = disc.sqrt();
    let (op, on) = offsets(s);
    Ok((
        LaguerreIndices {
            s,
            p: b / e + op + sq,
            n: b / e + on - sq,
        },
        e,
    ))
}

/// Subcase 1: f0 = α/r, f1 = 0, f2 = γr.
pub fn energy_case1(qn: &QuantumNumbers, p: &FieldParams) -> Result<SpectralResult, SpectraError> {
    let tau = match qn.equation {
        Equation::KleinGordon => 0.0,
        Equation::Dirac => 0.5,
        Equation::Schrodinger => {
            return Err(SpectraError::Unsupported("subcase 1 covers Dirac and Klein-Gordon".into()))
        }
    };
    let lt = big_l(qn, p) - tau;
    let disc = lt * lt - p.alpha * p.alpha;
    if disc < 0.0 {
        return Err(SpectraError::SubcriticalCharge(disc));
    }
    let mut flags = Vec::new();
    if disc == 0.0 {
        flags.push(SpectralFlag::BoundaryCase);
    }
    let nn = qn.n as f64 + disc.sqrt() + if tau == 0.0 { 0.5 } else { 0.0 };
    let m2 = mass_shell2(qn, p);
    let (a, g) = (p.alpha, p.gamma);
    let den = nn * nn + a * a;
    if den == 0.0 {
        return Err(SpectraError::NoBoundState("N = alpha = 0".into()));
    }
    let inner = den * m2 - g * g * lt * lt;
    if inner < 0.0 {
        return Err(SpectraError::NoBoundState(format!("radicand {inner} negative")));
    }
    let roots = [
        (a * g * lt + nn * inner.sqrt()) / den,
        (a * g * lt - nn * inner.sqrt()) / den,
    ];
    // B/E = N > 0 needs B = γ(L−τ) − k0 α ≥ 0; squaring admits spurious roots
    let b_of = |k0: f64| g * lt - k0 * a;
    let tol = 1e-12 * (1.0 + (g * lt).abs() + a.abs() * m2.sqrt());
    let valid: Vec<f64> = roots.iter().copied().filter(|&k| b_of(k) >= -tol).collect();
    let Some(&k0) = valid.first() else {
        return Err(SpectraError::NoBoundState(
            "binding numerator gamma(l+mu-tau) - k0*alpha is negative".into(),
        ));
    };
    let negative_branch = valid.get(1).copied().filter(|k| *k != k0);
    if b_of(k0).abs() <= tol {
        flags.push(SpectralFlag::ContinuumThreshold);
        return Ok(SpectralResult {
            k0,
            scale: (m2 - k0 * k0).max(0.0).sqrt(),
            indices: vec![],
            tau,
            flags,
            negative_branch,
        });
    }
    let mut indices = Vec::new();
    let mut scale = 0.0;
    for &s in active_s(qn.equation) {
        let (ix, e) = indices_case12(1, s, qn, p, k0)?;
        indices.push(ix);
        scale = e;
    }
    if qn.equation == Equation::Dirac {
        let lh = big_l(qn, p) - 0.5;
        let nu1 = (lh * lh - a * a).max(0.0).sqrt();
        let l1 = (p.mass * p.mass + qn.k3 * qn.k3).sqrt();
        if spin_forbidden(&indices, qn.zeta as f64, |z| g * a - k0 * lh + z * l1 * nu1) {
            flags.push(SpectralFlag::SpinForbidden);
        }
    }
    Ok(SpectralResult {
        k0,
        scale,
        indices,
        tau,
        flags,
        negative_branch,
    })
}

/// Subcase 2: f0 = 0, f1 = α/r, f2 = γr. τ = 0 for Klein-Gordon, 1 for Dirac.
pub fn energy_case2(qn: &QuantumNumbers, p: &FieldParams, tau: f64) -> Result<SpectralResult, SpectraError> {
    if tau != 0.0 && tau != 1.0 {
        return Err(SpectraError::Unsupported(format!("tau = {tau} (expected 0 or 1)")));
    }
    let lh = big_l(qn, p) - tau / 2.0;
    let b = p.gamma * lh + qn.k3 * p.alpha;
    let nn = qn.n as f64 + (1.0 - tau) / 2.0 + (lh * lh + p.alpha * p.alpha).sqrt();
    let m2 = mass_shell2(qn, p);
    if b < 0.0 {
        return Err(SpectraError::NoBoundState(format!(
            "binding numerator gamma(l+mu-tau/2) + k3*alpha = {b} is negative"
        )));
    }
    let mut flags = Vec::new();
    if nn == 0.0 {
        return Err(SpectraError::NoBoundState("vanishing denominator".into()));
    }
    let k02 = m2 - (b / nn).powi(2);
    if k02 < 0.0 {
        return Err(SpectraError::NoBoundState(format!("k0^2 = {k02} < 0")));
    }
    let k0 = k02.sqrt();
    let negative_branch = if k0 > 0.0 { Some(-k0) } else { None };
    if b == 0.0 {
        flags.push(SpectralFlag::ContinuumThreshold);
        return Ok(SpectralResult {
            k0,
            scale: 0.0,
            indices: vec![],
            tau,
            flags,
            negative_branch,
        });
    }
    let eq = if tau == 1.0 { Equation::Dirac } else { Equation::KleinGordon };
    let mut indices = Vec::new();
    let mut scale = 0.0;
    for &s in active_s(eq) {
        let (ix, e) = indices_case12(2, s, qn, p, k0)?;
        indices.push(ix);
        scale = e;
    }
    if eq == Equation::Dirac {
        let (a, g) = (p.alpha, p.gamma);
        let l2 = (k0 * k0 - p.mass * p.mass).max(0.0).sqrt();
        let sq = (lh * lh + a * a).sqrt();
        if spin_forbidden(&indices, qn.zeta as f64, |z| l2 * sq + z * (qn.k3 * lh - g * a)) {
            flags.push(SpectralFlag::SpinForbidden);
        }
    }
    Ok(SpectralResult {
        k0,
        scale,
        indices,
        tau,
        flags,
        negative_branch,
    })
}

/// (τ_s, δ_s) of the s-dependent centrifugal shift and f2′ coefficient.
pub fn case3_shifts(s: u8) -> (f64, f64) {
    let s = s as f64;
    (s * (2.0 - s), s * (5.0 - 3.0 * s) / 2.0)
}

/// Indices and scale for the f0 = ε f1 subcase at a given k0.
pub(crate) fn indices_case3(
    variant: Variant,
    s: u8,
    qn: &QuantumNumbers,
    p: &FieldParams,
    k0: f64,
) -> Result<(LaguerreIndices, f64), SpectraError> {
    let (tau, delta) = case3_shifts(s);
    let kappa = k0 - p.epsilon * qn.k3;
    let lt = big_l(qn, p) - tau;
    let disc = lt * lt + 2.0 * p.beta * kappa;
    if disc < 0.0 {
        return Err(SpectraError::DiscriminantNegative(disc));
    }
    let a = disc.sqrt();
    match variant {
        Variant::A => {
            let e2 = mass_shell2(qn, p) - k0 * k0;
            if !(e2 > 0.0) {
                return Err(SpectraError::NoBoundState(format!("E^2 = {e2} is not positive")));
            }
            let e = e2.sqrt();
            let b = p.gamma * (lt + delta / 2.0) - p.alpha * kappa;
            Ok((LaguerreIndices { s, p: b / e - 0.5 + a, n: b / e - 0.5 - a }, e))
        }
        Variant::B => {
            let e02 = p.gamma * p.gamma + 2.0 * p.alpha * kappa;
            if !(e02 > 0.0) {
                return Err(SpectraError::NoBoundState(format!("E0^2 = {e02} is not positive")));
            }
            let e0 = e02.sqrt();
            let m = p.mass;
            let bt = 2.0 * p.gamma * (lt + delta) + k0 * k0 - qn.k3 * qn.k3 - m * m;
            let c = bt / (4.0 * e0) - 0.5;
            Ok((LaguerreIndices { s, p: c + a / 2.0, n: c - a / 2.0 }, e0))
        }
    }
}

/// Solve n_s(k0) = target_n by scanning and bisection. All real roots found
/// in the admissible window are returned, largest k0 first.
pub fn energy_case3(
    qn: &QuantumNumbers,
    variant: Variant,
    p: &FieldParams,
    s: u8,
    target_n: i64,
) -> Result<Vec<SpectralResult>, SpectraError> {
    if s > 2 {
        return Err(SpectraError::Unsupported(format!("s = {s}")));
    }
    let g = |k0: f64| indices_case3(variant, s, qn, p, k0).map(|(ix, _)| ix.n - target_n as f64);
    let (lo, hi) = match variant {
        Variant::A => {
            let m = mass_shell2(qn, p).sqrt();
            (-m + 1e-6, m - 1e-6)
        }
        Variant::B => {
            // n_s grows without bound in |k0| where admissible; widen until
            // both ends are past the target or inadmissible
            let mut k = 2.0 * (mass_shell2(qn, p).sqrt() + (2.0 * p.gamma.abs() * (target_n as f64 + 2.0)).sqrt() + 1.0);
            for _ in 0..60 {
                let ok = |v: Result<f64, _>| v.map_or(true, |x| x > 1.0);
                if ok(g(k)) && ok(g(-k)) {
                    break;
                }
                k *= 2.0;
            }
            (-k, k)
        }
    };
    let npts = 2000;
    let xs: Vec<f64> = (0..=npts).map(|i| lo + (hi - lo) * i as f64 / npts as f64).collect();
    let vals: Vec<Option<f64>> = xs.iter().map(|&k| g(k).ok()).collect();
    let mut roots = Vec::new();
    for i in 0..npts {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
        if a == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if a.signum() == b.signum() {
            continue;
        }
        let f = |k: f64| g(k).unwrap_or(f64::NAN);
        if let Ok(r) = bisect(f, xs[i], xs[i + 1], 1e-15 * (1.0 + xs[i].abs())) {
            roots.push(r);
        }
    }
    if let Some(Some(v)) = vals.last() {
        if *v == 0.0 {
            roots.push(hi);
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + a.abs()));
    let mut out = Vec::new();
    for k0 in roots {
        let (ix, scale) = indices_case3(variant, s, qn, p, k0)?;
        if (ix.n - target_n as f64).abs() > 1e-9 * (1.0 + target_n.abs() as f64) {
            continue;
        }
        let mut flags = Vec::new();
        if ix.p == ix.n {
            flags.push(SpectralFlag::BoundaryCase);
        }
        out.push(SpectralResult {
            k0,
            scale,
            indices: vec![ix],
            tau: case3_shifts(s).0,
            flags,
            negative_branch: None,
        });
    }
    if out.is_empty() {
        return Err(SpectraError::NoRootInBracket { target: target_n, lo, hi });
    }
    Ok(out)
}

/// k⊥² of the longitudinal case with f2 = γr.
#[derive(Debug, Clone, PartialEq)]
pub struct KperpResult {
    pub kperp2: f64,
    /// √(γ² − k⊥²)
    pub scale: f64,
    /// shifted s=1 index (Dirac only)
    pub n1: Option<i64>,
    pub tau: f64,
    pub indices: Vec<LaguerreIndices>,
}

pub(crate) fn indices_case_ii(s: u8, l: f64, gamma: f64, kperp2: f64) -> Result<(LaguerreIndices, f64), SpectraError> {
    let e2 = gamma * gamma - kperp2;
    if !(e2 > 0.0) {
        return Err(SpectraError::NoBoundState(format!("gamma^2 - kperp^2 = {e2}")));
    }
    let e = e2.sqrt();
    let sf = s as f64;
    let c = gamma / e * (l + sf * (sf - 3.0) / 4.0) - 0.5;
    let a = (l - sf * (2.0 - sf)).abs();
    Ok((LaguerreIndices { s, p: c + a, n: c - a }, e))
}

/// τ = 0 for Klein-Gordon (s = 0), τ = 1/2 for Dirac (s = 1, 2).
pub fn kperp_case_ii(qn: &QuantumNumbers, p: &FieldParams, tau: f64) -> Result<KperpResult, SpectraError> {
    if tau != 0.0 && tau != 0.5 {
        return Err(SpectraError::Unsupported(format!("tau = {tau} (expected 0 or 1/2)")));
    }
    let l = big_l(qn, p);
    let g = p.gamma;
    if g * (l - tau) < 0.0 {
        return Err(SpectraError::ConditionViolated(g * (l - tau)));
    }
    let dirac = tau == 0.5;
    if dirac && qn.l == 0 {
        return Err(SpectraError::UndefinedShift);
    }
    let den = qn.n as f64 + 0.5 + l.abs();
    let kperp2 = g * g * (1.0 - ((l - tau) / den).powi(2));
    let n1 = dirac.then(|| qn.n as i64 + qn.l.signum());
    let mut indices = Vec::new();
    let mut scale = (g * g - kperp2).max(0.0).sqrt();
    if g * (l - tau) > 0.0 {
        let ss: &[u8] = if dirac { &[1, 2] } else { &[0] };
        for &s in ss {
            let (ix, e) = indices_case_ii(s, l, g, kperp2)?;
            indices.push(ix);
            scale = e;
        }
    }
    Ok(KperpResult {
        kperp2,
        scale,
        n1,
        tau,
        indices,
    })
}

/// Schrödinger, f2 = γr with the mass-coupled f0, f1.
pub fn energy_schrodinger_a(qn: &QuantumNumbers, p: &FieldParams) -> Result<SpectralResult, SpectraError> {
    let (l, m, k3) = (big_l(qn, p), p.mass, qn.k3);
    let a = l * l + p.beta * p.beta + 2.0 * m * p.delta + 4.0 * m * p.lambda * k3;
    if a < 0.0 {
        return Err(SpectraError::NegativeA(a));
    }
    let b = p.gamma * l + p.beta * k3 - p.alpha * m;
    if b < 0.0 {
        return Err(SpectraError::NoBoundState(format!("b = {b} is negative")));
    }
    let sa = a.sqrt();
    let den = 2.0 * qn.n as f64 + 1.0 + 2.0 * sa;
    let e = 4.0 * b * b / (den * den);
    let k0 = (p.gamma * p.gamma + k3 * k3 - e) / (2.0 * m);
    let mut flags = Vec::new();
    if a == 0.0 {
        flags.push(SpectralFlag::BoundaryCase);
    }
    if b == 0.0 {
        flags.push(SpectralFlag::ContinuumThreshold);
        return Ok(SpectralResult { k0, scale: 0.0, indices: vec![], tau: 0.0, flags, negative_branch: None });
    }
    let se = e.sqrt();
    Ok(SpectralResult {
        k0,
        scale: se,
        indices: vec![LaguerreIndices { s: 0, p: b / se - 0.5 + sa, n: b / se - 0.5 - sa }],
        tau: 0.0,
        flags,
        negative_branch: None,
    })
}

pub(crate) fn schrodinger_a_indices(qn: &QuantumNumbers, p: &FieldParams, k0: f64) -> Result<(LaguerreIndices, f64), SpectraError> {
    let (l, m, k3) = (big_l(qn, p), p.mass, qn.k3);
    let a = l * l + p.beta * p.beta + 2.0 * m * p.delta + 4.0 * m * p.lambda * k3;
    if a < 0.0 {
        return Err(SpectraError::NegativeA(a));
    }
    let b = p.gamma * l + p.beta * k3 - p.alpha * m;
    let e = p.gamma * p.gamma + k3 * k3 - 2.0 * m * k0;
    if !(e > 0.0) {
        return Err(SpectraError::NoBoundState(format!("E = {e} is not positive")));
    }
    let se = e.sqrt();
    let sa = a.sqrt();
    Ok((LaguerreIndices { s: 0, p: b / se - 0.5 + sa, n: b / se - 0.5 - sa }, se))
}

pub(crate) fn schrodinger_b_indices(qn: &QuantumNumbers, p: &FieldParams, k0: f64) -> Result<(LaguerreIndices, f64), SpectraError> {
    let (l, m, k3) = (big_l(qn, p), p.mass, qn.k3);
    let a = l * l + 2.0 * p.beta * m + 4.0 * m * p.lambda * k3;
    if a < 0.0 {
        return Err(SpectraError::NegativeA(a));
    }
    let b = p.gamma * p.gamma + 2.0 * p.alpha * m + 4.0 * m * p.delta * k3;
    if !(b > 0.0) {
        return Err(SpectraError::NonpositiveB(b));
    }
    let e = 2.0 * m * k0 + 2.0 * p.gamma * l - k3 * k3 - 8.0 * p.delta * p.lambda * m * m;
    let sb = b.sqrt();
    let c = e / (4.0 * sb) - 0.5;
    let sa = a.sqrt();
    Ok((LaguerreIndices { s: 0, p: c + sa / 2.0, n: c - sa / 2.0 }, sb))
}

/// Schrödinger, f2 = γr² with the mass-coupled f0, f1.
pub fn energy_schrodinger_b(qn: &QuantumNumbers, p: &FieldParams) -> Result<SpectralResult, SpectraError> {
    let (l, m, k3) = (big_l(qn, p), p.mass, qn.k3);
    let a = l * l + 2.0 * p.beta * m + 4.0 * m * p.lambda * k3;
    if a < 0.0 {
        return Err(SpectraError::NegativeA(a));
    }
    let b = p.gamma * p.gamma + 2.0 * p.alpha * m + 4.0 * m * p.delta * k3;
    if !(b > 0.0) {
        return Err(SpectraError::NonpositiveB(b));
    }
    let k0 = (2.0 * b.sqrt() * (2.0 * qn.n as f64 + 1.0 + a.sqrt()) + k3 * k3 - 2.0 * p.gamma * l
        + 8.0 * p.delta * p.lambda * m * m)
        / (2.0 * m);
    let (ix, scale) = schrodinger_b_indices(qn, p, k0)?;
    let mut flags = Vec::new();
    if a == 0.0 {
        flags.push(SpectralFlag::BoundaryCase);
    }
    Ok(SpectralResult { k0, scale, indices: vec![ix], tau: 0.0, flags, negative_branch: None })
}
