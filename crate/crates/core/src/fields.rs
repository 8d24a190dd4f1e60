//! Aharonov–Bohm flux bookkeeping and the additional-field families that
//! admit exact solutions.
//!
//! All potentials are stored already scaled by e/(cħ), in units ħ = c = 1.
//! The AB line itself is carried only through (l0, mu) and is never
//! evaluated pointwise.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::numerics::{CubicSpline, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("unsupported configuration for case {case}: {reason} (nearest supported pattern: {nearest})")]
    UnsupportedConfiguration {
        case: String,
        reason: String,
        nearest: String,
    },
    #[error("flux mantissa is zero; a nontrivial AB flux (0 < mu < 1) is required")]
    NontrivialFluxRequired,
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn cfg_err(field: impl Into<String>, message: impl Into<String>) -> FieldError {
    FieldError::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// Integer part and mantissa of the AB flux,
/// flux_quanta = −charge_sign·(l0 + mu) with 0 ≤ mu < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDecomposition {
    pub flux_quanta: f64,
    pub charge_sign: i8,
    pub l0: i64,
    pub mu: f64,
}

impl FluxDecomposition {
    pub fn is_nontrivial(&self) -> bool {
        self.mu != 0.0
    }

    pub fn require_nontrivial(&self) -> Result<(), FieldError> {
        if self.is_nontrivial() {
            Ok(())
        } else {
            Err(FieldError::NontrivialFluxRequired)
        }
    }
}

/// Split a flux (in units of 2π/|e|) into (l0, mu).
///
/// A zero mantissa is not an error here; callers that need the
/// nontrivial AB field check [`FluxDecomposition::require_nontrivial`].
pub fn decompose_flux(flux_quanta: f64, charge_sign: i8) -> Result<FluxDecomposition, FieldError> {
    if !flux_quanta.is_finite() {
        return Err(cfg_err("flux_quanta", "must be finite"));
    }
    if charge_sign != 1 && charge_sign != -1 {
        return Err(cfg_err("charge_sign", "must be +1 or -1"));
    }
    let t = -(charge_sign as f64) * flux_quanta;
    let fl = t.floor();
    let mut l0 = fl as i64;
    let mut mu = t - fl;
    if mu >= 1.0 {
        // t just below an integer, mantissa rounded up
        l0 += 1;
        mu = 0.0;
    }
    Ok(FluxDecomposition {
        flux_quanta,
        charge_sign,
        l0,
        mu,
    })
}

/// Radial functions f(r) used for f0, f1 (Case I, Schrödinger) and f2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    Zero,
    InverseR { alpha: f64 },
    InverseR2 { beta: f64 },
    /// α/r + β/r²
    InverseRPlusInverseR2 { alpha: f64, beta: f64 },
    /// γ r
    Linear { gamma: f64 },
    /// γ r²
    Quadratic { gamma: f64 },
    /// α r² + β/r²
    QuadraticPlusInverseR2 { alpha: f64, beta: f64 },
    /// α/r + δ/r² + (2λ/r³)(β − mλ/r)
    SchrodingerAScalar { alpha: f64, beta: f64, delta: f64, lambda: f64, mass: f64 },
    /// β/r − 2mλ/r²
    SchrodingerAVector { beta: f64, lambda: f64, mass: f64 },
    /// α r² + β/r² − 2m(λ²/r⁴ + δ² r⁴)
    SchrodingerBScalar { alpha: f64, beta: f64, delta: f64, lambda: f64, mass: f64 },
    /// −2m(λ/r² + δ r²)
    SchrodingerBVector { delta: f64, lambda: f64, mass: f64 },
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        use RadialProfile::*;
        match *self {
            Zero => 0.0,
            InverseR { alpha } => alpha / r,
            InverseR2 { beta } => beta / (r * r),
            InverseRPlusInverseR2 { alpha, beta } => alpha / r + beta / (r * r),
            Linear { gamma } => gamma * r,
            Quadratic { gamma } => gamma * r * r,
            QuadraticPlusInverseR2 { alpha, beta } => alpha * r * r + beta / (r * r),
            SchrodingerAScalar { alpha, beta, delta, lambda, mass } => {
                alpha / r + delta / (r * r) + 2.0 * lambda / r.powi(3) * (beta - mass * lambda / r)
            }
            SchrodingerAVector { beta, lambda, mass } => beta / r - 2.0 * mass * lambda / (r * r),
            SchrodingerBScalar { alpha, beta, delta, lambda, mass } => {
                alpha * r * r + beta / (r * r)
                    - 2.0 * mass * (lambda * lambda / r.powi(4) + delta * delta * r.powi(4))
            }
            SchrodingerBVector { delta, lambda, mass } => -2.0 * mass * (lambda / (r * r) + delta * r * r),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        use RadialProfile::*;
        match *self {
            Zero => 0.0,
            InverseR { alpha } => -alpha / (r * r),
            InverseR2 { beta } => -2.0 * beta / r.powi(3),
            InverseRPlusInverseR2 { alpha, beta } => -alpha / (r * r) - 2.0 * beta / r.powi(3),
            Linear { gamma } => gamma,
            Quadratic { gamma } => 2.0 * gamma * r,
            QuadraticPlusInverseR2 { alpha, beta } => 2.0 * alpha * r - 2.0 * beta / r.powi(3),
            SchrodingerAScalar { alpha, beta, delta, lambda, mass } => {
                -alpha / (r * r) - 2.0 * delta / r.powi(3) - 6.0 * lambda * beta / r.powi(4)
                    + 8.0 * mass * lambda * lambda / r.powi(5)
            }
            SchrodingerAVector { beta, lambda, mass } => -beta / (r * r) + 4.0 * mass * lambda / r.powi(3),
            SchrodingerBScalar { alpha, beta, delta, lambda, mass } => {
                2.0 * alpha * r - 2.0 * beta / r.powi(3)
                    - 2.0 * mass * (-4.0 * lambda * lambda / r.powi(5) + 4.0 * delta * delta * r.powi(3))
            }
            SchrodingerBVector { delta, lambda, mass } => {
                -2.0 * mass * (-2.0 * lambda / r.powi(3) + 2.0 * delta * r)
            }
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, RadialProfile::Zero)
    }

    /// (α, β) when the profile is of the form α/r + β/r².
    fn inverse_r_r2(&self) -> Option<(f64, f64)> {
        use RadialProfile::*;
        match *self {
            Zero => Some((0.0, 0.0)),
            InverseR { alpha } => Some((alpha, 0.0)),
            InverseR2 { beta } => Some((0.0, beta)),
            InverseRPlusInverseR2 { alpha, beta } => Some((alpha, beta)),
            _ => None,
        }
    }

    /// (α, β) when the profile is of the form α r² + β/r².
    fn quad_r2(&self) -> Option<(f64, f64)> {
        use RadialProfile::*;
        match *self {
            Zero => Some((0.0, 0.0)),
            Quadratic { gamma } => Some((gamma, 0.0)),
            InverseR2 { beta } => Some((0.0, beta)),
            QuadraticPlusInverseR2 { alpha, beta } => Some((alpha, beta)),
            _ => None,
        }
    }

    fn scaled(&self, c: f64) -> RadialProfile {
        use RadialProfile::*;
        match *self {
            InverseR { alpha } => InverseR { alpha: c * alpha },
            InverseR2 { beta } => InverseR2 { beta: c * beta },
            InverseRPlusInverseR2 { alpha, beta } => InverseRPlusInverseR2 { alpha: c * alpha, beta: c * beta },
            Linear { gamma } => Linear { gamma: c * gamma },
            Quadratic { gamma } => Quadratic { gamma: c * gamma },
            QuadraticPlusInverseR2 { alpha, beta } => QuadraticPlusInverseR2 { alpha: c * alpha, beta: c * beta },
            other => other,
        }
    }
}

/// One-dimensional pulse shapes f(x).
#[derive(Debug, Clone, PartialEq)]
pub enum Pulse {
    Constant { c: f64 },
    Linear { alpha: f64 },
    Inverse { alpha: f64 },
    Exp { alpha: f64, beta: f64 },
    Tan { alpha: f64, beta: f64 },
    Tanh { alpha: f64, beta: f64 },
    Coth { alpha: f64, beta: f64 },
    Tabulated(CubicSpline),
}

impl Pulse {
    pub fn value(&self, x: f64) -> Result<f64, FieldError> {
        let v = match self {
            Pulse::Constant { c } => *c,
            Pulse::Linear { alpha } => alpha * x,
            Pulse::Inverse { alpha } => alpha / x,
            Pulse::Exp { alpha, beta } => alpha * (beta * x).exp(),
            Pulse::Tan { alpha, beta } => alpha * (beta * x).tan(),
            Pulse::Tanh { alpha, beta } => alpha * (beta * x).tanh(),
            Pulse::Coth { alpha, beta } => alpha / (beta * x).tanh(),
            Pulse::Tabulated(s) => s.value(x)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::DomainError(format!("pulse is singular at x = {x}")))
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64, FieldError> {
        let v = match self {
            Pulse::Constant { .. } => 0.0,
            Pulse::Linear { alpha } => *alpha,
            Pulse::Inverse { alpha } => -alpha / (x * x),
            Pulse::Exp { alpha, beta } => alpha * beta * (beta * x).exp(),
            Pulse::Tan { alpha, beta } => alpha * beta / (beta * x).cos().powi(2),
            Pulse::Tanh { alpha, beta } => alpha * beta / (beta * x).cosh().powi(2),
            Pulse::Coth { alpha, beta } => -alpha * beta / (beta * x).sinh().powi(2),
            Pulse::Tabulated(s) => s.derivative(x)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FieldError::DomainError(format!("pulse derivative is singular at x = {x}")))
        }
    }
}

/// Which of the two longitudinal potentials an axial profile is evaluated as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    F0,
    F1,
}

/// Longitudinal potentials depending on (z, x0).
#[derive(Debug, Clone, PartialEq)]
pub enum AxialProfile {
    Zero,
    /// f(z)
    OfZ(Pulse),
    /// f(x0)
    OfTime(Pulse),
    /// f0 = f1 = f(ξ)/2 with ξ = x0 − z
    Lightfront(Pulse),
    /// f(ξ̄) = α ξ̄ with f0 = −z f/ξ̄, f1 = x0 f/ξ̄, ξ̄ = x0² − z²
    BoostLinear { alpha: f64 },
    /// f(ξ̄) = α √|ξ̄|
    BoostSqrt { alpha: f64 },
}

impl AxialProfile {
    /// f(ξ̄) and f′(ξ̄) for the boost-invariant shapes.
    pub fn boost_f(&self, xib: f64) -> Option<(f64, f64)> {
        match *self {
            AxialProfile::BoostLinear { alpha } => Some((alpha * xib, alpha)),
            AxialProfile::BoostSqrt { alpha } => {
                let a = xib.abs().sqrt();
                Some((alpha * a, alpha * xib.signum() / (2.0 * a)))
            }
            _ => None,
        }
    }

    /// Potential value and its partial derivatives (∂z, ∂0).
    pub fn eval(&self, slot: Slot, z: f64, x0: f64) -> Result<(f64, f64, f64), FieldError> {
        match self {
            AxialProfile::Zero => Ok((0.0, 0.0, 0.0)),
            AxialProfile::OfZ(p) => Ok((p.value(z)?, p.derivative(z)?, 0.0)),
            AxialProfile::OfTime(p) => Ok((p.value(x0)?, 0.0, p.derivative(x0)?)),
            AxialProfile::Lightfront(p) => {
                let xi = x0 - z;
                let f = 0.5 * p.value(xi)?;
                let fp = 0.5 * p.derivative(xi)?;
                Ok((f, -fp, fp))
            }
            AxialProfile::BoostLinear { .. } | AxialProfile::BoostSqrt { .. } => {
                let xib = x0 * x0 - z * z;
                if xib == 0.0 {
                    return Err(FieldError::DomainError("boost-invariant field on the light cone".into()));
                }
                let (f, fp) = self.boost_f(xib).unwrap();
                let g = f / xib;
                let gp = fp / xib - f / (xib * xib);
                // ∂z ξ̄ = −2z, ∂0 ξ̄ = 2x0
                match slot {
                    Slot::F0 => Ok((-z * g, -g + 2.0 * z * z * gp, -2.0 * z * x0 * gp)),
                    Slot::F1 => Ok((x0 * g, -2.0 * z * x0 * gp, g + 2.0 * x0 * x0 * gp)),
                }
            }
        }
    }

    pub fn value(&self, slot: Slot, z: f64, x0: f64) -> Result<f64, FieldError> {
        self.eval(slot, z, x0).map(|v| v.0)
    }
}

/// f1(cos θ) for the spherical configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarProfile {
    /// α cosθ + β
    Linear { alpha: f64, beta: f64 },
}

impl PolarProfile {
    pub fn derivative(&self, _cos_theta: f64) -> f64 {
        match *self {
            PolarProfile::Linear { alpha, .. } => alpha,
        }
    }
}

/// A potential slot f0 or f1.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Radial(RadialProfile),
    Axial(AxialProfile),
    Polar(PolarProfile),
}

impl Potential {
    pub fn is_zero(&self) -> bool {
        matches!(
            self,
            Potential::Radial(RadialProfile::Zero) | Potential::Axial(AxialProfile::Zero)
        )
    }

    pub fn radial(&self) -> Option<RadialProfile> {
        match self {
            Potential::Radial(p) => Some(*p),
            Potential::Axial(AxialProfile::Zero) => Some(RadialProfile::Zero),
            _ => None,
        }
    }

    pub fn axial(&self) -> Option<AxialProfile> {
        match self {
            Potential::Axial(p) => Some(p.clone()),
            Potential::Radial(RadialProfile::Zero) => Some(AxialProfile::Zero),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    I1,
    I2,
    I3a,
    I3b,
    II,
    SchrodingerA,
    SchrodingerB,
    Spherical,
}

impl CaseTag {
    pub fn parse(s: &str) -> Option<CaseTag> {
        Some(match s {
            "I.1" => CaseTag::I1,
            "I.2" => CaseTag::I2,
            "I.3a" => CaseTag::I3a,
            "I.3b" => CaseTag::I3b,
            "II" => CaseTag::II,
            "Schrodinger-a" | "Schrödinger-a" => CaseTag::SchrodingerA,
            "Schrodinger-b" | "Schrödinger-b" => CaseTag::SchrodingerB,
            "Spherical" => CaseTag::Spherical,
            _ => return None,
        })
    }

    fn pattern(&self) -> &'static str {
        match self {
            CaseTag::I1 => "I.1 {f0 = alpha/r, f1 = 0, f2 = gamma*r}",
            CaseTag::I2 => "I.2 {f0 = 0, f1 = alpha/r, f2 = gamma*r}",
            CaseTag::I3a => "I.3a {f0 = eps*f1 = alpha/r + beta/r^2, f2 = gamma*r}",
            CaseTag::I3b => "I.3b {f0 = eps*f1 = alpha*r^2 + beta/r^2, f2 = gamma*r^2}",
            CaseTag::II => "II {f2 in {gamma*r, gamma*r^2}, f0/f1 longitudinal}",
            CaseTag::SchrodingerA => "Schrodinger-a {f0, f1 mass-coupled inverse powers, f2 = gamma*r}",
            CaseTag::SchrodingerB => "Schrodinger-b {f0, f1 mass-coupled powers, f2 = gamma*r^2}",
            CaseTag::Spherical => "Spherical {f0 = gamma/r, f1(cos) = alpha*cos + beta}",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::I1 => "I.1",
            CaseTag::I2 => "I.2",
            CaseTag::I3a => "I.3a",
            CaseTag::I3b => "I.3b",
            CaseTag::II => "II",
            CaseTag::SchrodingerA => "Schrodinger-a",
            CaseTag::SchrodingerB => "Schrodinger-b",
            CaseTag::Spherical => "Spherical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub flux: FluxDecomposition,
    pub f0: Potential,
    pub f1: Potential,
    pub f2: RadialProfile,
    pub case_tag: CaseTag,
}

/// Scalar parameters shared by the spectral and wavefunction formulas.
/// Unused entries are zero; epsilon is ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub mass: f64,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams {
            mu: 0.5,
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 0.0,
            lambda: 0.0,
            epsilon: 1.0,
            mass: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldValues {
    pub e_r: f64,
    pub e_phi: f64,
    pub e_z: f64,
    pub h_r: f64,
    pub h_phi: f64,
    pub h_z: f64,
}

fn unsupported(case: CaseTag, reason: impl Into<String>) -> FieldError {
    FieldError::UnsupportedConfiguration {
        case: case.to_string(),
        reason: reason.into(),
        nearest: case.pattern().to_string(),
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs()))
}

/// Check that (case_tag, f0, f1, f2) is one of the solvable patterns and
/// return the config with shapes normalized for that case.
pub fn validate_config(config: &FieldConfig) -> Result<FieldConfig, FieldError> {
    config.flux.require_nontrivial()?;
    let case = config.case_tag;
    let mut out = config.clone();
    let radial = |p: &Potential, name: &str| {
        p.radial()
            .ok_or_else(|| unsupported(case, format!("{name} must be a radial profile")))
    };
    match case {
        CaseTag::I1 | CaseTag::I2 => {
            if !matches!(config.f2, RadialProfile::Linear { .. }) {
                return Err(unsupported(case, "f2 must be linear (gamma*r)"));
            }
            let (coul, other, cname, oname) = if case == CaseTag::I1 {
                (&config.f0, &config.f1, "f0", "f1")
            } else {
                (&config.f1, &config.f0, "f1", "f0")
            };
            if !other.is_zero() {
                return Err(unsupported(case, format!("{oname} must vanish")));
            }
            let p = radial(coul, cname)?;
            let alpha = match p {
                RadialProfile::Zero => 0.0,
                RadialProfile::InverseR { alpha } => alpha,
                _ => return Err(unsupported(case, format!("{cname} must be alpha/r"))),
            };
            let norm = Potential::Radial(RadialProfile::InverseR { alpha });
            let zero = Potential::Radial(RadialProfile::Zero);
            if case == CaseTag::I1 {
                out.f0 = norm;
                out.f1 = zero;
            } else {
                out.f0 = zero;
                out.f1 = norm;
            }
        }
        CaseTag::I3a | CaseTag::I3b => {
            let want_linear = case == CaseTag::I3a;
            let f2_ok = match config.f2 {
                RadialProfile::Linear { .. } => want_linear,
                RadialProfile::Quadratic { .. } => !want_linear,
                _ => false,
            };
            if !f2_ok {
                return Err(unsupported(case, "f2 shape does not match the variant"));
            }
            let f0 = radial(&config.f0, "f0")?;
            let f1 = radial(&config.f1, "f1")?;
            let split = |p: &RadialProfile| if want_linear { p.inverse_r_r2() } else { p.quad_r2() };
            let (a0, b0) = split(&f0).ok_or_else(|| unsupported(case, "f0 shape not allowed"))?;
            let (a1, b1) = split(&f1).ok_or_else(|| unsupported(case, "f1 shape not allowed"))?;
            if !((same(a0, a1) && same(b0, b1)) || (same(a0, -a1) && same(b0, -b1))) {
                return Err(unsupported(case, "f0 must equal +f1 or -f1"));
            }
            let norm = if want_linear {
                RadialProfile::InverseRPlusInverseR2 { alpha: a0, beta: b0 }
            } else {
                RadialProfile::QuadraticPlusInverseR2 { alpha: a0, beta: b0 }
            };
            let eps = if same(a0, a1) && same(b0, b1) { 1.0 } else { -1.0 };
            out.f0 = Potential::Radial(norm);
            out.f1 = Potential::Radial(norm.scaled(eps));
        }
        CaseTag::II => {
            if !matches!(config.f2, RadialProfile::Linear { .. } | RadialProfile::Quadratic { .. }) {
                return Err(unsupported(case, "f2 must be gamma*r or gamma*r^2"));
            }
            let a0 = config
                .f0
                .axial()
                .ok_or_else(|| unsupported(case, "f0 must be longitudinal"))?;
            let a1 = config
                .f1
                .axial()
                .ok_or_else(|| unsupported(case, "f1 must be longitudinal"))?;
            use AxialProfile::*;
            let ok = match (&a0, &a1) {
                (Zero, Zero) | (OfZ(_), Zero) | (Zero, OfTime(_)) => true,
                (Lightfront(p), Lightfront(q)) => p == q,
                (BoostLinear { alpha: x }, BoostLinear { alpha: y }) => same(*x, *y),
                (BoostSqrt { alpha: x }, BoostSqrt { alpha: y }) => same(*x, *y),
                _ => false,
            };
            if !ok {
                return Err(unsupported(
                    case,
                    "allowed (f0, f1): (f(z), 0), (0, f(x0)), identical lightfront or boost-invariant pairs",
                ));
            }
            out.f0 = Potential::Axial(a0);
            out.f1 = Potential::Axial(a1);
        }
        CaseTag::SchrodingerA => {
            if !matches!(config.f2, RadialProfile::Linear { .. }) {
                return Err(unsupported(case, "f2 must be gamma*r"));
            }
            let f0 = radial(&config.f0, "f0")?;
            let f1 = radial(&config.f1, "f1")?;
            let mass = schrodinger_mass(&f0, &f1);
            // f0 → (α, δ, β, λ); f1 → (β, λ); λ = 0 makes β in f0 irrelevant
            let (alpha, delta, b0, l0) = match f0 {
                RadialProfile::Zero => (0.0, 0.0, None, 0.0),
                RadialProfile::InverseR { alpha } => (alpha, 0.0, None, 0.0),
                RadialProfile::InverseR2 { beta } => (0.0, beta, None, 0.0),
                RadialProfile::InverseRPlusInverseR2 { alpha, beta } => (alpha, beta, None, 0.0),
                RadialProfile::SchrodingerAScalar { alpha, beta, delta, lambda, .. } => {
                    (alpha, delta, Some(beta), lambda)
                }
                _ => return Err(unsupported(case, "f0 shape not allowed")),
            };
            let (beta, l1) = match f1 {
                RadialProfile::Zero => (0.0, 0.0),
                RadialProfile::InverseR { alpha } => (alpha, 0.0),
                RadialProfile::SchrodingerAVector { beta, lambda, .. } => (beta, lambda),
                _ => return Err(unsupported(case, "f1 shape not allowed")),
            };
            if !same(l0, l1) {
                return Err(unsupported(case, "lambda differs between f0 and f1"));
            }
            if l0 != 0.0 && !b0.is_some_and(|b| same(b, beta)) {
                return Err(unsupported(case, "beta differs between f0 and f1"));
            }
            out.f0 = Potential::Radial(RadialProfile::SchrodingerAScalar { alpha, beta, delta, lambda: l0, mass });
            out.f1 = Potential::Radial(RadialProfile::SchrodingerAVector { beta, lambda: l0, mass });
        }
        CaseTag::SchrodingerB => {
            if !matches!(config.f2, RadialProfile::Quadratic { .. }) {
                return Err(unsupported(case, "f2 must be gamma*r^2"));
            }
            let f0 = radial(&config.f0, "f0")?;
            let f1 = radial(&config.f1, "f1")?;
            let mass = schrodinger_mass(&f0, &f1);
            let (alpha, beta, d0, l0) = match f0 {
                RadialProfile::SchrodingerBScalar { alpha, beta, delta, lambda, .. } => (alpha, beta, delta, lambda),
                other => match other.quad_r2() {
                    Some((a, b)) => (a, b, 0.0, 0.0),
                    None => return Err(unsupported(case, "f0 shape not allowed")),
                },
            };
            let (d1, l1) = match f1 {
                RadialProfile::Zero => (0.0, 0.0),
                RadialProfile::SchrodingerBVector { delta, lambda, .. } => (delta, lambda),
                _ => return Err(unsupported(case, "f1 shape not allowed")),
            };
            if !same(d0, d1) || !same(l0, l1) {
                return Err(unsupported(case, "delta/lambda differ between f0 and f1"));
            }
            out.f0 = Potential::Radial(RadialProfile::SchrodingerBScalar { alpha, beta, delta: d0, lambda: l0, mass });
            out.f1 = Potential::Radial(RadialProfile::SchrodingerBVector { delta: d0, lambda: l0, mass });
        }
        CaseTag::Spherical => {
            let f0 = radial(&config.f0, "f0")?;
            if !matches!(f0, RadialProfile::Zero | RadialProfile::InverseR { .. }) {
                return Err(unsupported(case, "f0 must be gamma/r"));
            }
            if !matches!(config.f1, Potential::Polar(_)) && !config.f1.is_zero() {
                return Err(unsupported(case, "f1 must be alpha*cos(theta) + beta"));
            }
            if !config.f2.is_zero() {
                return Err(unsupported(case, "f2 is not used in spherical coordinates"));
            }
        }
    }
    Ok(out)
}

fn schrodinger_mass(f0: &RadialProfile, f1: &RadialProfile) -> f64 {
    use RadialProfile::*;
    for p in [f0, f1] {
        match *p {
            SchrodingerAScalar { mass, .. }
            | SchrodingerAVector { mass, .. }
            | SchrodingerBScalar { mass, .. }
            | SchrodingerBVector { mass, .. } => return mass,
            _ => {}
        }
    }
    1.0
}

impl FieldConfig {
    /// Extract the scalar parameters of a validated config.
    pub fn params(&self, mass: f64) -> Result<FieldParams, FieldError> {
        let cfg = validate_config(self)?;
        let mut p = FieldParams {
            mu: cfg.flux.mu,
            mass,
            ..FieldParams::default()
        };
        p.gamma = match cfg.f2 {
            RadialProfile::Linear { gamma } | RadialProfile::Quadratic { gamma } => gamma,
            _ => 0.0,
        };
        let r0 = cfg.f0.radial();
        let r1 = cfg.f1.radial();
        match cfg.case_tag {
            CaseTag::I1 => p.alpha = r0.and_then(|f| f.inverse_r_r2()).map_or(0.0, |v| v.0),
            CaseTag::I2 => p.alpha = r1.and_then(|f| f.inverse_r_r2()).map_or(0.0, |v| v.0),
            CaseTag::I3a | CaseTag::I3b => {
                let (f0, f1) = (r0.unwrap(), r1.unwrap());
                let (a0, b0) = f0.inverse_r_r2().or_else(|| f0.quad_r2()).unwrap();
                let (a1, b1) = f1.inverse_r_r2().or_else(|| f1.quad_r2()).unwrap();
                p.alpha = a0;
                p.beta = b0;
                p.epsilon = if same(a0, a1) && same(b0, b1) { 1.0 } else { -1.0 };
            }
            CaseTag::II => {}
            CaseTag::SchrodingerA => {
                if let (
                    Some(RadialProfile::SchrodingerAScalar { alpha, beta, delta, lambda, .. }),
                    Some(_),
                ) = (r0, r1)
                {
                    p.alpha = alpha;
                    p.beta = beta;
                    p.delta = delta;
                    p.lambda = lambda;
                }
            }
            CaseTag::SchrodingerB => {
                if let Some(RadialProfile::SchrodingerBScalar { alpha, beta, delta, lambda, .. }) = r0 {
                    p.alpha = alpha;
                    p.beta = beta;
                    p.delta = delta;
                    p.lambda = lambda;
                }
            }
            CaseTag::Spherical => {
                if let Some(RadialProfile::InverseR { alpha }) = r0 {
                    p.gamma = alpha;
                }
                if let Potential::Polar(PolarProfile::Linear { alpha, beta }) = cfg.f1 {
                    p.alpha = alpha;
                    p.beta = beta;
                }
            }
        }
        Ok(p)
    }
}

/// E and H in the cylindrical basis for the potentials
/// A0 = f0, A3 = f1 (functions of r or of (z, x0)) and A_φ from f2.
pub fn eval_cyl_fields(config: &FieldConfig, r: f64, z: f64, x0: f64) -> Result<FieldValues, FieldError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(FieldError::DomainError(format!("r = {r} must be positive")));
    }
    let mut out = FieldValues {
        h_z: config.f2.derivative(r) / r,
        ..FieldValues::default()
    };
    for (slot, pot) in [(Slot::F0, &config.f0), (Slot::F1, &config.f1)] {
        let (dr, dz, d0) = match pot {
            Potential::Radial(p) => (p.derivative(r), 0.0, 0.0),
            Potential::Axial(a) => {
                let (_, dz, d0) = a.eval(slot, z, x0)?;
                (0.0, dz, d0)
            }
            Potential::Polar(_) => {
                return Err(unsupported(config.case_tag, "polar profile has no cylindrical form"));
            }
        };
        match slot {
            Slot::F0 => {
                out.e_r -= dr;
                out.e_z -= dz;
            }
            Slot::F1 => {
                out.e_z += d0;
                out.h_phi += dr;
            }
        }
    }
    Ok(out)
}

/// Radial E and H for A0 = f0(r), A_φ = f1(cos θ)/(r sin θ).
pub fn eval_sph_fields(config: &FieldConfig, r: f64, theta: f64) -> Result<FieldValues, FieldError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(FieldError::DomainError(format!("r = {r} must be positive")));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(FieldError::DomainError(format!(
            "theta = {theta} lies on the axis (string singularity)"
        )));
    }
    let f0 = config
        .f0
        .radial()
        .ok_or_else(|| unsupported(CaseTag::Spherical, "f0 must be radial"))?;
    let h_r = match &config.f1 {
        Potential::Polar(p) => -p.derivative(theta.cos()) / (r * r),
        p if p.is_zero() => 0.0,
        _ => return Err(unsupported(CaseTag::Spherical, "f1 must be a function of cos(theta)")),
    };
    Ok(FieldValues {
        e_r: -f0.derivative(r),
        h_r,
        ..FieldValues::default()
    })
}

// ---------------------------------------------------------------------------
// Config file

/// Which wave equation a run refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Dirac,
    KleinGordon,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Particle {
    pub equation: Equation,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub k3: f64,
    #[serde(default = "one_i8")]
    pub zeta: i8,
    #[serde(default = "one_i8")]
    pub nu: i8,
}

fn one() -> f64 {
    1.0
}
fn one_i8() -> i8 {
    1
}

impl Default for Particle {
    fn default() -> Self {
        Particle {
            equation: Equation::KleinGordon,
            mass: 1.0,
            k3: 0.0,
            zeta: 1,
            nu: 1,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    shape: String,
    #[serde(default)]
    coeffs: BTreeMap<String, f64>,
    #[serde(default)]
    table: Option<RawTable>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    flux_quanta: f64,
    charge_sign: i8,
    case_tag: String,
    f0: RawProfile,
    f1: RawProfile,
    f2: RawProfile,
    #[serde(default)]
    particle: Option<Particle>,
}

/// A parsed config file: the field plus the particle it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub field: FieldConfig,
    pub particle: Particle,
}

struct Coeffs<'a> {
    slot: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Coeffs<'_> {
    fn take(&self, keys: &[&str]) -> Result<Vec<f64>, FieldError> {
        for k in self.map.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(cfg_err(
                    format!("{}.coeffs.{k}", self.slot),
                    format!("unknown coefficient (expected {keys:?})"),
                ));
            }
        }
        keys.iter()
            .map(|k| {
                let v = *self
                    .map
                    .get(*k)
                    .ok_or_else(|| cfg_err(format!("{}.coeffs.{k}", self.slot), "missing"))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(cfg_err(format!("{}.coeffs.{k}", self.slot), "must be finite"))
                }
            })
            .collect()
    }
}

fn parse_pulse(name: &str, c: &Coeffs, table: Option<&RawTable>) -> Result<Pulse, FieldError> {
    Ok(match name {
        "constant" => Pulse::Constant { c: c.take(&["c"])?[0] },
        "linear" => Pulse::Linear { alpha: c.take(&["alpha"])?[0] },
        "inverse" => Pulse::Inverse { alpha: c.take(&["alpha"])?[0] },
        "exp" | "tan" | "tanh" | "coth" => {
            let v = c.take(&["alpha", "beta"])?;
            let (alpha, beta) = (v[0], v[1]);
            match name {
                "exp" => Pulse::Exp { alpha, beta },
                "tan" => Pulse::Tan { alpha, beta },
                "tanh" => Pulse::Tanh { alpha, beta },
                _ => Pulse::Coth { alpha, beta },
            }
        }
        "tabulated" => {
            c.take(&[])?;
            let t = table.ok_or_else(|| cfg_err(format!("{}.table", c.slot), "required for tabulated shapes"))?;
            Pulse::Tabulated(
                CubicSpline::new(t.x.clone(), t.y.clone())
                    .map_err(|e| cfg_err(format!("{}.table", c.slot), e.to_string()))?,
            )
        }
        _ => return Err(cfg_err(format!("{}.shape", c.slot), format!("unknown pulse `{name}`"))),
    })
}

fn parse_potential(slot: &str, raw: &RawProfile, mass: f64) -> Result<Potential, FieldError> {
    let c = Coeffs { slot, map: &raw.coeffs };
    let shape = raw.shape.as_str();
    if raw.table.is_some() && !shape.ends_with("tabulated") {
        return Err(cfg_err(format!("{slot}.table"), "only valid with a tabulated shape"));
    }
    let radial = |p| Ok(Potential::Radial(p));
    match shape {
        "zero" => {
            c.take(&[])?;
            radial(RadialProfile::Zero)
        }
        "inverse_r" => radial(RadialProfile::InverseR { alpha: c.take(&["alpha"])?[0] }),
        "inverse_r2" => radial(RadialProfile::InverseR2 { beta: c.take(&["beta"])?[0] }),
        "inverse_r_plus_inverse_r2" => {
            let v = c.take(&["alpha", "beta"])?;
            radial(RadialProfile::InverseRPlusInverseR2 { alpha: v[0], beta: v[1] })
        }
        "linear" => radial(RadialProfile::Linear { gamma: c.take(&["gamma"])?[0] }),
        "quadratic" => radial(RadialProfile::Quadratic { gamma: c.take(&["gamma"])?[0] }),
        "quadratic_plus_inverse_r2" => {
            let v = c.take(&["alpha", "beta"])?;
            radial(RadialProfile::QuadraticPlusInverseR2 { alpha: v[0], beta: v[1] })
        }
        "schrodinger_a_scalar" => {
            let v = c.take(&["alpha", "beta", "delta", "lambda"])?;
            radial(RadialProfile::SchrodingerAScalar { alpha: v[0], beta: v[1], delta: v[2], lambda: v[3], mass })
        }
        "schrodinger_a_vector" => {
            let v = c.take(&["beta", "lambda"])?;
            radial(RadialProfile::SchrodingerAVector { beta: v[0], lambda: v[1], mass })
        }
        "schrodinger_b_scalar" => {
            let v = c.take(&["alpha", "beta", "delta", "lambda"])?;
            radial(RadialProfile::SchrodingerBScalar { alpha: v[0], beta: v[1], delta: v[2], lambda: v[3], mass })
        }
        "schrodinger_b_vector" => {
            let v = c.take(&["delta", "lambda"])?;
            radial(RadialProfile::SchrodingerBVector { delta: v[0], lambda: v[1], mass })
        }
        "polar_linear" => {
            let v = c.take(&["alpha", "beta"])?;
            Ok(Potential::Polar(PolarProfile::Linear { alpha: v[0], beta: v[1] }))
        }
        "boost_linear" => Ok(Potential::Axial(AxialProfile::BoostLinear { alpha: c.take(&["alpha"])?[0] })),
        "boost_sqrt" => Ok(Potential::Axial(AxialProfile::BoostSqrt { alpha: c.take(&["alpha"])?[0] })),
        s => {
            let t = raw.table.as_ref();
            if let Some(p) = s.strip_suffix("_z") {
                Ok(Potential::Axial(AxialProfile::OfZ(parse_pulse(p, &c, t)?)))
            } else if let Some(p) = s.strip_suffix("_t") {
                Ok(Potential::Axial(AxialProfile::OfTime(parse_pulse(p, &c, t)?)))
            } else if let Some(p) = s.strip_prefix("lightfront_") {
                Ok(Potential::Axial(AxialProfile::Lightfront(parse_pulse(p, &c, t)?)))
            } else {
                Err(cfg_err(format!("{slot}.shape"), format!("unknown shape `{s}`")))
            }
        }
    }
}

/// Parse a TOML config. Unknown keys anywhere are rejected; the result is
/// validated against the solvable patterns.
pub fn parse_config(text: &str) -> Result<ConfigFile, FieldError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let field = e
            .span()
            .map(|s| text[s].lines().next().unwrap_or("").trim().to_string())
            .unwrap_or_default();
        cfg_err(field, e.message().to_string())
    })?;
    let particle = raw.particle.unwrap_or_default();
    if particle.zeta.abs() != 1 {
        return Err(cfg_err("particle.zeta", "must be +1 or -1"));
    }
    if !(particle.mass > 0.0) || !particle.k3.is_finite() {
        return Err(cfg_err("particle.mass", "mass must be positive and k3 finite"));
    }
    let flux = decompose_flux(raw.flux_quanta, raw.charge_sign)?;
    let case_tag = match raw.case_tag.as_str() {
        // the variant of case I.3 follows from f2
        "I.3" => match raw.f2.shape.as_str() {
            "quadratic" => CaseTag::I3b,
            _ => CaseTag::I3a,
        },
        s => CaseTag::parse(s).ok_or_else(|| cfg_err("case_tag", format!("unknown case `{s}`")))?,
    };
    let f0 = parse_potential("f0", &raw.f0, particle.mass)?;
    let f1 = parse_potential("f1", &raw.f1, particle.mass)?;
    let f2 = match parse_potential("f2", &raw.f2, particle.mass)? {
        Potential::Radial(p) => p,
        _ => return Err(cfg_err("f2.shape", "f2 must be a radial profile")),
    };
    let field = validate_config(&FieldConfig { flux, f0, f1, f2, case_tag })?;
    Ok(ConfigFile { field, particle })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_examples() {
        let d = decompose_flux(2.5, -1).unwrap();
        assert_eq!((d.l0, d.mu), (2, 0.5));
        let d = decompose_flux(-0.3, -1).unwrap();
        assert_eq!(d.l0, -1);
        assert!((d.mu - 0.7).abs() < 1e-15);
        let d = decompose_flux(2.5, 1).unwrap();
        assert_eq!((d.l0, d.mu), (-3, 0.5));
        assert!(decompose_flux(3.0, 1).unwrap().require_nontrivial().is_err());
        assert!(decompose_flux(f64::NAN, 1).is_err());
        assert!(decompose_flux(1.0, 0).is_err());
    }

    fn cfg(case: CaseTag, f0: Potential, f1: Potential, f2: RadialProfile) -> FieldConfig {
        FieldConfig {
            flux: decompose_flux(1.5, -1).unwrap(),
            f0,
            f1,
            f2,
            case_tag: case,
        }
    }

    #[test]
    fn subcase2_fields_at_r2() {
        let (alpha, gamma) = (0.7, 1.3);
        let c = cfg(
            CaseTag::I2,
            Potential::Radial(RadialProfile::Zero),
            Potential::Radial(RadialProfile::InverseR { alpha }),
            RadialProfile::Linear { gamma },
        );
        let f = eval_cyl_fields(&c, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(f.e_r, 0.0);
        assert_eq!(f.e_z, 0.0);
        assert!((f.h_phi + alpha / 4.0).abs() < 1e-15);
        assert!((f.h_z - gamma / 2.0).abs() < 1e-15);
        assert!(eval_cyl_fields(&c, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn lightfront_field_is_pulse_slope() {
        let c = 0.8;
        let lf = Potential::Axial(AxialProfile::Lightfront(Pulse::Linear { alpha: c }));
        let conf = cfg(CaseTag::II, lf.clone(), lf, RadialProfile::Linear { gamma: 1.0 });
        let f = eval_cyl_fields(&conf, 1.7, 0.3, 2.0).unwrap();
        assert!((f.e_z - c).abs() < 1e-15);
        assert!((f.h_z - 1.0 / 1.7).abs() < 1e-15);
    }

    #[test]
    fn boost_field_is_twice_slope() {
        let b = Potential::Axial(AxialProfile::BoostSqrt { alpha: 0.6 });
        let conf = cfg(CaseTag::II, b.clone(), b, RadialProfile::Linear { gamma: 1.0 });
        let (z, x0) = (0.4, 1.9);
        let xib = x0 * x0 - z * z;
        let f = eval_cyl_fields(&conf, 1.0, z, x0).unwrap();
        assert!((f.e_z - 2.0 * 0.6 / (2.0 * xib.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn spherical_fields() {
        let c = cfg(
            CaseTag::Spherical,
            Potential::Radial(RadialProfile::InverseR { alpha: 1.2 }),
            Potential::Polar(PolarProfile::Linear { alpha: 0.9, beta: 0.1 }),
            RadialProfile::Zero,
        );
        let f = eval_sph_fields(&c, 2.0, 1.0).unwrap();
        assert!((f.e_r - 1.2 / 4.0).abs() < 1e-15);
        let f = eval_sph_fields(&c, 1.0, 0.4).unwrap();
        assert!((f.h_r + 0.9).abs() < 1e-15);
        assert!(eval_sph_fields(&c, 1.0, 0.0).is_err());
        let p = c.params(1.0).unwrap();
        assert_eq!((p.gamma, p.alpha, p.beta), (1.2, 0.9, 0.1));
    }

    #[test]
    fn validation_rejects_wrong_patterns() {
        let bad = cfg(
            CaseTag::I1,
            Potential::Radial(RadialProfile::InverseR { alpha: 0.3 }),
            Potential::Radial(RadialProfile::InverseR { alpha: 0.3 }),
            RadialProfile::Linear { gamma: 1.0 },
        );
        match validate_config(&bad) {
            Err(FieldError::UnsupportedConfiguration { nearest, .. }) => assert!(nearest.contains("I.1")),
            other => panic!("{other:?}"),
        }
        let eps = cfg(
            CaseTag::I3a,
            Potential::Radial(RadialProfile::InverseRPlusInverseR2 { alpha: 0.3, beta: 0.2 }),
            Potential::Radial(RadialProfile::InverseRPlusInverseR2 { alpha: -0.3, beta: -0.2 }),
            RadialProfile::Linear { gamma: 1.0 },
        );
        assert_eq!(eps.params(1.0).unwrap().epsilon, -1.0);
        let mismatch = cfg(
            CaseTag::I3a,
            Potential::Radial(RadialProfile::InverseRPlusInverseR2 { alpha: 0.3, beta: 0.2 }),
            Potential::Radial(RadialProfile::InverseRPlusInverseR2 { alpha: 0.3, beta: 0.1 }),
            RadialProfile::Linear { gamma: 1.0 },
        );
        assert!(validate_config(&mismatch).is_err());
    }

    #[test]
    fn schrodinger_a_trivial_lambda_delta_accepted() {
        let c = cfg(
            CaseTag::SchrodingerA,
            Potential::Radial(RadialProfile::SchrodingerAScalar {
                alpha: 0.2,
                beta: 0.4,
                delta: 0.0,
                lambda: 0.0,
                mass: 1.0,
            }),
            Potential::Radial(RadialProfile::InverseR { alpha: 0.4 }),
            RadialProfile::Linear { gamma: 1.0 },
        );
        let p = c.params(1.0).unwrap();
        assert_eq!((p.alpha, p.beta, p.delta, p.lambda), (0.2, 0.4, 0.0, 0.0));
    }

    #[test]
    fn parse_roundtrip_and_unknown_keys() {
        let text = r#"
flux_quanta = 1.5
charge_sign = -1
case_tag = "II"
[f0]
shape = "zero"
[f1]
shape = "tanh_t"
coeffs = { alpha = 0.5, beta = 2.0 }
[f2]
shape = "linear"
coeffs = { gamma = 1.0 }
[particle]
equation = "dirac"
mass = 1.0
"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.field.case_tag, CaseTag::II);
        assert_eq!(c.particle.equation, Equation::Dirac);
        assert!(matches!(
            c.field.f1,
            Potential::Axial(AxialProfile::OfTime(Pulse::Tanh { .. }))
        ));
        let extra = text.replace("case_tag", "colour = 1\ncase_tag");
        assert!(parse_config(&extra).is_err());
        let badcoef = text.replace("beta = 2.0", "gamma = 2.0");
        match parse_config(&badcoef) {
            Err(FieldError::Config { field, .. }) => assert!(field.starts_with("f1.coeffs")),
            other => panic!("{other:?}"),
        }
    }
}
