//! Gamma function, Kummer's confluent hypergeometric function Φ(a, b; x),
//! the Laguerre functions I_{p,n}(x) and Laguerre polynomials.
//!
//! Everything works on complex arguments. Real callers can pass `f64`
//! directly since the entry points accept `impl Into<Complex64>`.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Alias used across the crate for complex samples.
pub type ComplexValue = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("pole of the gamma function at z = {0}")]
    PoleError(Complex64),
    #[error("parameter pole: b = {0} is a non-positive integer")]
    ParameterPole(Complex64),
    #[error("series or asymptotic expansion did not converge for a = {a}, b = {b}, x = {x}")]
    NoConvergence {
        a: Complex64,
        b: Complex64,
        x: Complex64,
    },
    #[error("function is singular at x = 0 (exponent {0})")]
    Singular(Complex64),
    #[error("derivative order {0} not supported (use 1 or 2)")]
    BadOrder(u32),
}

pub type Result<T> = std::result::Result<T, SpecialFnError>;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Series cut-over radius. Beyond it the asymptotic expansion is tried first.
const SERIES_RADIUS: f64 = 30.0;
const MAX_TERMS: usize = 20_000;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn nonneg_integer(z: Complex64) -> Option<u64> {
    if z.im == 0.0 && z.re >= 0.0 && z.re == z.re.round() && z.re < 1e15 {
        Some(z.re as u64)
    } else {
        None
    }
}

/// sin(πx) and cos(πx) for real x with exact reduction of the argument.
fn sincos_pi(x: f64) -> (f64, f64) {
    let n = (2.0 * x).round();
    let f = x - 0.5 * n;
    let (s, c) = (PI * f).sin_cos();
    match (n.rem_euclid(4.0)) as i64 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = sincos_pi(z.re);
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

fn lanczos_sum(zm1: Complex64) -> Complex64 {
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (zm1 + i as f64);
    }
    x
}

/// Γ(z) for complex z.
pub fn gamma_fn(z: impl Into<Complex64>) -> Result<Complex64> {
    let z = z.into();
    if is_nonpositive_integer(z) {
        return Err(SpecialFnError::PoleError(z));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = sin_pi(z);
        return PI / (s * gamma_unchecked(1.0 - z));
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    let lg = LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t;
    lg.exp() * lanczos_sum(zm1)
}

/// 1/Γ(z); zero at the poles of Γ.
pub fn rgamma(z: impl Into<Complex64>) -> Complex64 {
    let z = z.into();
    if is_nonpositive_integer(z) {
        Complex64::new(0.0, 0.0)
    } else {
        1.0 / gamma_unchecked(z)
    }
}

/// ln Γ(z) on some branch; only the value modulo 2πi is meaningful.
pub fn ln_gamma(z: impl Into<Complex64>) -> Result<Complex64> {
    let z = z.into();
    if is_nonpositive_integer(z) {
        return Err(SpecialFnError::PoleError(z));
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return PI.ln() - sin_pi(z).ln() - ln_gamma_unchecked(1.0 - z);
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + lanczos_sum(zm1).ln()
}

/// Compensated (Neumaier) accumulator for complex sums.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier_step(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier_step(self.sum.im, v.im, &mut self.comp.im);
    }
    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier_step(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

fn terminating_sum(n: u64, a: Complex64, b: Complex64, x: Complex64) -> Complex64 {
    let mut acc = Neumaier::default();
    let mut term = Complex64::new(1.0, 0.0);
    acc.add(term);
    for k in 0..n {
        let kf = k as f64;
        term = term * (a + kf) / (b + kf) * x / (kf + 1.0);
        acc.add(term);
    }
    acc.value()
}

/// Power series; returns the sum and the largest term modulus.
fn power_series(a: Complex64, b: Complex64, x: Complex64) -> Option<(Complex64, f64)> {
    let mut acc = Neumaier::default();
    let mut term = Complex64::new(1.0, 0.0);
    let mut biggest = 1.0_f64;
    acc.add(term);
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term = term * (a + kf) / (b + kf) * x / (kf + 1.0);
        acc.add(term);
        let t = term.norm();
        biggest = biggest.max(t);
        if !t.is_finite() {
            return None;
        }
        // only stop once the ratio has settled below one
        if kf > (a.norm() + x.norm()) && t <= 1e-17 * acc.value().norm() {
            quiet += 1;
            if quiet >= 3 {
                return Some((acc.value(), biggest));
            }
        } else {
            quiet = 0;
        }
    }
    None
}

/// Two-term large-|x| expansion (DLMF 13.7.2 with Γ(b) restored).
fn asymptotic(a: Complex64, b: Complex64, x: Complex64) -> Option<Complex64> {
    let s1 = asymptotic_tail(b - a, 1.0 - a, x)?;
    let s2 = asymptotic_tail(a, a - b + 1.0, -x)?;
    let lgb = ln_gamma_unchecked(b);
    let first = if is_nonpositive_integer(a) {
        Complex64::new(0.0, 0.0)
    } else {
        (lgb - ln_gamma_unchecked(a) + x + (a - b) * x.ln()).exp() * s1
    };
    let second = if is_nonpositive_integer(b - a) {
        Complex64::new(0.0, 0.0)
    } else {
        // on the positive real axis take the real (averaged) Stokes factor
        let phase = if x.im == 0.0 && x.re > 0.0 {
            Complex64::new(sincos_pi(a.re).1, 0.0) * Complex64::new(0.0, PI * a.im).exp()
        } else {
            let sign = if x.im >= 0.0 { 1.0 } else { -1.0 };
            (Complex64::new(0.0, sign * PI) * a).exp()
        };
        (lgb - ln_gamma_unchecked(b - a) - a * x.ln()).exp() * phase * s2
    };
    let v = first + second;
    v.is_finite().then_some(v)
}

fn asymptotic_tail(c: Complex64, d: Complex64, x: Complex64) -> Option<Complex64> {
    let mut acc = Neumaier::default();
    let mut term = Complex64::new(1.0, 0.0);
    acc.add(term);
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let kf = k as f64;
        let next = term * (c + kf) * (d + kf) / ((kf + 1.0) * x);
        let t = next.norm();
        if t == 0.0 {
            return Some(acc.value());
        }
        if t > last {
            // divergent tail: accept only if already at roundoff
            return (last <= 1e-15 * acc.value().norm()).then(|| acc.value());
        }
        acc.add(next);
        term = next;
        last = t;
        if t <= 1e-17 * acc.value().norm() {
            return Some(acc.value());
        }
    }
    None
}

/// Kummer's function Φ(a, b; x) = ₁F₁(a; b; x).
pub fn kummer(
    a: impl Into<Complex64>,
    b: impl Into<Complex64>,
    x: impl Into<Complex64>,
) -> Result<Complex64> {
    let (a, b, x) = (a.into(), b.into(), x.into());
    if is_nonpositive_integer(b) {
        return Err(SpecialFnError::ParameterPole(b));
    }
    if x == Complex64::new(0.0, 0.0) || a == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if let Some(n) = nonneg_integer(-a) {
        return Ok(terminating_sum(n, a, b, x));
    }
    if x.re < 0.0 {
        // Kummer transformation keeps the series free of cancellation
        if let Some(n) = nonneg_integer(a - b) {
            return Ok(x.exp() * terminating_sum(n, b - a, b, -x));
        }
        return Ok(x.exp() * kummer_nonterminating(b - a, b, -x)?);
    }
    kummer_nonterminating(a, b, x)
}

fn kummer_nonterminating(a: Complex64, b: Complex64, x: Complex64) -> Result<Complex64> {
    let fail = || SpecialFnError::NoConvergence { a, b, x };
    if x.norm() <= SERIES_RADIUS {
        let (v, _) = power_series(a, b, x).ok_or_else(fail)?;
        return Ok(v);
    }
    if let Some(v) = asymptotic(a, b, x) {
        return Ok(v);
    }
    let (v, biggest) = power_series(a, b, x).ok_or_else(fail)?;
    if biggest > 1e6 * v.norm() {
        return Err(fail());
    }
    Ok(v)
}

/// dᵏΦ/dxᵏ for k ∈ {1, 2} via Φ'(a,b;x) = (a/b) Φ(a+1,b+1;x).
pub fn kummer_derivative(
    a: impl Into<Complex64>,
    b: impl Into<Complex64>,
    x: impl Into<Complex64>,
    order: u32,
) -> Result<Complex64> {
    let (a, b, x) = (a.into(), b.into(), x.into());
    if is_nonpositive_integer(b) {
        return Err(SpecialFnError::ParameterPole(b));
    }
    match order {
        1 => {
            if a == Complex64::new(0.0, 0.0) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(a / b * kummer(a + 1.0, b + 1.0, x)?)
        }
        2 => {
            let c = a * (a + 1.0);
            if c == Complex64::new(0.0, 0.0) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(c / (b * (b + 1.0)) * kummer(a + 2.0, b + 2.0, x)?)
        }
        k => Err(SpecialFnError::BadOrder(k)),
    }
}

/// Principal value of √(Γ(1+p)/Γ(1+n)) / Γ(1+p−n), in log form.
/// Returns `None` when n is a negative integer, where the function vanishes.
fn ln_prefactor(p: Complex64, n: Complex64) -> Result<Option<Complex64>> {
    if is_nonpositive_integer(1.0 + p) {
        return Err(SpecialFnError::PoleError(1.0 + p));
    }
    if is_nonpositive_integer(1.0 + p - n) {
        return Err(SpecialFnError::PoleError(1.0 + p - n));
    }
    if is_nonpositive_integer(1.0 + n) {
        return Ok(None);
    }
    let mut lr = ln_gamma_unchecked(1.0 + p) - ln_gamma_unchecked(1.0 + n);
    lr.im = reduce_angle(lr.im);
    Ok(Some(0.5 * lr - ln_gamma_unchecked(1.0 + p - n)))
}

fn reduce_angle(t: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = t - two_pi * (t / two_pi).round();
    if r <= -PI {
        r += two_pi;
    }
    r
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Laguerre function
/// I_{p,n}(x) = √(Γ(1+p)/Γ(1+n)) e^{−x/2} x^{(p−n)/2} Φ(−n, p−n+1; x) / Γ(1+p−n).
///
/// Principal branches throughout. For n a negative integer the function is
/// identically zero because 1/Γ(1+n) vanishes.
pub fn laguerre_i(
    p: impl Into<Complex64>,
    n: impl Into<Complex64>,
    x: impl Into<Complex64>,
) -> Result<Complex64> {
    let (p, n, x) = (p.into(), n.into(), x.into());
    let Some(lpre) = ln_prefactor(p, n)? else {
        return Ok(zero());
    };
    let nu = 0.5 * (p - n);
    let phi = kummer(-n, p - n + 1.0, x)?;
    if x == zero() {
        return at_origin(lpre, nu, phi);
    }
    Ok((lpre - 0.5 * x + nu * x.ln()).exp() * phi)
}

fn at_origin(lpre: Complex64, nu: Complex64, value: Complex64) -> Result<Complex64> {
    if nu == zero() {
        Ok(lpre.exp() * value)
    } else if nu.re > 0.0 {
        Ok(zero())
    } else {
        Err(SpecialFnError::Singular(nu))
    }
}

/// dI_{p,n}/dx by the product rule.
pub fn laguerre_i_derivative(
    p: impl Into<Complex64>,
    n: impl Into<Complex64>,
    x: impl Into<Complex64>,
) -> Result<Complex64> {
    let (p, n, x) = (p.into(), n.into(), x.into());
    let Some(lpre) = ln_prefactor(p, n)? else {
        return Ok(zero());
    };
    let nu = 0.5 * (p - n);
    let a = -n;
    let b = p - n + 1.0;
    let phi = kummer(a, b, x)?;
    let dphi = kummer_derivative(a, b, x, 1)?;
    if x == zero() {
        // x^{ν-1} ν Φ term only survives for ν = 0 or ν = 1
        if nu == zero() {
            return Ok(lpre.exp() * (dphi - 0.5 * phi));
        }
        if nu == Complex64::new(1.0, 0.0) {
            return Ok(lpre.exp() * phi);
        }
        return if nu.re > 1.0 {
            Ok(zero())
        } else {
            Err(SpecialFnError::Singular(nu - 1.0))
        };
    }
    let pre = (lpre - 0.5 * x + nu * x.ln()).exp();
    Ok(pre * ((nu / x - 0.5) * phi + dphi))
}

/// Generalized Laguerre polynomial L_n^α(x) by the three-term recurrence.
pub fn laguerre_poly(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
