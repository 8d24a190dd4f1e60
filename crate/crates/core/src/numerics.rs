//! Small numerical building blocks shared by the field, wavefunction and
//! oracle code: adaptive Gauss–Kronrod quadrature, a natural cubic spline,
//! bisection and central difference stencils.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (estimate {err:e})")]
    QuadratureFailed { a: f64, b: f64, tol: f64, err: f64 },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
    #[error("spline needs at least 3 strictly increasing abscissae")]
    BadTable,
    #[error("x = {x} lies outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("no sign change in [{0}, {1}]")]
    NoBracket(f64, f64),
}

// G7-K15 nodes and weights (QUADPACK qk15)
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
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default absolute tolerance for phase integrals.
pub const QUAD_TOL: f64 = 1e-12;

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64), NumericsError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(NumericsError::NonFinite(c));
    }
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        if !f1.is_finite() {
            return Err(NumericsError::NonFinite(c - dx));
        }
        if !f2.is_finite() {
            return Err(NumericsError::NonFinite(c + dx));
        }
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Ok((kron * h, ((kron - gauss) * h).norm()))
}

/// Adaptive G7K15 integration of a complex integrand with absolute tolerance.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64, NumericsError> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut panels = vec![(a, b, gk15(&f, a, b)?)];
    for _ in 0..2000 {
        let total_err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.2 .0).sum());
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        panels.push((lo, mid, gk15(&f, lo, mid)?));
        panels.push((mid, hi, gk15(&f, mid, hi)?));
    }
    let err: f64 = panels.iter().map(|p| p.2 .1).sum();
    Err(NumericsError::QuadratureFailed { a, b, tol, err })
}

/// Real-valued wrapper around [`integrate_complex`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumericsError> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).map(|v| v.re)
}

/// Natural cubic spline through tabulated points. Evaluation outside the
/// table is an error; there is no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, NumericsError> {
        let n = xs.len();
        if n < 3 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::BadTable);
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(NumericsError::BadTable);
        }
        // tridiagonal solve for the second derivatives, natural ends
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { xs, ys, m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn locate(&self, x: f64) -> Result<usize, NumericsError> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(NumericsError::OutOfRange { x, lo, hi });
        }
        let i = self.xs.partition_point(|&v| v <= x);
        Ok(i.clamp(1, self.xs.len() - 1) - 1)
    }

    pub fn value(&self, x: f64) -> Result<f64, NumericsError> {
        let i = self.locate(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok(a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0)
    }

    pub fn derivative(&self, x: f64) -> Result<f64, NumericsError> {
        let i = self.locate(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok((self.ys[i + 1] - self.ys[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0)
    }
}

/// Bisection on a sign change of `f`, down to `xtol` or exact zero.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
) -> Result<f64, NumericsError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(NumericsError::NoBracket(lo, hi));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Illinois-modified regula falsi on a sign change of `f`; converges
/// superlinearly on smooth functions and never leaves the bracket.
pub fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> Result<f64, NumericsError> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(NumericsError::NoBracket(a, b));
    }
    let mut side = 0i8;
    let mut prev = f64::NAN;
    for _ in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        if (c - prev).abs() <= xtol {
            return Ok(c);
        }
        prev = c;
        let fc = f(c);
        if fc == 0.0 || fc.is_nan() {
            return if fc == 0.0 { Ok(c) } else { Err(NumericsError::NoBracket(a, b)) };
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= xtol {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Five-point central first derivative.
pub fn d1<F: Fn(f64) -> Complex64>(f: &F, x: f64, h: f64) -> Complex64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Five-point central second derivative.
pub fn d2<F: Fn(f64) -> Complex64>(f: &F, x: f64, h: f64) -> Complex64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_root_matches_bisection() {
        let f = |x: f64| x.cos() - x;
        let a = find_root(f, 0.0, 1.0, 1e-15).unwrap();
        let b = bisect(f, 0.0, 1.0, 1e-15).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(find_root(f, 2.0, 3.0, 1e-12).is_err());
        let cubic = |x: f64| (x - 0.3).powi(3);
        assert!((find_root(cubic, -1.0, 2.0, 1e-12).unwrap() - 0.3).abs() < 1e-4);
    }

    #[test]
    fn gk_integrates_smooth_functions() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-13).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // reversed limits flip the sign
        let v = integrate(|x| x * x, 2.0, 0.0, 1e-13).unwrap();
        assert!((v + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gk_handles_endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gk_reports_nonfinite() {
        assert!(integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn spline_reproduces_cubic_interior_and_forbids_extrapolation() {
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(xs, ys).unwrap();
        assert!((s.value(1.234).unwrap() - 1.234f64.sin()).abs() < 1e-5);
        assert!((s.derivative(2.05).unwrap() - 2.05f64.cos()).abs() < 1e-4);
        assert!(s.value(4.0).is_ok());
        assert!(matches!(s.value(4.01), Err(NumericsError::OutOfRange { .. })));
        assert!(CubicSpline::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn stencils() {
        let f = |x: f64| Complex64::new(x.exp(), 0.0);
        assert!((d1(&f, 0.3, 1e-3).re - 0.3f64.exp()).abs() < 1e-11);
        assert!((d2(&f, 0.3, 1e-3).re - 0.3f64.exp()).abs() < 1e-8);
    }
}
