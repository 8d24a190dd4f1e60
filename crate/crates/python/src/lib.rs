//! Python bindings: flux decomposition, field configs, closed-form spectra,
//! radial solutions, special functions and the numerical oracles.

use std::collections::HashMap;

use abflux::fields::{self, ConfigFile, Equation, FieldValues, RadialProfile};
use abflux::oracle;
use abflux::spectra::{self, LaguerreIndices, SpectralResult, Variant};
use abflux::special_fn;
use abflux::wavefunctions::{self as wf, RadialCase};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn equation(name: &str) -> PyResult<Equation> {
    match name {
        "dirac" => Ok(Equation::Dirac),
        "klein_gordon" | "kg" => Ok(Equation::KleinGordon),
        "schrodinger" => Ok(Equation::Schrodinger),
        other => Err(PyValueError::new_err(format!("unknown equation {other:?}"))),
    }
}

fn equation_name(eq: Equation) -> &'static str {
    match eq {
        Equation::Dirac => "dirac",
        Equation::KleinGordon => "klein_gordon",
        Equation::Schrodinger => "schrodinger",
    }
}

fn variant(name: &str) -> PyResult<Variant> {
    match name {
        "a" | "A" => Ok(Variant::A),
        "b" | "B" => Ok(Variant::B),
        other => Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    }
}

#[pyclass(name = "FieldParams", skip_from_py_object)]
#[derive(Clone)]
struct PyFieldParams {
    inner: fields::FieldParams,
}

#[pymethods]
impl PyFieldParams {
    #[new]
    #[pyo3(signature = (*, mu=0.5, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0, lambda_=0.0, epsilon=1.0, mass=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(mu: f64, alpha: f64, beta: f64, gamma: f64, delta: f64, lambda_: f64, epsilon: f64, mass: f64) -> Self {
        PyFieldParams {
            inner: fields::FieldParams { mu, alpha, beta, gamma, delta, lambda: lambda_, epsilon, mass },
        }
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter(lambda_)]
    fn lambda(&self) -> f64 {
        self.inner.lambda
    }
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "FieldParams(mu={}, alpha={}, beta={}, gamma={}, delta={}, lambda_={}, epsilon={}, mass={})",
            p.mu, p.alpha, p.beta, p.gamma, p.delta, p.lambda, p.epsilon, p.mass
        )
    }
}

#[pyclass(name = "QuantumNumbers", skip_from_py_object)]
#[derive(Clone)]
struct PyQuantumNumbers {
    inner: spectra::QuantumNumbers,
}

#[pymethods]
impl PyQuantumNumbers {
    #[new]
    #[pyo3(signature = (equation, l, n, *, k3=0.0, zeta=1, nu=1))]
    fn new(equation: &str, l: i64, n: u32, k3: f64, zeta: i8, nu: i8) -> PyResult<Self> {
        if zeta.abs() != 1 || nu.abs() > 1 {
            return Err(PyValueError::new_err("zeta must be ±1 and nu in {-1, 0, 1}"));
        }
        let mut inner = spectra::QuantumNumbers::new(self::equation(equation)?, l, n).with_k3(k3).with_zeta(zeta);
        inner.nu = nu;
        Ok(PyQuantumNumbers { inner })
    }

    #[getter]
    fn equation(&self) -> &'static str {
        equation_name(self.inner.equation)
    }
    #[getter]
    fn l(&self) -> i64 {
        self.inner.l
    }
    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }
    #[getter]
    fn k3(&self) -> f64 {
        self.inner.k3
    }
    #[getter]
    fn zeta(&self) -> i8 {
        self.inner.zeta
    }
    #[getter]
    fn nu(&self) -> i8 {
        self.inner.nu
    }

    fn __repr__(&self) -> String {
        let q = &self.inner;
        format!(
            "QuantumNumbers({:?}, l={}, n={}, k3={}, zeta={}, nu={})",
            equation_name(q.equation),
            q.l,
            q.n,
            q.k3,
            q.zeta,
            q.nu
        )
    }
}

/// A closed-form level.
#[pyclass(name = "Level", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLevel {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    scale: f64,
    #[pyo3(get)]
    tau: f64,
    #[pyo3(get)]
    flags: Vec<String>,
    /// (s, p_s, n_s) per radial component
    #[pyo3(get)]
    indices: Vec<(u8, f64, f64)>,
    #[pyo3(get)]
    negative_branch: Option<f64>,
}

#[pymethods]
impl PyLevel {
    fn __repr__(&self) -> String {
        format!("Level(value={}, scale={}, flags={:?})", self.value, self.scale, self.flags)
    }
}

fn indices(ix: &[LaguerreIndices]) -> Vec<(u8, f64, f64)> {
    ix.iter().map(|i| (i.s, i.p, i.n)).collect()
}

impl From<SpectralResult> for PyLevel {
    fn from(r: SpectralResult) -> Self {
        PyLevel {
            value: r.k0,
            scale: r.scale,
            tau: r.tau,
            flags: r.flags.iter().map(|f| format!("{f:?}")).collect(),
            indices: indices(&r.indices),
            negative_branch: r.negative_branch,
        }
    }
}

/// A parsed and validated TOML field configuration.
#[pyclass(name = "FieldConfig", frozen, skip_from_py_object)]
struct PyFieldConfig {
    inner: ConfigFile,
}

fn values(v: FieldValues) -> HashMap<&'static str, f64> {
    HashMap::from([
        ("e_r", v.e_r),
        ("e_phi", v.e_phi),
        ("e_z", v.e_z),
        ("h_r", v.h_r),
        ("h_phi", v.h_phi),
        ("h_z", v.h_z),
    ])
}

#[pymethods]
impl PyFieldConfig {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(PyFieldConfig { inner: fields::parse_config(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(err)?;
        Self::from_toml(&text)
    }

    #[getter]
    fn case_tag(&self) -> String {
        self.inner.field.case_tag.to_string()
    }
    #[getter]
    fn l0(&self) -> i64 {
        self.inner.field.flux.l0
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.field.flux.mu
    }
    #[getter]
    fn equation(&self) -> &'static str {
        equation_name(self.inner.particle.equation)
    }

    /// Parameters with the particle mass from the config.
    fn params(&self) -> PyResult<PyFieldParams> {
        Ok(PyFieldParams { inner: self.inner.field.params(self.inner.particle.mass).map_err(err)? })
    }

    fn eval_cyl(&self, r: f64, z: f64, x0: f64) -> PyResult<HashMap<&'static str, f64>> {
        Ok(values(fields::eval_cyl_fields(&self.inner.field, r, z, x0).map_err(err)?))
    }

    fn eval_sph(&self, r: f64, theta: f64) -> PyResult<HashMap<&'static str, f64>> {
        Ok(values(fields::eval_sph_fields(&self.inner.field, r, theta).map_err(err)?))
    }
}

/// (l0, mu) with flux = −charge_sign·(l0 + mu), 0 ≤ mu < 1.
#[pyfunction]
fn decompose_flux(flux_quanta: f64, charge_sign: i8) -> PyResult<(i64, f64)> {
    let d = fields::decompose_flux(flux_quanta, charge_sign).map_err(err)?;
    Ok((d.l0, d.mu))
}

#[pyfunction]
fn kummer(a: Complex64, b: Complex64, x: Complex64) -> PyResult<Complex64> {
    special_fn::kummer(a, b, x).map_err(err)
}

#[pyfunction]
fn laguerre_i(p: Complex64, n: Complex64, x: Complex64) -> PyResult<Complex64> {
    special_fn::laguerre_i(p, n, x).map_err(err)
}

#[pyfunction]
fn gamma(z: Complex64) -> PyResult<Complex64> {
    special_fn::gamma_fn(z).map_err(err)
}

#[pyfunction]
fn energy_case1(qn: PyRef<'_, PyQuantumNumbers>, p: PyRef<'_, PyFieldParams>) -> PyResult<PyLevel> {
    Ok(spectra::energy_case1(&qn.inner, &p.inner).map_err(err)?.into())
}

#[pyfunction]
fn energy_case2(qn: PyRef<'_, PyQuantumNumbers>, p: PyRef<'_, PyFieldParams>, tau: f64) -> PyResult<PyLevel> {
    Ok(spectra::energy_case2(&qn.inner, &p.inner, tau).map_err(err)?.into())
}

/// Every root of n_s(k0) = n, largest first.
#[pyfunction]
fn energy_case3(
    qn: PyRef<'_, PyQuantumNumbers>,
    variant: &str,
    p: PyRef<'_, PyFieldParams>,
    s: u8,
) -> PyResult<Vec<PyLevel>> {
    let v = self::variant(variant)?;
    let roots = spectra::energy_case3(&qn.inner, v, &p.inner, s, qn.inner.n as i64).map_err(err)?;
    Ok(roots.into_iter().map(PyLevel::from).collect())
}

/// k⊥² of the longitudinal case; `value` holds k⊥².
#[pyfunction]
fn kperp_case_ii(qn: PyRef<'_, PyQuantumNumbers>, p: PyRef<'_, PyFieldParams>, tau: f64) -> PyResult<PyLevel> {
    let r = spectra::kperp_case_ii(&qn.inner, &p.inner, tau).map_err(err)?;
    Ok(PyLevel {
        value: r.kperp2,
        scale: r.scale,
        tau: r.tau,
        flags: Vec::new(),
        indices: indices(&r.indices),
        negative_branch: None,
    })
}

#[pyfunction]
fn energy_schrodinger_a(qn: PyRef<'_, PyQuantumNumbers>, p: PyRef<'_, PyFieldParams>) -> PyResult<PyLevel> {
    Ok(spectra::energy_schrodinger_a(&qn.inner, &p.inner).map_err(err)?.into())
}

#[pyfunction]
fn energy_schrodinger_b(qn: PyRef<'_, PyQuantumNumbers>, p: PyRef<'_, PyFieldParams>) -> PyResult<PyLevel> {
    Ok(spectra::energy_schrodinger_b(&qn.inner, &p.inner).map_err(err)?.into())
}

fn radial_case(name: &str) -> PyResult<RadialCase> {
    Ok(match name {
        "case1" => RadialCase::Case1,
        "case2" => RadialCase::Case2,
        "case3a" => RadialCase::Case3(Variant::A),
        "case3b" => RadialCase::Case3(Variant::B),
        "case_ii" => RadialCase::CaseII,
        "schrodinger_a" => RadialCase::SchrodingerA,
        "schrodinger_b" => RadialCase::SchrodingerB,
        other => return Err(PyValueError::new_err(format!("unknown case {other:?}"))),
    })
}

/// A·I_{p,n}(x) + B·I_{n,p}(x) of component s at eigenparameter k, on `r`.
#[pyfunction]
#[pyo3(signature = (case, s, qn, p, k, r, a=Complex64::new(1.0, 0.0), b=Complex64::new(0.0, 0.0)))]
#[allow(clippy::too_many_arguments)]
fn radial_v(
    case: &str,
    s: u8,
    qn: PyRef<'_, PyQuantumNumbers>,
    p: PyRef<'_, PyFieldParams>,
    k: f64,
    r: Vec<f64>,
    a: Complex64,
    b: Complex64,
) -> PyResult<Vec<Complex64>> {
    let idx = wf::radial_indices(radial_case(case)?, s, &qn.inner, &p.inner, k).map_err(err)?;
    r.iter().map(|&r| wf::radial_v(&idx, a, b, r).map_err(err)).collect()
}

/// Numerical eigenvalue nearest `guess` for the named case: k0, or k⊥² for
/// "case_ii". Dirac subcases 1 and 2 use the shooting oracle, everything
/// else the finite-difference Sturm oracle for component `s`.
#[pyfunction]
#[pyo3(signature = (case, qn, p, guess, s=0))]
fn oracle_level(
    case: &str,
    qn: PyRef<'_, PyQuantumNumbers>,
    p: PyRef<'_, PyFieldParams>,
    guess: f64,
    s: u8,
) -> PyResult<f64> {
    let (q, p) = (&qn.inner, &p.inner);
    let dirac = q.equation == Equation::Dirac;
    let near = |pr: oracle::RadialProblem, g: f64| oracle::solve_radial_eigen_near(&pr, g).map_err(err);
    match radial_case(case)? {
        RadialCase::Case1 if dirac => oracle::solve_dirac_shooting_near(&oracle::problem_dirac_case1(q, p), guess).map_err(err),
        RadialCase::Case2 if dirac => oracle::solve_dirac_shooting_near(&oracle::problem_dirac_case2(q, p), guess).map_err(err),
        RadialCase::Case1 => near(oracle::problem_kg_case1(q, p), guess),
        RadialCase::Case2 => {
            let k2 = near(oracle::problem_kg_case2(q, p), guess * guess)?;
            Ok(guess.signum() * k2.max(0.0).sqrt())
        }
        RadialCase::Case3(v) => near(oracle::problem_case3(q, v, p, s), guess),
        RadialCase::CaseII => near(oracle::problem_case_ii(q, p, s, RadialProfile::Linear { gamma: p.gamma }), guess),
        RadialCase::SchrodingerA => {
            let f0 = RadialProfile::SchrodingerAScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: p.mass };
            let f1 = RadialProfile::SchrodingerAVector { beta: p.beta, lambda: p.lambda, mass: p.mass };
            near(oracle::problem_schrodinger(q, p, f0, f1, RadialProfile::Linear { gamma: p.gamma }), guess)
        }
        RadialCase::SchrodingerB => {
            let f0 = RadialProfile::SchrodingerBScalar { alpha: p.alpha, beta: p.beta, delta: p.delta, lambda: p.lambda, mass: p.mass };
            let f1 = RadialProfile::SchrodingerBVector { delta: p.delta, lambda: p.lambda, mass: p.mass };
            near(oracle::problem_schrodinger(q, p, f0, f1, RadialProfile::Quadratic { gamma: p.gamma }), guess)
        }
    }
}

#[pymodule(name = "abflux")]
fn abflux_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFieldParams>()?;
    m.add_class::<PyQuantumNumbers>()?;
    m.add_class::<PyLevel>()?;
    m.add_class::<PyFieldConfig>()?;
    m.add_function(wrap_pyfunction!(decompose_flux, m)?)?;
    m.add_function(wrap_pyfunction!(kummer, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre_i, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(energy_case1, m)?)?;
    m.add_function(wrap_pyfunction!(energy_case2, m)?)?;
    m.add_function(wrap_pyfunction!(energy_case3, m)?)?;
    m.add_function(wrap_pyfunction!(kperp_case_ii, m)?)?;
    m.add_function(wrap_pyfunction!(energy_schrodinger_a, m)?)?;
    m.add_function(wrap_pyfunction!(energy_schrodinger_b, m)?)?;
    m.add_function(wrap_pyfunction!(radial_v, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_level, m)?)?;
    Ok(())
}
