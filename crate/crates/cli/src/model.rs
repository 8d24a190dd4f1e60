//! Dispatch from a parsed config to the closed forms, the oracle, the
//! radial solutions and their residuals.

use abflux::fields::{CaseTag, ConfigFile, Equation, FieldParams, RadialProfile};
use abflux::oracle::{self, RadialProblem};
use abflux::spectra::{self, QuantumNumbers, SpectralFlag, Variant};
use abflux::wavefunctions::{self as wf, RadialCase};
use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Case1,
    Case2,
    Case3(Variant),
    CaseII,
    SchrodingerA,
    SchrodingerB,
}

/// One closed-form level. `value` is k0, or k⊥² for the longitudinal case.
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub value: f64,
    pub scale: f64,
    pub s: u8,
    pub p_s: f64,
    pub n_s: f64,
    pub flags: Vec<SpectralFlag>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub config: ConfigFile,
    pub params: FieldParams,
    pub family: Family,
    /// relative perturbation of every closed-form value (test hook)
    pub fault: f64,
}

fn c1(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Model {
    pub fn new(config: ConfigFile) -> Result<Model> {
        let eq = config.particle.equation;
        let family = match config.field.case_tag {
            CaseTag::I1 => Family::Case1,
            CaseTag::I2 => Family::Case2,
            CaseTag::I3a => Family::Case3(Variant::A),
            CaseTag::I3b => Family::Case3(Variant::B),
            CaseTag::II => {
                if !matches!(config.field.f2, RadialProfile::Linear { .. }) {
                    return Err(CliError::Config(
                        "f2.shape: the longitudinal spectrum is implemented for f2 = gamma*r only".into(),
                    )
                    .into());
                }
                Family::CaseII
            }
            CaseTag::SchrodingerA => Family::SchrodingerA,
            CaseTag::SchrodingerB => Family::SchrodingerB,
            CaseTag::Spherical => {
                return Err(CliError::Config("case_tag: spherical spectra are not implemented".into()).into())
            }
        };
        let schrodinger = matches!(family, Family::SchrodingerA | Family::SchrodingerB);
        if schrodinger != (eq == Equation::Schrodinger) {
            return Err(CliError::Config(format!(
                "particle.equation: {eq:?} does not fit case {}",
                config.field.case_tag
            ))
            .into());
        }
        let params = config.field.params(config.particle.mass)?;
        Ok(Model { config, params, family, fault: 0.0 })
    }

    pub fn dirac(&self) -> bool {
        self.config.particle.equation == Equation::Dirac
    }

    pub fn quantum_numbers(&self, n: u32, l: i64) -> QuantumNumbers {
        let pt = &self.config.particle;
        let mut qn = QuantumNumbers::new(pt.equation, l, n).with_k3(pt.k3).with_zeta(pt.zeta);
        qn.nu = pt.nu;
        qn
    }

    /// Name of the spectral quantity in the `value` slot.
    pub fn quantity(&self) -> &'static str {
        if self.family == Family::CaseII {
            "kperp2"
        } else {
            "k0"
        }
    }

    fn s_first(&self) -> u8 {
        match (self.family, self.dirac()) {
            (Family::CaseII, true) => 2,
            (_, true) => 1,
            _ => 0,
        }
    }

    fn radial_case(&self) -> RadialCase {
        match self.family {
            Family::Case1 => RadialCase::Case1,
            Family::Case2 => RadialCase::Case2,
            Family::Case3(v) => RadialCase::Case3(v),
            Family::CaseII => RadialCase::CaseII,
            Family::SchrodingerA => RadialCase::SchrodingerA,
            Family::SchrodingerB => RadialCase::SchrodingerB,
        }
    }

    pub fn closed_form(&self, qn: &QuantumNumbers) -> Result<Level> {
        let p = &self.params;
        let s = self.s_first();
        let res = match self.family {
            Family::Case1 => spectra::energy_case1(qn, p)?,
            Family::Case2 => spectra::energy_case2(qn, p, if self.dirac() { 1.0 } else { 0.0 })?,
            Family::Case3(v) => spectra::energy_case3(qn, v, p, s, qn.n as i64)?.swap_remove(0),
            Family::SchrodingerA => spectra::energy_schrodinger_a(qn, p)?,
            Family::SchrodingerB => spectra::energy_schrodinger_b(qn, p)?,
            Family::CaseII => {
                let k = spectra::kperp_case_ii(qn, p, if self.dirac() { 0.5 } else { 0.0 })?;
                let ix = k.indices.iter().find(|ix| ix.s == s);
                return Ok(Level {
                    value: k.kperp2 * (1.0 + self.fault),
                    scale: k.scale,
                    s,
                    p_s: ix.map_or(f64::NAN, |ix| ix.p),
                    n_s: ix.map_or(f64::NAN, |ix| ix.n),
                    flags: Vec::new(),
                });
            }
        };
        let ix = res.indices.iter().find(|ix| ix.s == s).or(res.indices.first());
        Ok(Level {
            value: res.k0 * (1.0 + self.fault),
            scale: res.scale,
            s,
            p_s: ix.map_or(f64::NAN, |ix| ix.p),
            n_s: ix.map_or(f64::NAN, |ix| ix.n),
            flags: res.flags,
        })
    }

    fn radial_problem(&self, qn: &QuantumNumbers, s: u8) -> Result<RadialProblem> {
        let p = &self.params;
        let f = &self.config.field;
        Ok(match self.family {
            Family::Case1 => oracle::problem_kg_case1(qn, p),
            Family::Case2 => oracle::problem_kg_case2(qn, p),
            Family::Case3(v) => oracle::problem_case3(qn, v, p, s),
            Family::CaseII => oracle::problem_case_ii(qn, p, s, f.f2),
            Family::SchrodingerA | Family::SchrodingerB => {
                let f0 = f.f0.radial().ok_or_else(|| anyhow!("f0 is not radial"))?;
                let f1 = f.f1.radial().ok_or_else(|| anyhow!("f1 is not radial"))?;
                oracle::problem_schrodinger(qn, p, f0, f1, f.f2)
            }
        })
    }

    /// Independent numerical value of the level closest to `level`.
    pub fn oracle(&self, qn: &QuantumNumbers, level: &Level) -> Result<f64> {
        let p = &self.params;
        let n = qn.n as usize;
        let indexed = |pr: RadialProblem| -> Result<f64> {
            let rep = oracle::solve_radial_eigen(&pr, n + 1)?;
            rep.eigenvalues
                .get(n)
                .copied()
                .ok_or_else(|| anyhow!("oracle found only {} levels", rep.eigenvalues.len()))
        };
        match (self.family, self.dirac()) {
            (Family::Case1, true) => Ok(oracle::solve_dirac_shooting_near(&oracle::problem_dirac_case1(qn, p), level.value)?),
            (Family::Case2, true) => Ok(oracle::solve_dirac_shooting_near(&oracle::problem_dirac_case2(qn, p), level.value)?),
            (Family::Case2, false) => {
                let k2 = indexed(self.radial_problem(qn, 0)?)?;
                Ok(level.value.signum() * k2.max(0.0).sqrt())
            }
            (Family::Case1, false) | (Family::Case3(_), _) => {
                Ok(oracle::solve_radial_eigen_near(&self.radial_problem(qn, level.s)?, level.value)?)
            }
            _ => indexed(self.radial_problem(qn, level.s)?),
        }
    }

    /// Index sets of the radial factors, lowest s first.
    fn index_sets(&self, qn: &QuantumNumbers, level: &Level) -> Result<Vec<wf::RadialIndexSet>> {
        let ss: &[u8] = match (self.family, self.dirac()) {
            (Family::CaseII, true) => &[1, 2],
            (_, true) => &[1],
            _ => &[0],
        };
        ss.iter()
            .map(|&s| Ok(wf::radial_indices(self.radial_case(), s, qn, &self.params, level.value)?))
            .collect()
    }

    /// x(r) of the leading radial factor.
    pub fn x_of_r(&self, qn: &QuantumNumbers, level: &Level) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        let idx = self.index_sets(qn, level)?.swap_remove(0);
        Ok(Box::new(move |r| idx.x(r)))
    }

    /// Radial parts of every component at r (A = 1, B = 0; no angular or
    /// plane-wave phases).
    pub fn components(&self, qn: &QuantumNumbers, level: &Level, r: f64) -> Result<Vec<Complex64>> {
        let p = &self.params;
        let k = level.value;
        let (one, zero) = (c1(1.0), c1(0.0));
        Ok(match (self.family, self.dirac()) {
            (Family::Case1, true) => wf::case1_components(p, qn, k, one, zero, r)?.to_vec(),
            (Family::Case2, true) => wf::case2_components(p, qn, k, one, zero, r)?.to_vec(),
            (Family::Case3(v), true) => wf::case3_components(p, qn, v, 1, k, one, zero, r)?.to_vec(),
            (Family::SchrodingerA, _) => vec![c1(wf::psi_schrodinger(wf::SchrodingerCase::A, p, qn, r)?)],
            (Family::SchrodingerB, _) => vec![c1(wf::psi_schrodinger(wf::SchrodingerCase::B, p, qn, r)?)],
            _ => self
                .index_sets(qn, level)?
                .iter()
                .map(|idx| Ok(wf::radial_v(idx, one, zero, r)?))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    pub fn component_names(&self) -> Vec<String> {
        let n = match (self.family, self.dirac()) {
            (Family::CaseII, true) => 2,
            (_, true) => 4,
            _ => 1,
        };
        if n == 1 {
            return vec!["psi".into()];
        }
        (1..=n).map(|i| format!("psi{i}")).collect()
    }

    /// A radial grid that covers x from about 0.05 to 15.
    pub fn residual_grid(&self, qn: &QuantumNumbers, level: &Level, points: usize) -> Result<Vec<f64>> {
        let x = self.x_of_r(qn, level)?;
        let mut hi = 1.0;
        let mut guard = 0;
        while x(hi) < 15.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                bail!("x(r) does not grow");
            }
        }
        while x(hi / 2.0) > 15.0 {
            hi /= 2.0;
        }
        let lo = hi * 0.05 / 15.0;
        Ok((0..points).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / points as f64).collect())
    }

    /// Worst normalized residual of the assembled solution in its own
    /// differential equation, with the solution optionally distorted by
    /// `distort(r)` to exercise the check.
    pub fn residual(
        &self,
        qn: &QuantumNumbers,
        level: &Level,
        grid: &[f64],
        distort: &dyn Fn(f64) -> f64,
    ) -> Result<f64> {
        let p = &self.params;
        let k = level.value;
        let f = &self.config.field;
        // a failed evaluation must not be hidden by NaN-ignoring max()
        let failed = std::cell::Cell::new(false);
        let eval = |r: f64| {
            self.components(qn, level, r).unwrap_or_else(|_| {
                failed.set(true);
                vec![c1(0.0); 4]
            })
        };
        if self.dirac() && self.family != Family::CaseII {
            let f0 = f.f0.radial().context("f0 is not radial")?;
            let f1 = f.f1.radial().context("f1 is not radial")?;
            let comps = |r: f64| {
                let c = eval(r);
                let d = distort(r);
                [c[0] * d, c[1] * d, c[2] * d, c[3] * d]
            };
            let res = oracle::residual_dirac_radial(p, qn, k, &f0, &f1, &f.f2, &comps, grid);
            if failed.get() {
                bail!("solution could not be evaluated on the residual grid");
            }
            return Ok(res);
        }
        let mut worst = 0.0f64;
        for (i, s) in self.index_sets(qn, level)?.iter().map(|idx| idx.s).enumerate() {
            let pr = self.radial_problem(qn, s)?;
            let kk = if self.family == Family::Case2 { k * k } else { k };
            let u = |r: f64| (pr.u)(r, kk);
            let v = |r: f64| eval(r)[i] * distort(r);
            worst = worst.max(oracle::residual_second_order(&u, &v, grid));
        }
        if failed.get() || worst.is_nan() {
            bail!("solution could not be evaluated on the residual grid");
        }
        Ok(worst)
    }
}

/// |a − b| relative to |b|, floored at 1e-3 so that levels sitting at zero
/// are compared absolutely.
pub fn rel_delta(closed: f64, numeric: f64) -> f64 {
    (closed - numeric).abs() / closed.abs().max(1e-3)
}
