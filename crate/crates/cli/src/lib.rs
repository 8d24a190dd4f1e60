//! Spectrum, wavefunction, field and verification jobs over a TOML config,
//! written as '#'-commented CSV.

pub mod model;
pub mod output;

use std::fs;
use std::path::PathBuf;

use abflux::fields::{eval_cyl_fields, eval_sph_fields, parse_config, CaseTag, FieldError};
use abflux::spectra::{SpectraError, SpectralFlag};
use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::json;

pub use model::{rel_delta, Level, Model};
use output::{num, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

/// Process exit code for an error chain: 1 config, 2 verification,
/// 3 the undefined s = 1 index shift.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(CliError::Verification(_)) = cause.downcast_ref::<CliError>() {
            return 2;
        }
        if let Some(SpectraError::UndefinedShift) = cause.downcast_ref::<SpectraError>() {
            return 3;
        }
    }
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Wavefunction,
    Verify,
    Fields,
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_path: Option<PathBuf>,
    pub n: Vec<u32>,
    pub l: Vec<i64>,
    pub grid: (f64, f64, usize),
    pub verify: bool,
    pub tol_residual: f64,
    pub tol_eigen: f64,
    pub inject_fault: f64,
}

impl JobSpec {
    pub fn new(command: Command, config_path: impl Into<PathBuf>) -> Self {
        JobSpec {
            command,
            config_path: config_path.into(),
            output_path: None,
            n: vec![0],
            l: vec![0],
            grid: (0.05, 10.0, 200),
            verify: false,
            tol_residual: 1e-6,
            tol_eigen: 1e-6,
            inject_fault: 0.0,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n.is_empty() {
            return Err(CliError::Config("--n: empty range".into()).into());
        }
        if self.l.is_empty() {
            return Err(CliError::Config("--l: empty range".into()).into());
        }
        let (lo, hi, pts) = self.grid;
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || pts < 2 {
            return Err(CliError::Config(format!("--grid: need 0 < min < max and N >= 2, got {lo}:{hi}:{pts}")).into());
        }
        for (name, t) in [("--tol-residual", self.tol_residual), ("--tol-eigen", self.tol_eigen)] {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("{name}: must be positive")).into());
            }
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(u32, i64)> {
        let mut v: Vec<(u32, i64)> = self.n.iter().flat_map(|&n| self.l.iter().map(move |&l| (n, l))).collect();
        v.sort();
        v.dedup();
        v
    }

    fn radii(&self) -> Vec<f64> {
        let (lo, hi, pts) = self.grid;
        (0..pts).map(|i| lo + (hi - lo) * i as f64 / (pts - 1) as f64).collect()
    }
}

/// "3", "0..3" (inclusive), "-2..2" or "0,2,5".
pub fn parse_range<T>(text: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Copy + Into<i64> + TryFrom<i64>,
{
    let bad = || CliError::Config(format!("range `{text}`: expected N, A..B or a comma list"));
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = text.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        return (a..=b).map(|x| T::try_from(x).map_err(|_| bad().into())).collect();
    }
    text.split(',').map(|t| t.trim().parse::<T>().map_err(|_| bad().into())).collect()
}

/// "MIN:MAX:N".
pub fn parse_grid(text: &str) -> Result<(f64, f64, usize)> {
    let bad = || CliError::Config(format!("--grid `{text}`: expected MIN:MAX:N"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad().into()) };
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

fn load(job: &JobSpec) -> Result<abflux::fields::ConfigFile> {
    let text = fs::read_to_string(&job.config_path)
        .map_err(|e| CliError::Config(format!("{}: {e}", job.config_path.display())))?;
    parse_config(&text).map_err(|e| match e {
        FieldError::Config { .. } | FieldError::UnsupportedConfiguration { .. } => CliError::Config(e.to_string()).into(),
        other => anyhow::Error::from(other).context("config"),
    })
}

fn load_model(job: &JobSpec) -> Result<Model> {
    let mut model = Model::new(load(job)?)?;
    model.fault = job.inject_fault;
    Ok(model)
}

fn echo_header(t: &mut Table, model: &Model, job: &JobSpec) {
    let c = &model.config;
    let p = &model.params;
    t.comment(format!("config = {}", job.config_path.display()));
    t.comment(format!(
        "case = {}, equation = {:?}, mass = {}, k3 = {}, zeta = {}",
        c.field.case_tag, c.particle.equation, c.particle.mass, c.particle.k3, c.particle.zeta
    ));
    t.comment(format!("flux: l0 = {}, mu = {}", c.field.flux.l0, c.field.flux.mu));
    t.comment(format!(
        "alpha = {}, beta = {}, gamma = {}, delta = {}, lambda = {}, epsilon = {}",
        p.alpha, p.beta, p.gamma, p.delta, p.lambda, p.epsilon
    ));
}

/// One spectrum row; `oracle` is filled only when verification was asked for.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub n: u32,
    pub l: i64,
    pub level: Option<Level>,
    pub oracle: Option<f64>,
    pub flag: String,
}

impl SpectrumRow {
    pub fn delta(&self) -> Option<f64> {
        Some(rel_delta(self.level.as_ref()?.value, self.oracle?))
    }
}

fn flag_of(err: &anyhow::Error) -> String {
    let text = match err.downcast_ref::<SpectraError>() {
        Some(e) => format!("{e:?}"),
        None => format!("{err}"),
    };
    let head = text.split(['(', '{', ':']).next().unwrap_or("").trim();
    head.replace([' ', ','], "_")
}

fn forbidden(level: &Level) -> bool {
    level.flags.contains(&SpectralFlag::SpinForbidden)
}

fn spectrum_row(model: &Model, n: u32, l: i64, verify: bool) -> Result<SpectrumRow> {
    let qn = model.quantum_numbers(n, l);
    let level = match model.closed_form(&qn) {
        Ok(level) => level,
        Err(e) => {
            if exit_code(&e) == 3 {
                return Err(e);
            }
            return Ok(SpectrumRow { n, l, level: None, oracle: None, flag: flag_of(&e) });
        }
    };
    let mut flag = level.flags.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>().join("+");
    let mut oracle = None;
    // a spin-forbidden level has no state, so there is nothing to compare
    if verify && !forbidden(&level) {
        match model.oracle(&qn, &level) {
            Ok(v) => oracle = Some(v),
            Err(e) => flag = format!("oracle_{}", flag_of(&e)),
        }
    }
    if flag.is_empty() {
        flag = "ok".into();
    }
    Ok(SpectrumRow { n, l, level: Some(level), oracle, flag })
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub rows: Vec<SpectrumRow>,
    pub csv: String,
}

/// Closed-form levels for every (n, l), with the oracle column when
/// `job.verify` is set. Rows come out ordered by (n, l).
pub fn run_spectrum(job: &JobSpec) -> Result<SpectrumReport> {
    job.check()?;
    let model = load_model(job)?;
    let rows: Vec<SpectrumRow> = job
        .pairs()
        .par_iter()
        .map(|&(n, l)| spectrum_row(&model, n, l, job.verify))
        .collect::<Result<_>>()?;

    let q = model.quantity();
    let mut t = Table::new(vec![
        "n".into(),
        "l".into(),
        "s".into(),
        q.into(),
        "scale".into(),
        "p_s".into(),
        "n_s".into(),
        format!("oracle_{q}"),
        "rel_delta".into(),
        "flag".into(),
    ]);
    t.comment("abflux spectrum");
    echo_header(&mut t, &model, job);
    t.comment(format!("scale is E, E0, sqrt(E) or sqrt(b) depending on the case; rel_delta = |{q} - oracle| / max(|{q}|, 1e-3)"));
    for r in &rows {
        let lv = r.level.as_ref();
        let f = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), num);
        t.row(vec![
            r.n.to_string(),
            r.l.to_string(),
            lv.map_or_else(String::new, |l| l.s.to_string()),
            f(lv.map(|l| l.value)),
            f(lv.map(|l| l.scale)),
            f(lv.map(|l| l.p_s)),
            f(lv.map(|l| l.n_s)),
            f(r.oracle),
            f(r.delta()),
            r.flag.clone(),
        ]);
    }
    let csv = t.render()?;
    output::emit(job.output_path.as_deref(), &csv)?;
    if job.verify {
        let bad: Vec<String> = rows
            .iter()
            .filter(|r| r.level.as_ref().is_some_and(|l| !forbidden(l)) && r.delta().map_or(true, |d| !(d <= job.tol_eigen)))
            .map(|r| format!("(n={}, l={})", r.n, r.l))
            .collect();
        if !bad.is_empty() {
            return Err(CliError::Verification(format!(
                "closed form and oracle differ by more than {:e} at {}",
                job.tol_eigen,
                bad.join(" ")
            ))
            .into());
        }
    }
    Ok(SpectrumReport { rows, csv })
}

/// Radial parts of the assembled state (A = 1, B = 0) on the r grid.
/// Needs exactly one n and one l.
pub fn run_wavefunction(job: &JobSpec) -> Result<String> {
    job.check()?;
    let model = load_model(job)?;
    let pairs = job.pairs();
    let [(n, l)] = pairs[..] else {
        return Err(CliError::Config("wavefunction takes a single --n and a single --l".into()).into());
    };
    let qn = model.quantum_numbers(n, l);
    let level = model.closed_form(&qn)?;
    let x = model.x_of_r(&qn, &level)?;
    let names = model.component_names();
    let mut cols = vec!["r".to_string(), "x".to_string()];
    for c in &names {
        cols.push(format!("re_{c}"));
        cols.push(format!("im_{c}"));
    }
    let mut t = Table::new(cols);
    t.comment("abflux wavefunction");
    echo_header(&mut t, &model, job);
    t.comment(format!(
        "n = {n}, l = {l}, {} = {}, scale = {}, s = {}, p_s = {}, n_s = {}",
        model.quantity(),
        num(level.value),
        num(level.scale),
        level.s,
        num(level.p_s),
        num(level.n_s)
    ));
    t.comment("radial factors only: A = 1, B = 0, phi = z = x0 = 0, not normalized");
    let radii = job.radii();
    let rows: Vec<Vec<String>> = radii
        .par_iter()
        .map(|&r| -> Result<Vec<String>> {
            let comps = model.components(&qn, &level, r)?;
            let mut row = vec![num(r), num(x(r))];
            for c in comps {
                row.push(num(c.re));
                row.push(num(c.im));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for row in rows {
        t.row(row);
    }
    let csv = t.render()?;
    output::emit(job.output_path.as_deref(), &csv)?;
    Ok(csv)
}

/// E and H along r (z = x0 = 0 for cylindrical cases, theta = pi/3 for the
/// spherical one).
pub fn run_fields(job: &JobSpec) -> Result<String> {
    job.check()?;
    let cfg = load(job)?;
    let theta = std::f64::consts::FRAC_PI_3;
    let mut t = Table::new(["r", "e_r", "e_phi", "e_z", "h_r", "h_phi", "h_z"].map(String::from).to_vec());
    t.comment("abflux fields");
    t.comment(format!("config = {}", job.config_path.display()));
    t.comment(format!("case = {}, flux: l0 = {}, mu = {}", cfg.field.case_tag, cfg.field.flux.l0, cfg.field.flux.mu));
    if cfg.field.case_tag == CaseTag::Spherical {
        t.comment(format!("spherical components at theta = {}", num(theta)));
    } else {
        t.comment("cylindrical components at z = 0, x0 = 0");
    }
    for r in job.radii() {
        let v = if cfg.field.case_tag == CaseTag::Spherical {
            eval_sph_fields(&cfg.field, r, theta)?
        } else {
            eval_cyl_fields(&cfg.field, r, 0.0, 0.0)?
        };
        t.row([r, v.e_r, v.e_phi, v.e_z, v.h_r, v.h_phi, v.h_z].map(num).to_vec());
    }
    let csv = t.render()?;
    output::emit(job.output_path.as_deref(), &csv)?;
    Ok(csv)
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub worst_residual: f64,
    pub worst_eigen: f64,
    pub checked: usize,
    pub skipped: Vec<String>,
    pub failures: Vec<String>,
    pub text: String,
    pub summary: serde_json::Value,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

struct Check {
    n: u32,
    l: i64,
    value: f64,
    oracle: Result<f64>,
    residual: Result<f64>,
}

/// Residual and oracle checks for every (n, l). The JSON summary goes to
/// `--out` (or follows the human text on stdout).
pub fn run_verify(job: &JobSpec) -> Result<VerifyReport> {
    job.check()?;
    let model = load_model(job)?;
    let results: Vec<(u32, i64, Result<Check>)> = job
        .pairs()
        .par_iter()
        .map(|&(n, l)| {
            let qn = model.quantum_numbers(n, l);
            let run = || -> Result<Check> {
                let level = model.closed_form(&qn)?;
                if forbidden(&level) {
                    anyhow::bail!("level exists only for the opposite zeta");
                }
                let grid = model.residual_grid(&qn, &level, 40)?;
                Ok(Check {
                    n,
                    l,
                    value: level.value,
                    oracle: model.oracle(&qn, &level),
                    residual: model.residual(&qn, &level, &grid, &|_| 1.0),
                })
            };
            (n, l, run())
        })
        .collect();

    let mut text = String::new();
    let (mut worst_residual, mut worst_eigen) = (0.0f64, 0.0f64);
    let (mut checked, mut skipped, mut failures) = (0usize, Vec::new(), Vec::new());
    for (n, l, res) in results {
        let c = match res {
            Ok(c) => c,
            Err(e) => {
                if exit_code(&e) == 3 {
                    return Err(e.context(format!("n={n} l={l}")));
                }
                text.push_str(&format!("n={n} l={l}: SKIP {e}\n"));
                skipped.push(format!("n={n} l={l}: {e}"));
                continue;
            }
        };
        checked += 1;
        let mut ok = true;
        let eig = match &c.oracle {
            Ok(v) => {
                let d = rel_delta(c.value, *v);
                worst_eigen = worst_eigen.max(d);
                ok &= d <= job.tol_eigen;
                format!("oracle {} rel {:.2e}", num(*v), d)
            }
            Err(e) => {
                ok = false;
                worst_eigen = f64::INFINITY;
                format!("oracle error: {e}")
            }
        };
        let res = match &c.residual {
            Ok(v) => {
                worst_residual = worst_residual.max(*v);
                ok &= *v <= job.tol_residual;
                format!("residual {v:.2e}")
            }
            Err(e) => {
                ok = false;
                worst_residual = f64::INFINITY;
                format!("residual error: {e}")
            }
        };
        let verdict = if ok { "PASS" } else { "FAIL" };
        text.push_str(&format!("n={} l={}: {} {} {eig}, {res} {verdict}\n", c.n, c.l, model.quantity(), num(c.value)));
        if !ok {
            failures.push(format!("n={} l={}", c.n, c.l));
        }
    }
    let status = if failures.is_empty() && checked > 0 { "PASS" } else { "FAIL" };
    text.push_str(&format!(
        "{status}: {checked} checked, {} skipped, worst residual {worst_residual:.3e}, worst eigen mismatch {worst_eigen:.3e}\n",
        skipped.len()
    ));
    let summary = json!({
        "config": job.config_path.display().to_string(),
        "case": model.config.field.case_tag.to_string(),
        "status": status,
        "checked": checked,
        "skipped": skipped.len(),
        "worst_residual": worst_residual,
        "worst_eigen_mismatch": worst_eigen,
        "tol_residual": job.tol_residual,
        "tol_eigen": job.tol_eigen,
        "failures": failures,
    });
    let report = VerifyReport { worst_residual, worst_eigen, checked, skipped, failures, text, summary };
    let json_text = serde_json::to_string_pretty(&report.summary).context("summary")? + "\n";
    match &job.output_path {
        Some(path) => output::emit(Some(path), &json_text)?,
        None => print!("{}{json_text}", report.text),
    }
    if !report.passed() {
        let why = if checked == 0 { "no level could be checked".to_string() } else { report.failures.join(", ") };
        return Err(CliError::Verification(why).into());
    }
    Ok(report)
}
