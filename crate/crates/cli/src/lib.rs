//! Scenario configuration, batch execution and report rendering for the `periods` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use unitary_periods::cache::{Cache, CacheKey, EntryKind, EntryStatus};
use unitary_periods::character::{character_table, conjugacy_classes};
use unitary_periods::field::{all_characters, CharDomain, ExtensionContext};
use unitary_periods::group::{enumerate_unitary_group, unitary_group_order, GroupOps};
use unitary_periods::lparam::{
    consistency_suite, mult_fj_even, mult_fj_odd, mult_linear_gl_e, mult_shalika, packet_census, Census,
    DiscreteParameter, EpsilonData, EtaCharacter, FjEvenReport, MultiplicityReport, Parity, SuiteReport,
};
use unitary_periods::siegel::SiegelData;
use unitary_periods::spaces::{build_space, DiscChoice, Epsilon};
use unitary_periods::verify::{
    build_model, standard_form, verify_jacquet_isomorphism, verify_linear_filtration_full,
    verify_parabolic_filtration, verify_period_transfer, verify_rank_stratification, verify_weil_model,
    SplittingChoice, TransferCell, VerificationReport, VerifyOptions, REPORT_SCHEMA_VERSION,
};
use unitary_periods::SplittingConvention;

// ---------------------------------------------------------------------------
// Configuration

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Weil,
    Jacquet,
    Transfer,
    Stratification,
    Filtration,
}

/// A single index, a list, or `"all"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    One(usize),
    Many(Vec<usize>),
    Named(String),
}

impl Selection {
    fn resolve(&self, available: usize, what: &str) -> Result<Vec<usize>> {
        let picked = match self {
            Selection::One(i) => vec![*i],
            Selection::Many(v) => v.clone(),
            Selection::Named(s) if s == "all" => (0..available).collect(),
            Selection::Named(s) => bail!("{what}: unknown selection `{s}`"),
        };
        if let Some(bad) = picked.iter().find(|&&i| i >= available) {
            bail!("{what}: index {bad} out of range (0..{available})");
        }
        Ok(picked)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    pub kind: JobKind,
    #[serde(default = "one")]
    pub dim_x: usize,
    #[serde(default)]
    pub dim_v: Option<usize>,
    /// Members of the splitting-character family for `V` (default 0).
    #[serde(default)]
    pub chi_v: Option<Selection>,
    #[serde(default)]
    pub chi_w: Option<Selection>,
    /// Exponents of characters of `E^×` for the filtration (default all).
    #[serde(default)]
    pub chi: Option<Selection>,
    #[serde(default)]
    pub convention: SplittingConvention,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultJob {
    /// Parameter file (JSON), relative to the config file.
    #[serde(default)]
    pub file: Option<PathBuf>,
    /// Randomized consistency suite with this many shapes.
    #[serde(default)]
    pub suite_shapes: Option<usize>,
    #[serde(default)]
    pub census: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub p: u32,
    #[serde(default = "one_u32")]
    pub f: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub operator_tolerance: Option<f64>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub verify: Vec<VerifyJob>,
    #[serde(default)]
    pub mult: Vec<MultJob>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn one_u32() -> u32 {
    1
}

impl ScenarioConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).context("invalid config")?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        ScenarioConfig::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 {
            bail!("p = 2 is not supported: the ε-Hermitian theory here needs odd characteristic");
        }
        ExtensionContext::new(self.p, self.f).context("invalid field")?;
        for tol in [self.tolerance, self.operator_tolerance].into_iter().flatten() {
            if !(tol > 0.0 && tol < 1.0) {
                bail!("tolerance {tol} must lie in (0, 1)");
            }
        }
        for (i, job) in self.verify.iter().enumerate() {
            if job.dim_x == 0 {
                bail!("verify job {i}: dim_x must be positive");
            }
            let needs_v = matches!(job.kind, JobKind::Weil | JobKind::Jacquet | JobKind::Transfer);
            match (needs_v, job.dim_v) {
                (true, None) => bail!("verify job {i}: {:?} needs dim_v", job.kind),
                (true, Some(0)) => bail!("verify job {i}: dim_v must be positive"),
                (false, Some(_)) => bail!("verify job {i}: {:?} takes no dim_v", job.kind),
                _ => {}
            }
            if job.kind == JobKind::Transfer && job.dim_x != 1 {
                bail!("verify job {i}: transfer is implemented for dim_x = 1");
            }
        }
        for (i, job) in self.mult.iter().enumerate() {
            if job.file.is_some() == job.suite_shapes.is_some() {
                bail!("mult job {i}: give exactly one of `file` or `suite_shapes`");
            }
        }
        Ok(())
    }

    pub fn options(&self) -> VerifyOptions {
        let mut o = VerifyOptions { seed: self.seed, ..Default::default() };
        if let Some(t) = self.tolerance {
            o.final_tol = t;
        }
        if let Some(t) = self.operator_tolerance {
            o.operator_tol = t;
        }
        o
    }

    /// Cache root from the config, else from the environment.
    pub fn cache(&self) -> Result<Option<Cache>> {
        match &self.cache_dir {
            Some(d) => Ok(Some(Cache::open(self.base_dir.join(d))?)),
            None => Ok(Cache::from_env()?),
        }
    }
}

// ---------------------------------------------------------------------------
// Multiplicity jobs

/// A parameter file: the parameter, a character of its component group and signs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterFile {
    pub parameter: DiscreteParameter,
    /// Signs of η on the basis (default trivial).
    #[serde(default)]
    pub eta: Option<BTreeMap<String, i8>>,
    /// Supplied root numbers for η♭.
    #[serde(default)]
    pub epsilon: Option<BTreeMap<String, i8>>,
    #[serde(default)]
    pub eps_b: Option<i8>,
    #[serde(default)]
    pub eps_v0: Option<i8>,
    #[serde(default)]
    pub eps_v: Option<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultOutput {
    pub file: String,
    pub eta: BTreeMap<String, i8>,
    pub multiplicities: BTreeMap<String, MultiplicityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fj_even: Option<FjEvenReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<Census>,
}

fn run_mult_file(cfg: &ScenarioConfig, file: &Path, with_census: bool) -> Result<MultOutput> {
    let path = cfg.base_dir.join(file);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let pf: ParameterFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let phi = &pf.parameter;
    let group = unitary_periods::lparam::component_group(phi)?;
    let eta = match &pf.eta {
        Some(signs) => EtaCharacter::from_signs(&group, signs)?,
        None => EtaCharacter::trivial(),
    };
    let eps = EpsilonData { signs: pf.epsilon.clone().unwrap_or_default() };
    let mut multiplicities = BTreeMap::new();
    let mut fj_even = None;
    match phi.parity {
        Parity::Even if phi.similitude.is_some() => {
            let signs = pf.eps_b.map(|s| vec![s]).unwrap_or_else(|| vec![1, -1]);
            for s in signs {
                multiplicities.insert(format!("shalika eps_B={s:+}"), mult_shalika(phi, eta, s)?);
            }
            multiplicities.insert("linear".into(), mult_linear_gl_e(phi, eta)?);
            if pf.epsilon.is_some() {
                let r = mult_fj_even(phi, eta, &eps, pf.eps_v0.unwrap_or(1))?;
                multiplicities.insert("fj_even".into(), r.report.clone());
                fj_even = Some(r);
            }
        }
        Parity::Even => bail!("{}: even parameter without a GSp similitude has no applicable formula", file.display()),
        Parity::Odd => {
            let r = mult_fj_odd(phi, eta, pf.eps_v.unwrap_or(1), pf.eps_v0.unwrap_or(1))?;
            multiplicities.insert("fj_odd".into(), r);
        }
    }
    let census = if with_census { Some(packet_census(phi, &eps)?) } else { None };
    Ok(MultOutput {
        file: file.display().to_string(),
        eta: eta.signs(&group),
        multiplicities,
        fj_even,
        census,
    })
}

// ---------------------------------------------------------------------------
// Running

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum JobOutput {
    Verification {
        job: usize,
        report: VerificationReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        cells: Option<Vec<TransferCell>>,
    },
    Multiplicity {
        job: usize,
        output: MultOutput,
    },
    Suite {
        job: usize,
        seed: u64,
        report: SuiteReport,
    },
}

impl JobOutput {
    pub fn passed(&self) -> bool {
        match self {
            JobOutput::Verification { report, .. } => report.passed,
            JobOutput::Multiplicity { .. } => true,
            JobOutput::Suite { report, .. } => report.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub code_version: String,
    pub p: u32,
    pub f: u32,
    pub seed: u64,
    pub jobs: Vec<JobOutput>,
    pub passed: bool,
}

/// One unit of work; jobs expand into several units when they sweep characters.
enum Unit {
    Verify { job: usize, kind: JobKind, dim_x: usize, dim_v: Option<usize>, choice: SplittingChoice, chi: Option<usize> },
    Mult { job: usize, file: PathBuf, census: bool },
    Suite { job: usize, shapes: usize },
}

fn expand(cfg: &ScenarioConfig, ctx: &ExtensionContext) -> Result<Vec<Unit>> {
    let family = q_plus_one(ctx);
    let mut units = Vec::new();
    for (job, v) in cfg.verify.iter().enumerate() {
        let dflt = Selection::One(0);
        let chi_vs = v.chi_v.as_ref().unwrap_or(&dflt).resolve(family, "chi_v")?;
        let chi_ws = v.chi_w.as_ref().unwrap_or(&dflt).resolve(family, "chi_w")?;
        let chis: Vec<Option<usize>> = if v.kind == JobKind::Filtration && v.dim_x == 1 {
            let all = Selection::Named("all".into());
            let n_chars = ctx.unit_order() as usize;
            v.chi.as_ref().unwrap_or(&all).resolve(n_chars, "chi")?.into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        let uses_model = matches!(v.kind, JobKind::Weil | JobKind::Jacquet | JobKind::Transfer);
        let (chi_vs, chi_ws) = if uses_model { (chi_vs, chi_ws) } else { (vec![0], vec![0]) };
        for &cv in &chi_vs {
            for &cw in &chi_ws {
                for &chi in &chis {
                    units.push(Unit::Verify {
                        job,
                        kind: v.kind,
                        dim_x: v.dim_x,
                        dim_v: v.dim_v,
                        choice: SplittingChoice { chi_v: cv, chi_w: cw, convention: v.convention },
                        chi,
                    });
                }
            }
        }
    }
    let offset = cfg.verify.len();
    for (i, m) in cfg.mult.iter().enumerate() {
        let job = offset + i;
        match (&m.file, m.suite_shapes) {
            (Some(f), _) => units.push(Unit::Mult { job, file: f.clone(), census: m.census }),
            (None, Some(shapes)) => units.push(Unit::Suite { job, shapes }),
            _ => unreachable!("validated"),
        }
    }
    Ok(units)
}

fn q_plus_one(ctx: &ExtensionContext) -> usize {
    ctx.q() as usize + 1
}

fn run_unit(cfg: &ScenarioConfig, ctx: &Arc<ExtensionContext>, unit: &Unit) -> Result<JobOutput> {
    let opts = cfg.options();
    match unit {
        Unit::Verify { job, kind, dim_x, dim_v, choice, chi } => {
            let siegel = Arc::new(SiegelData::split(ctx, Epsilon::Skew, *dim_x, opts.bound)?);
            let (report, cells) = match kind {
                JobKind::Weil => {
                    let model = build_model(&siegel, dim_v.unwrap(), *choice)?;
                    (verify_weil_model(&model, &opts)?, None)
                }
                JobKind::Jacquet => {
                    let model = build_model(&siegel, dim_v.unwrap(), *choice)?;
                    (verify_jacquet_isomorphism(&model, &standard_form(*dim_x), &opts)?, None)
                }
                JobKind::Transfer => {
                    let model = build_model(&siegel, dim_v.unwrap(), *choice)?;
                    let (r, c) = verify_period_transfer(&model, &standard_form(*dim_x), &opts)?;
                    (r, Some(c))
                }
                JobKind::Stratification => (verify_rank_stratification(&siegel, &opts)?, None),
                JobKind::Filtration => match chi {
                    Some(k) => {
                        let chi = all_characters(ctx, CharDomain::Units)[*k];
                        (verify_linear_filtration_full(&siegel, &chi, &opts)?, None)
                    }
                    None => (verify_parabolic_filtration(&siegel, &opts)?, None),
                },
            };
            Ok(JobOutput::Verification { job: *job, report, cells })
        }
        Unit::Mult { job, file, census } => {
            Ok(JobOutput::Multiplicity { job: *job, output: run_mult_file(cfg, file, *census)? })
        }
        Unit::Suite { job, shapes } => Ok(JobOutput::Suite {
            job: *job,
            seed: cfg.seed,
            report: consistency_suite(*shapes, cfg.seed)?,
        }),
    }
}

/// Which job lists to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Selected {
    pub verify: bool,
    pub mult: bool,
}

/// Runs the selected jobs in parallel and returns outputs in config order.
pub fn run_scenario(cfg: &ScenarioConfig, which: Selected) -> Result<RunReport> {
    cfg.validate()?;
    let ctx = Arc::new(ExtensionContext::new(cfg.p, cfg.f)?);
    let units: Vec<Unit> = expand(cfg, &ctx)?
        .into_iter()
        .filter(|u| match u {
            Unit::Verify { .. } => which.verify,
            _ => which.mult,
        })
        .collect();
    if let Some(cache) = cfg.cache()? {
        warm_cache(&cache, &ctx, cfg, &units)?;
    }
    let jobs: Vec<JobOutput> = units.par_iter().map(|u| run_unit(cfg, &ctx, u)).collect::<Result<_>>()?;
    let passed = jobs.iter().all(JobOutput::passed);
    Ok(RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        code_version: unitary_periods::cache::CODE_VERSION.to_string(),
        p: cfg.p,
        f: cfg.f,
        seed: cfg.seed,
        jobs,
        passed,
    })
}

/// Stores `U(V)` and its character table for every model dimension in the run.
fn warm_cache(cache: &Cache, ctx: &Arc<ExtensionContext>, cfg: &ScenarioConfig, units: &[Unit]) -> Result<()> {
    let mut dims: Vec<usize> = units
        .iter()
        .filter_map(|u| match u {
            Unit::Verify { dim_v: Some(d), .. } => Some(*d),
            _ => None,
        })
        .collect();
    dims.sort_unstable();
    dims.dedup();
    for d in dims {
        let gk = CacheKey::new(EntryKind::Group, ctx, Epsilon::Hermitian, d, "U(V)");
        let group = match cache.load_group(&gk, ctx).ok().flatten() {
            Some(g) if g.order() as u128 == unitary_group_order(ctx.q() as u64, d as u32) => g,
            _ => {
                let space = build_space(ctx, Epsilon::Hermitian, d, DiscChoice::Split);
                let g = enumerate_unitary_group(&space, cfg.options().bound)?;
                cache.store_group(&gk, &g)?;
                g
            }
        };
        let tk = CacheKey::new(EntryKind::Table, ctx, Epsilon::Hermitian, d, &format!("U(V) seed {}", cfg.seed));
        if cache.load_table(&tk).ok().flatten().is_none() {
            let classes = conjugacy_classes(&group)?;
            cache.store_table(&tk, &character_table(&group, &classes, cfg.seed)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Rendering

pub fn render_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "periods report (schema {}, p = {}, f = {}, seed = {})", report.schema_version, report.p, report.f, report.seed);
    for job in &report.jobs {
        match job {
            JobOutput::Verification { job, report: r, .. } => {
                let params: Vec<String> = r
                    .scenario
                    .iter()
                    .filter(|(k, _)| !matches!(k.as_str(), "p" | "f" | "modulus" | "delta" | "psi_B convention"))
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                let _ = writeln!(out, "\n[job {job}] {} {}", r.kind, params.join(", "));
                let _ = writeln!(out, "  p-adic:       {}", r.padic_statement);
                let _ = writeln!(out, "  finite field: {}", r.finite_statement);
                for c in &r.checks {
                    let mut line = format!("  {} {} [{}]", status(c.passed), c.name, c.citation);
                    if let Some(res) = c.residual {
                        let _ = write!(line, " residual={res:.3e}");
                    }
                    if let (Some(l), Some(rh)) = (c.lhs, c.rhs) {
                        let _ = write!(line, " lhs={l} rhs={rh}");
                    }
                    let _ = writeln!(out, "{line}; {}", c.detail);
                }
            }
            JobOutput::Multiplicity { job, output } => {
                let _ = writeln!(out, "\n[job {job}] multiplicities for {}", output.file);
                for (name, m) in &output.multiplicities {
                    let failed: Vec<&str> =
                        m.conditions.iter().filter(|c| !c.holds).map(|c| c.description.as_str()).collect();
                    let _ = writeln!(
                        out,
                        "  PASS {name} = {} [{}]{}",
                        m.value,
                        m.citations.join("; "),
                        if failed.is_empty() { String::new() } else { format!("; fails: {}", failed.join(", ")) }
                    );
                }
                if let Some(fj) = &output.fj_even {
                    let _ = writeln!(out, "  PASS theta-transfer composition = {} (dichotomy sign {:+})", fj.via_theta, fj.dichotomy_sign);
                }
                if let Some(c) = &output.census {
                    let _ = writeln!(out, "  census: |S| = {}, characters trivial on S^Δ = {}", c.group_order, c.delta_trivial_count);
                }
            }
            JobOutput::Suite { job, seed, report: s } => {
                let _ = writeln!(out, "\n[job {job}] L-parameter consistency suite ({} shapes, seed {seed}, {} evaluations)", s.shapes, s.evaluations);
                let lines = [
                    ("GL(X)-period equals the sum of Shalika multiplicities", s.linear_equals_shalika_sum, s.evaluations),
                    ("even FJ formula equals theta transfer composed with Shalika", s.fj_even_matches_theta, s.evaluations),
                    ("nonzero Shalika multiplicity forces eta(z) = +1", s.support_constraint, s.evaluations),
                    ("characters trivial on S^Δ number 2^|J|", s.delta_trivial_count, s.shapes as u64),
                    ("values lie in {0} and powers of two", s.values_are_powers_of_two, s.evaluations),
                ];
                for (name, got, want) in lines {
                    let _ = writeln!(out, "  {} {name}: {got}/{want}", status(got == want));
                }
                for f in &s.failures {
                    let _ = writeln!(out, "  failure: {f}");
                }
            }
        }
    }
    let _ = writeln!(out, "\noverall: {}", status(report.passed));
    out
}

/// One CSV row per check.
pub fn render_checks_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["job", "kind", "check", "status", "residual", "lhs", "rhs", "citation"])?;
    for job in &report.jobs {
        if let JobOutput::Verification { job, report: r, .. } = job {
            for c in &r.checks {
                w.write_record([
                    job.to_string(),
                    r.kind.clone(),
                    c.name.clone(),
                    status(c.passed).to_string(),
                    c.residual.map(|x| format!("{x:e}")).unwrap_or_default(),
                    c.lhs.map(|x| x.to_string()).unwrap_or_default(),
                    c.rhs.map(|x| x.to_string()).unwrap_or_default(),
                    c.citation.clone(),
                ])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Census rows of every multiplicity job that requested one.
pub fn render_census_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "file", "eta", "z_sign", "shalika_plus", "shalika_minus", "fj_even_plus", "fj_even_minus", "linear", "fj_odd",
    ])?;
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for job in &report.jobs {
        let JobOutput::Multiplicity { output, .. } = job else { continue };
        let Some(census) = &output.census else { continue };
        for row in &census.rows {
            let eta: Vec<String> = row.eta.iter().map(|(k, v)| format!("{k}:{v:+}")).collect();
            let odd = row
                .fj_odd
                .as_ref()
                .map(|m| m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "))
                .unwrap_or_default();
            w.write_record([
                output.file.clone(),
                eta.join(" "),
                format!("{:+}", row.z_sign),
                opt(row.shalika_plus),
                opt(row.shalika_minus),
                opt(row.fj_even_plus),
                opt(row.fj_even_minus),
                opt(row.linear),
                odd,
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes `report.json`, `report.txt` and, when present, `census.csv` into `dir`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), render_json(report)?)?;
    std::fs::write(dir.join("report.txt"), render_text(report))?;
    let has_census = report
        .jobs
        .iter()
        .any(|j| matches!(j, JobOutput::Multiplicity { output, .. } if output.census.is_some()));
    if has_census {
        std::fs::write(dir.join("census.csv"), render_census_csv(report)?)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Cache administration

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheCommand {
    List,
    Evict,
    Validate,
}

pub fn cache_admin(cache: &Cache, cmd: CacheCommand, pattern: Option<&str>) -> Result<String> {
    let mut out = String::new();
    let table = |entries: &[unitary_periods::cache::CacheEntry], out: &mut String| {
        let _ = writeln!(out, "file\tkind\tp\tf\tmodulus\tepsilon\tdim\tsubgroup\tversion\trows\tstatus");
        for e in entries {
            let st = match &e.status {
                EntryStatus::Ok => "ok".to_string(),
                EntryStatus::Stale => "stale (evicted on validate)".to_string(),
                EntryStatus::Corrupt(r) => format!("corrupt: {r}"),
            };
            match &e.key {
                Some(k) => {
                    let _ = writeln!(
                        out,
                        "{}\t{:?}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{st}",
                        e.file, k.kind, k.p, k.f, k.modulus, k.epsilon, k.dim, k.subgroup, k.version, e.rows
                    );
                }
                None => {
                    let _ = writeln!(out, "{}\t-\t-\t-\t-\t-\t-\t-\t-\t-\t{st}", e.file);
                }
            }
        }
    };
    match cmd {
        CacheCommand::List => table(&cache.list()?, &mut out),
        CacheCommand::Validate => table(&cache.validate()?, &mut out),
        CacheCommand::Evict => {
            let n = cache.evict(pattern)?;
            let _ = writeln!(out, "evicted {n} entries");
        }
    }
    Ok(out)
}
