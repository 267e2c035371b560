//! Batch front end: a JSON run configuration in, CSV tables and JSON
//! verdict reports out.
//!
//! Everything a run does is named in one config file; command-line flags
//! only locate that file, the output directory, an optional job filter, and
//! a worker count.  Outputs are deterministic — two runs of the same config
//! produce byte-identical files, except for the `meta` block in
//! `summary.json`, which carries the timestamp and tool version and nothing
//! else.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::evolve::{
    build_packet, compare_exact, crank_nicolson_1d, crank_nicolson_1d_observed,
    expand_and_reconstruct, CompareReport, PQuadrature, PacketFamily, PacketSpec, PropagatorConfig,
    Region1D,
};
use crate::grid::{
    sample, write_complex_csv, write_scalar_csv, ComplexField, GridSpec, StencilOrder,
};
use crate::model::{HarmonicFamily, PhysConsts};
use crate::synth::{
    exact_wavefunction, synth_potential, CatalogPotential, GaugeField, PotentialSpec,
};
use crate::verify::{
    equivalence_identity_check, hj_residual, laplace_residual, operator_eigencheck,
    predefined_operators, refinement_study, reports_to_csv, schrodinger_residual, CheckKind,
    EigenRoute, OrderWindow, RefinementStudy, ResidualReport,
};

/// The one config schema version this build reads.
pub const CONFIG_VERSION: u64 = 1;

/// Norm drift above this fails a propagation job (Crank-Nicolson is exactly
/// norm-preserving in exact arithmetic, so drift is pure solver round-off).
pub const NORM_DRIFT_TOL: f64 = 1e-10;

/// Accepted range for the error ratio under a joint `(h, dt)` halving of a
/// second-order propagation: nominal 4, with slack for error-constant drift.
pub const CN_RATIO_LO: f64 = 3.4;
pub const CN_RATIO_HI: f64 = 4.6;

fn default_compare_tol() -> f64 {
    1e-2
}

fn default_expand_tol() -> f64 {
    1e-6
}

fn default_order() -> StencilOrder {
    StencilOrder::Two
}

fn default_levels() -> u32 {
    1
}

// ---------------------------------------------------------------------------
// Config schema.
// ---------------------------------------------------------------------------

/// Top-level run configuration.  Strict: any unknown key anywhere in the
/// document fails the parse before a single job executes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u64,
    #[serde(default)]
    pub consts: PhysConsts,
    pub jobs: Vec<Job>,
}

/// A unit of work.  JSON is externally tagged:
/// `{"verify": {...}}`, `{"propagate": {...}}`, `{"expand": {...}}`,
/// `{"dump": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Job {
    Verify(VerifyJob),
    Propagate(PropagateJob),
    Expand(ExpandJob),
    Dump(DumpJob),
}

impl Job {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Verify(_) => "verify",
            Self::Propagate(_) => "propagate",
            Self::Expand(_) => "expand",
            Self::Dump(_) => "dump",
        }
    }

    fn name(&self) -> Option<&str> {
        match self {
            Self::Verify(j) => j.name.as_deref(),
            Self::Propagate(j) => j.name.as_deref(),
            Self::Expand(j) => j.name.as_deref(),
            Self::Dump(j) => j.name.as_deref(),
        }
    }
}

/// Residual and eigenvalue checks for one family over a grid ladder.
///
/// Pass rules per check:
/// * `HamiltonJacobi` and analytic `OperatorEigen` hold to round-off, so
///   every report must pass on every grid and time.
/// * `Laplace` on per-axis-quadratic actions is stencil-exact (absolute
///   bound per level); on other actions it needs a ≥ 3-grid ladder and the
///   measured order must land in the stencil's window.
/// * `Schrodinger` and `EquivalenceIdentity` are truncation-error checks:
///   always judged by a ≥ 3-grid refinement study.
/// * `OperatorEigen` additionally runs the finite-difference route as a
///   refinement study when the ladder has ≥ 3 grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: HarmonicFamily,
    #[serde(default)]
    pub gauge: GaugeField,
    pub checks: Vec<CheckKind>,
    /// Reference potential for the Hamilton-Jacobi and Schrödinger checks;
    /// omitted means the potential synthesized from `family` and `gauge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<CatalogPotential>,
    pub grids: Vec<GridSpec>,
    pub times: Vec<f64>,
    #[serde(default = "default_order")]
    pub order: StencilOrder,
}

/// Build a packet at `t = 0`, Crank-Nicolson it to `T`, and compare against
/// the exact packet, optionally over several joint `(h, dt)` refinements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub packet: PacketSpec,
    /// Potential to propagate under; omitted means the one synthesized from
    /// the packet family (which is independent of the momentum parameter).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<CatalogPotential>,
    pub grid: GridSpec,
    pub config: PropagatorConfig,
    pub region: Region1D,
    /// Number of `(h, dt)` levels; level `i` doubles the grid and halves
    /// the step `i` times.  With ≥ 2 levels the error ratio between
    /// consecutive levels must land in `[3.4, 4.6]`.
    #[serde(default = "default_levels")]
    pub levels: u32,
    /// Write every `stride`-th state of the coarsest run to a CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
    #[serde(default = "default_compare_tol")]
    pub tolerance: f64,
}

/// Expand a Gaussian target in the family basis and reconstruct it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: PacketFamily,
    pub target: GaussianTarget,
    pub times: Vec<f64>,
    pub quadrature: PQuadrature,
    pub grid: GridSpec,
    #[serde(default = "default_expand_tol")]
    pub tolerance: f64,
}

/// Normalized Gaussian `psi(x) = (2 pi sigmaX^2)^{-1/4}
/// exp(-(x - x0)^2 / 4 sigmaX^2) exp(i Pmean x / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTarget {
    pub x0: f64,
    #[serde(rename = "sigmaX")]
    pub sigma_x: f64,
    #[serde(default, rename = "Pmean")]
    pub p_mean: f64,
}

impl GaussianTarget {
    pub fn build(&self, grid: &GridSpec, consts: &PhysConsts) -> Result<ComplexField> {
        if !(self.sigma_x.is_finite() && self.sigma_x > 0.0)
            || !self.x0.is_finite()
            || !self.p_mean.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "Gaussian target needs finite x0, Pmean and sigmaX > 0, got x0={}, sigmaX={}, Pmean={}",
                self.x0, self.sigma_x, self.p_mean
            )));
        }
        let norm = (2.0 * std::f64::consts::PI * self.sigma_x * self.sigma_x).powf(-0.25);
        let k = self.p_mean / consts.hbar;
        sample(grid, 0.0, |x, _| {
            let d = x[0] - self.x0;
            let env = norm * (-d * d / (4.0 * self.sigma_x * self.sigma_x)).exp();
            Ok(num_complex::Complex64::from_polar(env, k * x[0]))
        })
    }
}

/// Tabulate a field on a grid: the action `S`, the synthesized potential
/// `V`, or the exact state `psi`.  One CSV per job, times as blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpJob {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub family: HarmonicFamily,
    pub what: DumpWhat,
    #[serde(default)]
    pub gauge: GaugeField,
    pub grid: GridSpec,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DumpWhat {
    S,
    V,
    #[serde(rename = "psi")]
    Psi,
}

/// Parse a config document, rejecting unknown keys and schema versions.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    if config.version != CONFIG_VERSION {
        return Err(Error::ConfigParse(format!(
            "unsupported config version {} (this build reads version {CONFIG_VERSION})",
            config.version
        )));
    }
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

// ---------------------------------------------------------------------------
// Job execution.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct JobReport {
    name: String,
    kind: &'static str,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    detail: Value,
}

struct OutFile {
    name: String,
    bytes: Vec<u8>,
}

struct JobOutput {
    report: JobReport,
    files: Vec<OutFile>,
}

/// Counts returned by [`run`]; exit status 0 iff `fail == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub pass: usize,
    pub fail: usize,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.fail == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn effective_name(index: usize, job: &Job) -> String {
    match job.name() {
        Some(n) => n.to_string(),
        None => format!("{}{index:02}", job.kind()),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize infallibly")
}

fn study_value(t: f64, study: &RefinementStudy) -> Value {
    json!({ "t": t, "study": to_value(study) })
}

/// Collects `(pass, reports, studies)` per check kind.
struct CheckOutcome {
    check: CheckKind,
    pass: bool,
    reports: Vec<ResidualReport>,
    studies: Vec<Value>,
}

impl CheckOutcome {
    fn value(&self) -> Value {
        json!({
            "check": to_value(&self.check),
            "pass": self.pass,
            "reports": to_value(&self.reports),
            "studies": self.studies,
        })
    }
}

fn is_ladder(grids: &[GridSpec]) -> bool {
    grids.len() >= 3
}

fn run_verify(job: &VerifyJob, consts: &PhysConsts) -> Result<(bool, Value, Vec<ResidualReport>)> {
    let family = &job.family;
    family.validate()?;
    if job.grids.is_empty() || job.times.is_empty() {
        return Err(Error::InvalidParameter(
            "a verify job needs at least one grid and one time".into(),
        ));
    }
    let potential = match &job.potential {
        Some(p) => PotentialSpec::catalog(p.clone()),
        None => PotentialSpec::synthesized_with_gauge(family.clone(), job.gauge.clone()),
    };
    let window = OrderWindow::for_order(job.order);
    let mut outcomes = Vec::new();

    for check in &job.checks {
        let mut outcome = CheckOutcome {
            check: *check,
            pass: true,
            reports: vec![],
            studies: vec![],
        };
        match check {
            CheckKind::Laplace => {
                if family.stencil_exact() || !is_ladder(&job.grids) {
                    if !family.stencil_exact() {
                        return Err(Error::InconsistentGrids(format!(
                            "the Laplace residual of {family} is truncation-limited; give a \
                             refinement ladder of at least 3 grids, got {}",
                            job.grids.len()
                        )));
                    }
                    for g in &job.grids {
                        for &t in &job.times {
                            let r = laplace_residual(family, consts, g, t, job.order)?;
                            outcome.pass &= r.pass;
                            outcome.reports.push(r);
                        }
                    }
                } else {
                    for &t in &job.times {
                        let study = refinement_study(&job.grids, window, |g| {
                            laplace_residual(family, consts, g, t, job.order)
                        })?;
                        outcome.pass &= study.pass;
                        outcome.reports.extend(study.levels.iter().cloned());
                        outcome.studies.push(study_value(t, &study));
                    }
                }
            }
            CheckKind::HamiltonJacobi => {
                for g in &job.grids {
                    for &t in &job.times {
                        let r = hj_residual(family, &potential, &job.gauge, consts, g, t)?;
                        outcome.pass &= r.pass;
                        outcome.reports.push(r);
                    }
                }
            }
            CheckKind::Schrodinger => {
                if !is_ladder(&job.grids) {
                    return Err(Error::InconsistentGrids(format!(
                        "the Schrödinger residual is truncation error; give a refinement \
                         ladder of at least 3 grids, got {}",
                        job.grids.len()
                    )));
                }
                for &t in &job.times {
                    let study = refinement_study(&job.grids, window, |g| {
                        schrodinger_residual(
                            family, &potential, &job.gauge, consts, g, t, job.order,
                        )
                    })?;
                    outcome.pass &= study.pass;
                    outcome.reports.extend(study.levels.iter().cloned());
                    outcome.studies.push(study_value(t, &study));
                }
            }
            CheckKind::EquivalenceIdentity => {
                if !is_ladder(&job.grids) {
                    return Err(Error::InconsistentGrids(format!(
                        "the equivalence identity is checked by refinement; give at least \
                         3 grids, got {}",
                        job.grids.len()
                    )));
                }
                for &t in &job.times {
                    let study = refinement_study(&job.grids, window, |g| {
                        equivalence_identity_check(family, consts, g, t, job.order)
                            .map(|er| er.report)
                    })?;
                    outcome.pass &= study.pass;
                    outcome.reports.extend(study.levels.iter().cloned());
                    outcome.studies.push(study_value(t, &study));
                }
            }
            CheckKind::OperatorEigen => {
                let ops = predefined_operators(family, consts);
                if ops.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "no predefined conserved operators for {family}"
                    )));
                }
                for op in &ops {
                    for g in &job.grids {
                        for &t in &job.times {
                            let r = operator_eigencheck(
                                op,
                                family,
                                consts,
                                g,
                                t,
                                job.order,
                                EigenRoute::Analytic,
                            )?;
                            outcome.pass &= r.pass;
                            outcome.reports.push(r);
                        }
                    }
                    if is_ladder(&job.grids) {
                        for &t in &job.times {
                            let study = refinement_study(&job.grids, window, |g| {
                                operator_eigencheck(
                                    op,
                                    family,
                                    consts,
                                    g,
                                    t,
                                    job.order,
                                    EigenRoute::FiniteDifference,
                                )
                            })?;
                            outcome.pass &= study.pass;
                            outcome.reports.extend(study.levels.iter().cloned());
                            outcome.studies.push(study_value(t, &study));
                        }
                    }
                }
            }
        }
        outcomes.push(outcome);
    }

    let pass = outcomes.iter().all(|o| o.pass);
    let detail = json!({
        "family": format!("{family}"),
        "checks": outcomes.iter().map(|o| o.value()).collect::<Vec<_>>(),
    });
    let all_reports = outcomes.into_iter().flat_map(|o| o.reports).collect();
    Ok((pass, detail, all_reports))
}

fn run_propagate(
    job: &PropagateJob,
    consts: &PhysConsts,
    file_stem: &str,
) -> Result<(bool, Value, Vec<OutFile>)> {
    job.packet.validate()?;
    job.region.validate()?;
    job.config.validate()?;
    if job.levels == 0 {
        return Err(Error::InvalidParameter(
            "a propagate job needs levels >= 1".into(),
        ));
    }
    let potential = match &job.potential {
        Some(p) => PotentialSpec::catalog(p.clone()),
        // The synthesized potential is the same for every momentum in the
        // packet, so any node works; take P = 0.
        None => PotentialSpec::synthesized(job.packet.family.with_p(0.0)),
    };

    let mut files = Vec::new();
    let mut level_reports: Vec<CompareReport> = Vec::new();
    let mut grid = job.grid.clone();
    let mut dt = job.config.dt;
    for level in 0..job.levels {
        let config = PropagatorConfig::new(dt, job.config.t_final);
        let psi0 = build_packet(&job.packet, consts, &grid, 0.0)?;
        let run = if let (0, Some(stride)) = (level, job.snapshot_stride) {
            let mut snaps: Vec<(f64, ComplexField)> = Vec::new();
            let result = crank_nicolson_1d_observed(
                &psi0,
                &potential,
                consts,
                &config,
                stride,
                |_, t, f| {
                    snaps.push((t, f.clone()));
                    Ok(())
                },
            )?;
            let series: Vec<(f64, &ComplexField)> = snaps.iter().map(|(t, f)| (*t, f)).collect();
            let mut bytes = Vec::new();
            write_complex_csv(&mut bytes, &series)?;
            files.push(OutFile {
                name: format!("{file_stem}_snapshots.csv"),
                bytes,
            });
            result
        } else {
            crank_nicolson_1d(&psi0, &potential, consts, &config)?
        };
        let report = compare_exact(
            &run.psi,
            &job.packet,
            consts,
            job.config.t_final,
            job.region,
            run.norm_drift,
        )?;
        level_reports.push(report);
        grid = grid.refine();
        dt *= 0.5;
    }

    let mut pass = true;
    for r in &level_reports {
        pass &= r.l2_rel <= job.tolerance && r.norm_drift <= NORM_DRIFT_TOL;
    }
    let mut ratios = Vec::new();
    for pair in level_reports.windows(2) {
        let ratio = if pair[1].l2_rel > 0.0 {
            pair[0].l2_rel / pair[1].l2_rel
        } else {
            f64::INFINITY
        };
        pass &= (CN_RATIO_LO..=CN_RATIO_HI).contains(&ratio);
        ratios.push(ratio);
    }

    let detail = json!({
        "packet": to_value(&job.packet),
        "levels": to_value(&level_reports),
        "ratios": ratios,
        "tolerance": job.tolerance,
        "norm_drift_tolerance": NORM_DRIFT_TOL,
        "ratio_window": [CN_RATIO_LO, CN_RATIO_HI],
    });
    Ok((pass, detail, files))
}

fn run_expand(
    job: &ExpandJob,
    consts: &PhysConsts,
    file_stem: &str,
) -> Result<(bool, Value, Vec<OutFile>)> {
    if job.times.is_empty() {
        return Err(Error::InvalidParameter(
            "an expand job needs at least one time".into(),
        ));
    }
    let target = job.target.build(&job.grid, consts)?;
    let mut pass = true;
    let mut rows = Vec::new();
    let mut csv = String::from("P,t,re,im,abs\n");
    for &t in &job.times {
        let out = expand_and_reconstruct(&target, &job.family, consts, t, &job.quadrature)?;
        pass &= out.l2_rel_error <= job.tolerance;
        rows.push(json!({ "t": t, "l2_rel_error": out.l2_rel_error }));
        for (p, c) in out.p_nodes.iter().zip(&out.coeffs) {
            csv.push_str(&format!("{p},{t},{},{},{}\n", c.re, c.im, c.norm()));
        }
    }
    let files = vec![OutFile {
        name: format!("{file_stem}_coeffs.csv"),
        bytes: csv.into_bytes(),
    }];
    let detail = json!({
        "family": format!("{}", job.family),
        "times": rows,
        "tolerance": job.tolerance,
    });
    Ok((pass, detail, files))
}

fn run_dump(
    job: &DumpJob,
    consts: &PhysConsts,
    file_stem: &str,
) -> Result<(bool, Value, Vec<OutFile>)> {
    job.family.validate()?;
    if job.times.is_empty() {
        return Err(Error::InvalidParameter(
            "a dump job needs at least one time".into(),
        ));
    }
    let mut bytes = Vec::new();
    match job.what {
        DumpWhat::S => {
            let fields = job
                .times
                .iter()
                .map(|&t| {
                    sample(&job.grid, t, |x, tt| {
                        job.family.eval_action(consts, x, tt).map(|a| a.s)
                    })
                    .map(|f| (t, f))
                })
                .collect::<Result<Vec<_>>>()?;
            let series: Vec<_> = fields.iter().map(|(t, f)| (*t, f)).collect();
            write_scalar_csv(&mut bytes, &series, "S")?;
        }
        DumpWhat::V => {
            let fields = job
                .times
                .iter()
                .map(|&t| {
                    sample(&job.grid, t, |x, tt| {
                        synth_potential(&job.family, &job.gauge, consts, x, tt)
                    })
                    .map(|f| (t, f))
                })
                .collect::<Result<Vec<_>>>()?;
            let series: Vec<_> = fields.iter().map(|(t, f)| (*t, f)).collect();
            write_scalar_csv(&mut bytes, &series, "V")?;
        }
        DumpWhat::Psi => {
            let fields = job
                .times
                .iter()
                .map(|&t| {
                    sample(&job.grid, t, |x, tt| {
                        exact_wavefunction(&job.family, consts, x, tt)
                    })
                    .map(|f| (t, f))
                })
                .collect::<Result<Vec<_>>>()?;
            let series: Vec<_> = fields.iter().map(|(t, f)| (*t, f)).collect();
            write_complex_csv(&mut bytes, &series)?;
        }
    }
    let file = format!("{file_stem}.csv");
    let detail = json!({
        "family": format!("{}", job.family),
        "what": to_value(&job.what),
        "file": file,
        "times": job.times,
    });
    Ok((true, detail, vec![OutFile { name: file, bytes }]))
}

fn execute_job(index: usize, job: &Job, consts: &PhysConsts) -> JobOutput {
    let name = effective_name(index, job);
    let file_stem = format!("{index:02}_{}", slug(&name));
    let result = match job {
        Job::Verify(j) => run_verify(j, consts).map(|(pass, detail, reports)| {
            let csv = reports_to_csv(&reports);
            let files = vec![OutFile {
                name: format!("{file_stem}_reports.csv"),
                bytes: csv.into_bytes(),
            }];
            (pass, detail, files)
        }),
        Job::Propagate(j) => run_propagate(j, consts, &file_stem),
        Job::Expand(j) => run_expand(j, consts, &file_stem),
        Job::Dump(j) => run_dump(j, consts, &file_stem),
    };
    match result {
        Ok((pass, detail, files)) => JobOutput {
            report: JobReport {
                name,
                kind: job.kind(),
                pass,
                error: None,
                detail,
            },
            files,
        },
        Err(e) => JobOutput {
            report: JobReport {
                name,
                kind: job.kind(),
                pass: false,
                error: Some(e.to_string()),
                detail: Value::Null,
            },
            files: Vec::new(),
        },
    }
}

// ---------------------------------------------------------------------------
// The runner.
// ---------------------------------------------------------------------------

/// Execute every job in `config` (optionally filtered by a substring of the
/// job name) and write `report.json`, `summary.json`, and the per-job CSVs
/// into `outdir`.
///
/// All jobs run even after a failure; the returned counts aggregate.  The
/// output is deterministic for a given config: jobs are numbered by their
/// position in the file, results are collected in that order no matter how
/// many workers run, and the only wall-clock content is the isolated `meta`
/// block of `summary.json`.
pub fn run(
    config: &RunConfig,
    outdir: &Path,
    filter: Option<&str>,
    workers: usize,
) -> Result<RunSummary> {
    std::fs::create_dir_all(outdir)?;

    let selected: Vec<(usize, &Job)> = config
        .jobs
        .iter()
        .enumerate()
        .filter(|(i, job)| match filter {
            Some(f) => effective_name(*i, job).contains(f),
            None => true,
        })
        .collect();

    let outputs: Vec<JobOutput> = if workers <= 1 || selected.len() <= 1 {
        selected
            .iter()
            .map(|(i, job)| execute_job(*i, job, &config.consts))
            .collect()
    } else {
        let queue: Mutex<VecDeque<(usize, usize, &Job)>> = Mutex::new(
            selected
                .iter()
                .enumerate()
                .map(|(slot, (i, job))| (slot, *i, *job))
                .collect(),
        );
        let slots: Mutex<Vec<Option<JobOutput>>> =
            Mutex::new((0..selected.len()).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..workers.min(selected.len()) {
                scope.spawn(|| loop {
                    let next = queue.lock().expect("queue lock").pop_front();
                    let Some((slot, index, job)) = next else {
                        break;
                    };
                    let out = execute_job(index, job, &config.consts);
                    slots.lock().expect("slot lock")[slot] = Some(out);
                });
            }
        });
        slots
            .into_inner()
            .expect("slot lock")
            .into_iter()
            .map(|o| o.expect("every slot filled"))
            .collect()
    };

    for out in &outputs {
        for file in &out.files {
            std::fs::write(outdir.join(&file.name), &file.bytes)?;
        }
    }

    let reports: Vec<&JobReport> = outputs.iter().map(|o| &o.report).collect();
    let report_doc = json!({ "jobs": to_value(&reports) });
    let mut report_text = serde_json::to_string_pretty(&report_doc).expect("valid JSON");
    report_text.push('\n');
    std::fs::write(outdir.join("report.json"), report_text)?;

    let pass = reports.iter().filter(|r| r.pass).count();
    let fail = reports.len() - pass;
    let now_ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let summary_doc = json!({
        "pass": pass,
        "fail": fail,
        "jobs": reports
            .iter()
            .map(|r| json!({ "name": r.name, "kind": r.kind, "pass": r.pass }))
            .collect::<Vec<_>>(),
        "meta": {
            "generated_unix_ms": now_ms,
            "tool": version_string(),
        },
    });
    let mut summary_text = serde_json::to_string_pretty(&summary_doc).expect("valid JSON");
    summary_text.push('\n');
    std::fs::write(outdir.join("summary.json"), summary_text)?;

    Ok(RunSummary { pass, fail })
}

pub fn version_string() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

// ---------------------------------------------------------------------------
// Family listing.
// ---------------------------------------------------------------------------

/// Stable text catalog of the action families: parameters, closed-form
/// potential, and predefined conserved operators.  Ordering is fixed.
pub fn list_families() -> String {
    let text = "\
Catalog of harmonic action families (V is the synthesized potential):

Free1D
  S = P x - P^2 t / 2m
  params: P
  potential: 0
  operators: p -> P

ConstantForce1D
  S = (F t + P) x - (F t + P)^3 / 6 m F
  params: F (nonzero), P
  potential: -F x
  operators: p - F t -> P

GrowingForce1D
  S = (k t^2 / 2 + P) x - (k^2 t^5 / 20 + k P t^3 / 3 + P^2 t) / 2m
  params: k, P
  potential: -k t x
  operators: p - k t^2/2 -> P

GeneralLinear1D
  S = alpha(t) x + beta(t) with beta' = -alpha^2 / 2m
  params: alpha (a t^n e^{lambda t} sum), beta0
  potential: -alpha'(t) x
  operators: none predefined

AnalyticPoly2D
  S = Re f(x + i y, t), f a polynomial with time-dependent coefficients
  params: coeffs c_n(t)
  potential: -Re f_t - |f'|^2 / 2m
  operators: none predefined

RepulsiveOscillator2D
  S = (m w / 2)(x^2 - y^2) + P1 e^{-w t} x + P2 e^{w t} y
      + (P1^2 e^{-2 w t} - P2^2 e^{2 w t}) / 4 m w
  params: omega > 0, P1, P2
  potential: -(m omega^2 / 2)(x^2 + y^2)
  operators: e^{wt} (p_x - m w x) -> P1, e^{-wt} (p_y + m w y) -> P2

LogCentral2D
  S = sqrt(m k / 2) ln(x^2 + y^2)  [no free parameters, time-independent]
  params: k > 0 (potential strength only; no integration constants)
  potential: -k / (x^2 + y^2)
  operators: none predefined

Composite
  blocks of the families above on disjoint coordinate slices (dim <= 3)
  params: per block
  potential: sum of block potentials on their own axes
  operators: per block
";
    text.to_string()
}

// ---------------------------------------------------------------------------
// Standalone family descriptions.
// ---------------------------------------------------------------------------

/// A family bundled with the constants it is meant to be evaluated under:
/// the JSON object `{"family": ..., "params": ..., "consts": ...}` used by
/// files that describe a family outside a full run config.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDescription {
    pub family: HarmonicFamily,
    pub consts: PhysConsts,
}

impl Serialize for FamilyDescription {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let fam = serde_json::to_value(&self.family).map_err(serde::ser::Error::custom)?;
        let obj = fam.as_object().expect("a family serializes to an object");
        let mut map = s.serialize_map(Some(obj.len() + 1))?;
        for (k, v) in obj {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("consts", &self.consts)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for FamilyDescription {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            family: String,
            params: serde_json::Value,
            #[serde(default)]
            consts: Option<PhysConsts>,
        }

        let raw = Raw::deserialize(de)?;
        let family: HarmonicFamily =
            serde_json::from_value(json!({ "family": raw.family, "params": raw.params }))
                .map_err(D::Error::custom)?;
        Ok(Self {
            family,
            consts: raw.consts.unwrap_or_default(),
        })
    }
}
