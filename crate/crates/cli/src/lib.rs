//! Config-driven runs of the heatutm solvers with JSON reports and CSV fields.

pub mod config;
pub mod csvio;
pub mod report;

use config::{load_config, LinearMethod, LoadedConfig};
use csvio::{write_field_csv, write_trace_csv};
use heatutm::acceptance::{run_all, run_criterion};
use heatutm::linear::{solve_halfline_direct, solve_linear};
use heatutm::nonlinear::{lifespan, picard_solve, Lifespan, NonlinearError};
use heatutm::norms::{alpha_exponent, data_norm, hs_norm_physical, ht_norm, Span};
use heatutm::oracle::{estimate_audit, exact_solution, laplace_sweep, AuditDatum, AuditScenario};
use heatutm::problem::{Domain, GridSpec, ProblemSpec, SolutionField};
use heatutm::transforms::restrict;
use report::{check, sha256_hex, CheckRecord, Provenance, RunReport};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {message}", path.display())]
    Config { path: PathBuf, line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    /// 2 for unusable input, 1 for a run that started and failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SolveLinear,
    SolveRd,
    Norms,
    Lifespan,
    Audit,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveLinear => "solve-linear",
            Command::SolveRd => "solve-rd",
            Command::Norms => "norms",
            Command::Lifespan => "lifespan",
            Command::Audit => "audit",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
}

/// What a command produced: the report (already written) and lines for stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

struct Ctx {
    command: Command,
    opts: Options,
    loaded: Option<LoadedConfig>,
    timings: BTreeMap<String, f64>,
}

impl Ctx {
    fn config(&self) -> Result<&LoadedConfig, CliError> {
        self.loaded
            .as_ref()
            .ok_or_else(|| CliError::Io(format!("{} needs --config", self.command.name())))
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(label.to_string(), start.elapsed().as_secs_f64());
        out
    }

    fn write_field(&self, name: &str, field: &SolutionField) -> Result<(), CliError> {
        write_field_csv(&self.opts.out.join(name), field).map_err(CliError::Io)
    }

    fn finish(self, results: Value, checks: Vec<CheckRecord>, lines: Vec<String>) -> Result<Outcome, CliError> {
        let provenance = Provenance {
            command: self.command.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: self.loaded.as_ref().map(|l| sha256_hex(l.text.as_bytes())).unwrap_or_default(),
            seed: self.opts.seed,
        };
        let report = RunReport::new(provenance, results, checks, self.timings);
        std::fs::write(self.opts.out.join("report.json"), report.to_json())
            .map_err(|e| CliError::Io(format!("writing report.json: {e}")))?;
        Ok(Outcome { report, lines })
    }
}

pub fn run(command: Command, opts: Options) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&opts.out).map_err(|e| CliError::Io(format!("{}: {e}", opts.out.display())))?;
    let loaded = opts.config.as_deref().map(load_config).transpose()?;
    let ctx = Ctx { command, opts, loaded, timings: BTreeMap::new() };
    match command {
        Command::SolveLinear => solve_linear_cmd(ctx),
        Command::SolveRd => solve_rd_cmd(ctx),
        Command::Norms => norms_cmd(ctx),
        Command::Lifespan => lifespan_cmd(ctx),
        Command::Audit => audit_cmd(ctx),
        Command::Verify => verify_cmd(ctx),
    }
}

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

fn boundary_gaps(field: &SolutionField, spec: &ProblemSpec) -> (f64, f64) {
    let gap = |trace: &[f64], g: &heatutm::sampled::Sampled| {
        field
            .t_grid
            .iter()
            .zip(trace)
            .filter(|(&t, _)| t > 0.0)
            .map(|(&t, &v)| (v - g.eval(t)).abs())
            .fold(0.0, f64::max)
    };
    let left = gap(&field.left_trace, &spec.g0);
    let right = match (&field.right_trace, &spec.h0) {
        (Some(r), Some(h)) => gap(r, h),
        _ => 0.0,
    };
    (left, right)
}

fn reference_error(field: &SolutionField, r: &config::ReferenceConfig) -> f64 {
    let mut worst = 0.0f64;
    for (j, &t) in field.t_grid.iter().enumerate().filter(|(_, &t)| t > 0.0) {
        for (i, &x) in field.x_grid.iter().enumerate() {
            worst = worst.max((field.at(i, j) - exact_solution(r.generator, &r.params, x, t)).abs());
        }
    }
    worst
}

/// Value nearest to `(x, t)` on the grid.
fn probe(field: &SolutionField, x: f64, t: f64) -> f64 {
    let nearest = |grid: &[f64], v: f64| {
        grid.iter()
            .enumerate()
            .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    field.at(nearest(&field.x_grid, x), nearest(&field.t_grid, t))
}

fn solve_linear_cmd(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?.clone();
    let spec = cfg.problem(ctx.opts.tol)?;
    let grid = cfg.grid()?;
    let method = cfg.config.method;
    let (field, components, residuals) = match method {
        LinearMethod::Decomposed => {
            let r = ctx.timed("solve", || solve_linear(&spec, &grid)).map_err(run_err)?;
            (r.field.clone(), r.components.clone(), r.quadrature_residuals.clone())
        }
        LinearMethod::Direct => {
            let f = ctx.timed("solve", || solve_halfline_direct(&spec, &grid)).map_err(run_err)?;
            (f, Vec::new(), Vec::new())
        }
    };
    let mut sum = None::<SolutionField>;
    for (name, c) in &components {
        ctx.write_field(&format!("components_{name}.csv"), c)?;
        match &mut sum {
            Some(s) => s.axpy(1.0, c),
            None => sum = Some(c.clone()),
        }
    }
    ctx.write_field("field.csv", &field)?;
    let defect = sum.map_or(0.0, |s| s.max_abs_diff(&field));
    let (left, right) = boundary_gaps(&field, &spec);
    let mut checks = vec![check("boundary_trace_left", left, 1e-8), check("boundary_trace_right", right, 1e-8)];
    if !components.is_empty() {
        checks.push(check("superposition_defect", defect, 1e-10));
    }
    let mut results = json!({
        "domain": spec.domain,
        "method": method,
        "grid": grid,
        "max_abs": field.max_abs(),
        "quadrature_residuals": residuals,
        "superposition_defect": defect,
        "components": components.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
    });
    let mut lines = vec![format!("solved {} × {} grid, max |u| = {}", grid.n_x, grid.n_t, field.max_abs())];
    if let Some(r) = &cfg.config.reference {
        let e = reference_error(&field, r);
        results["reference_error"] = json!(e);
        checks.push(check("reference_error", e, r.tolerance));
        lines.push(format!("max error against {:?}: {e:e}", r.generator));
    }
    if let Domain::Interval { ell } = spec.domain {
        results["probe_mid_end"] = json!(probe(&field, ell / 2.0, grid.t_max));
    }
    ctx.finish(results, checks, lines)
}

fn lifespan_for(spec: &ProblemSpec) -> Result<(f64, Lifespan), CliError> {
    let d = data_norm(spec).map_err(run_err)?;
    let alpha = alpha_exponent(spec.index.s, spec.p);
    Ok((d, lifespan(d, spec.p, spec.c_sp, spec.regime(), alpha, spec.horizon)))
}

fn solve_rd_cmd(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?.clone();
    let spec = cfg.problem(ctx.opts.tol)?;
    let grid = cfg.grid()?;
    let (d, life) = lifespan_for(&spec)?;
    let mut lines = Vec::new();
    if grid.t_max > life.value * (1.0 + 1e-12) {
        if life.underflow {
            lines.push(format!(
                "guaranteed lifespan underflows (log {:.3}); running to T = {} with contraction monitoring",
                life.log_formula, grid.t_max
            ));
        } else if !cfg.config.override_lifespan {
            return Err(CliError::Run(format!(
                "grid reaches T = {} past the guaranteed lifespan {}; set \"override_lifespan\" to run anyway",
                grid.t_max, life.value
            )));
        }
    }
    let outcome = ctx.timed("picard", || picard_solve(&spec, &grid));
    let (field, trace, failure) = match outcome {
        Ok((f, t)) => (f, t, None),
        Err(NonlinearError::NonContraction { trace, field }) => (*field, *trace, Some("not contracting")),
        Err(e) => return Err(run_err(e)),
    };
    ctx.write_field("field.csv", &field)?;
    write_trace_csv(&ctx.opts.out.join("trace.csv"), &trace).map_err(CliError::Io)?;
    let (left, right) = boundary_gaps(&field, &spec);
    let worst_ratio = trace.ratios.iter().copied().fold(0.0, f64::max);
    let last_diff = trace.difference_norms.last().copied().unwrap_or(0.0);
    let checks = vec![
        check("fixed_point_residual", last_diff, spec.tol.iter),
        check("max_contraction_ratio", worst_ratio, 1.0),
        check("boundary_trace_left", left, 1e-8),
        check("boundary_trace_right", right, 1e-8),
    ];
    lines.push(format!(
        "{} after {} iterations, last difference {last_diff:e}",
        failure.unwrap_or(if trace.converged { "converged" } else { "stopped" }),
        trace.difference_norms.len()
    ));
    let results = json!({
        "grid": grid,
        "data_norm": d,
        "lifespan": life,
        "trace": trace,
        "max_abs": field.max_abs(),
        "outcome": failure.unwrap_or(if trace.converged { "converged" } else { "max_iter" }),
    });
    ctx.finish(results, checks, lines)
}

fn norms_cmd(ctx: Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?.clone();
    let spec = cfg.problem(ctx.opts.tol)?;
    let span = if spec.domain.is_interval() { Span::Interval } else { Span::HalfLine };
    let u0 = hs_norm_physical(&spec.u0, spec.index.s, span).map_err(run_err)?;
    let g0 = ht_norm(&restrict(&spec.g0, spec.horizon), spec.index.m).map_err(run_err)?;
    let h0 = spec
        .h0
        .as_ref()
        .map(|h| ht_norm(&restrict(h, spec.horizon), spec.index.m))
        .transpose()
        .map_err(run_err)?;
    let d = data_norm(&spec).map_err(run_err)?;
    let lines = vec![
        format!("‖u0‖_H^{} = {}", spec.index.s, u0.value),
        format!("‖g0‖_H^{} = {}", spec.index.m, g0.value),
        format!("data norm = {d}"),
    ];
    let results = json!({ "s": spec.index.s, "m": spec.index.m, "u0": u0, "g0": g0, "h0": h0, "data_norm": d });
    ctx.finish(results, Vec::new(), lines)
}

fn lifespan_cmd(ctx: Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?.clone();
    let (inputs, life) = match cfg.config.lifespan {
        Some(l) => {
            let alpha = l.s.map_or(0.0, |s| alpha_exponent(s, l.p));
            (json!(l), lifespan(l.data_norm, l.p, l.c_sp, l.regime, alpha, l.horizon))
        }
        None => {
            let spec = cfg.problem(ctx.opts.tol)?;
            let (d, life) = lifespan_for(&spec)?;
            (json!({ "data_norm": d, "p": spec.p, "c_sp": spec.c_sp, "regime": spec.regime(), "s": spec.index.s, "horizon": spec.horizon }), life)
        }
    };
    let mut lines = vec![format!("{}", life.value)];
    if life.underflow {
        lines.push(format!("underflow: log of the formula is {}", life.log_formula));
    }
    ctx.finish(json!({ "inputs": inputs, "lifespan": life }), Vec::new(), lines)
}

fn default_audits() -> Vec<AuditScenario> {
    let mut v = vec![AuditScenario::Zero];
    for datum in [AuditDatum::Gaussian, AuditDatum::Exponential] {
        for s in [0.0, 0.25, 1.0] {
            v.push(AuditScenario::IvpSpace { datum, s });
        }
    }
    v.extend([
        AuditScenario::PureTime { s: 0.25 },
        AuditScenario::HalflineForced { s: 1.0 },
        AuditScenario::IntervalForced { s: 1.0 },
    ]);
    v
}

fn audit_cmd(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let (scenarios, laplace) = match &ctx.loaded {
        Some(l) => (l.config.audit.clone().unwrap_or_else(default_audits), l.config.laplace),
        None => (default_audits(), None),
    };
    let mut reports = Vec::new();
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    for (i, sc) in scenarios.iter().enumerate() {
        let r = ctx.timed(&format!("audit_{i}"), || estimate_audit(*sc)).map_err(run_err)?;
        lines.push(format!("{:?}: ratio {:.6} {}", sc, r.ratio, if r.passed { "ok" } else { "FAILED" }));
        checks.push(CheckRecord {
            name: format!("audit_{i}"),
            passed: r.passed,
            value: r.ratio,
            tolerance: r.bound,
        });
        reports.push(r);
    }
    let mut results = json!({ "audits": reports });
    if let Some(l) = laplace {
        let seed = ctx.opts.seed;
        let sweep = ctx.timed("laplace", || laplace_sweep(seed, l.count)).map_err(run_err)?;
        lines.push(format!("Laplace bound: max ratio {:.6} over {} profiles", sweep.max_ratio, sweep.count));
        checks.push(check("laplace_violations", sweep.violations as f64, 0.0));
        results["laplace"] = json!(sweep);
    }
    ctx.finish(results, checks, lines)
}

fn verify_cmd(mut ctx: Ctx) -> Result<Outcome, CliError> {
    let ids = ctx.loaded.as_ref().and_then(|l| l.config.criteria.clone());
    let results: Vec<_> = match ids {
        Some(ids) => ids
            .iter()
            .map(|&id| run_criterion(id).ok_or_else(|| CliError::Run(format!("no criterion {id}"))))
            .collect::<Result<_, _>>()?,
        None => run_all(),
    };
    let mut lines = Vec::new();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for r in &results {
        lines.push(r.line());
        ctx.timings.insert(format!("criterion_{}", r.id), r.seconds);
        checks.push(CheckRecord {
            name: format!("criterion_{}", r.id),
            passed: r.passed,
            value: r.measured,
            tolerance: Some(r.tolerance),
        });
        rows.push(json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail, "budget_seconds": r.budget_seconds }));
    }
    ctx.finish(json!({ "criteria": rows }), checks, lines)
}

/// Loads a grid and problem from a config path; used by tests.
pub fn load_problem(path: &Path) -> Result<(ProblemSpec, GridSpec), CliError> {
    let l = load_config(path)?;
    Ok((l.problem(None)?, l.grid()?))
}
