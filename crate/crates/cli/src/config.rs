//! JSON run configurations and their translation into solver inputs.

use crate::csvio::{read_field_csv, read_profile_csv};
use crate::CliError;
use heatutm::oracle::{exact_forcing, exact_solution, AuditScenario, ExactName, ExactParams};
use heatutm::problem::{
    validate_problem, Domain, ForcingField, GridSpec, NonlinearityForm, ProblemError, ProblemSpec, Regime,
    Tolerances,
};
use heatutm::sampled::Sampled;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A datum: a catalog solution evaluated in the role it is used for, a
/// constant, or a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSource {
    Generator {
        generator: ExactName,
        #[serde(default)]
        params: ExactParams,
    },
    Constant {
        constant: f64,
    },
    /// Two columns `(abscissa, value)` for profiles and signals, the field
    /// matrix layout for forcing.
    Csv {
        csv: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub space: usize,
    pub time: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self { space: 200, time: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub quad: Option<f64>,
    pub iter: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: Domain,
    pub horizon: f64,
    pub s: f64,
    #[serde(default = "default_p")]
    pub p: u32,
    #[serde(default = "default_form")]
    pub form: NonlinearityForm,
    #[serde(default = "default_c_sp")]
    pub c_sp: f64,
    pub u0: DataSource,
    pub g0: DataSource,
    #[serde(default)]
    pub h0: Option<DataSource>,
    #[serde(default)]
    pub forcing: Option<DataSource>,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub tol: ToleranceOverrides,
}

fn default_p() -> u32 {
    3
}

fn default_form() -> NonlinearityForm {
    NonlinearityForm::PowerUp
}

fn default_c_sp() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub generator: ExactName,
    #[serde(default)]
    pub params: ExactParams,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifespanConfig {
    pub data_norm: f64,
    pub p: u32,
    #[serde(default = "default_c_sp")]
    pub c_sp: f64,
    pub regime: Regime,
    /// Regularity used for the rough-regime exponent.
    #[serde(default)]
    pub s: Option<f64>,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaplaceConfig {
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearMethod {
    #[default]
    Decomposed,
    /// Five-term integral representation; half-line only.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub method: LinearMethod,
    #[serde(default)]
    pub reference: Option<ReferenceConfig>,
    #[serde(default)]
    pub lifespan: Option<LifespanConfig>,
    #[serde(default)]
    pub audit: Option<Vec<AuditScenario>>,
    #[serde(default)]
    pub laplace: Option<LaplaceConfig>,
    /// Acceptance criteria run by `verify`; all when absent.
    #[serde(default)]
    pub criteria: Option<Vec<u32>>,
    /// Run `solve-rd` past the guaranteed lifespan.
    #[serde(default)]
    pub override_lifespan: bool,
}

/// A parsed configuration together with its source text and location.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    pub dir: PathBuf,
    pub path: PathBuf,
}

/// Line (1-based) of the first occurrence of `"key"` in `text`.
pub fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig { config, text, dir, path: path.to_path_buf() })
}

/// The config key a validation failure points at.
fn problem_key(e: &ProblemError) -> &'static str {
    match e {
        ProblemError::OutOfRange { .. } => "s",
        ProblemError::BadHorizon(_) => "horizon",
        ProblemError::BadNonlinearity(_) => "p",
        ProblemError::IncompatibleData(_) => "u0",
        ProblemError::BadDatum(_) | ProblemError::Sample(_) => "problem",
    }
}

impl LoadedConfig {
    fn problem_error(&self, e: ProblemError) -> CliError {
        self.anchored(problem_key(&e), e)
    }

    fn anchored(&self, key: &str, message: impl std::fmt::Display) -> CliError {
        CliError::Config { path: self.path.clone(), line: line_of(&self.text, key), message: message.to_string() }
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        let g = self.config.grid.ok_or_else(|| self.anchored("grid", "missing \"grid\" section"))?;
        GridSpec::new(g.n_x, g.n_t, g.x_max, g.t_max).map_err(|e| self.anchored("grid", e))
    }

    /// The validated problem, with the quadrature tolerance overridden by
    /// `tol` when given.
    pub fn problem(&self, tol: Option<f64>) -> Result<ProblemSpec, CliError> {
        let pc = self
            .config
            .problem
            .as_ref()
            .ok_or_else(|| self.anchored("problem", "missing \"problem\" section"))?;
        let extent = pc.domain.extent();
        let right = match pc.domain {
            Domain::Interval { ell } => ell,
            Domain::HalfLine { .. } => 0.0,
        };
        let n = pc.samples;
        let u0 = self.profile("u0", &pc.u0, extent, n.space, |gen, p, x| exact_solution(gen, p, x, 0.0))?;
        let g0 = self.profile("g0", &pc.g0, pc.horizon, n.time, |gen, p, t| exact_solution(gen, p, 0.0, t))?;
        let h0 = pc
            .h0
            .as_ref()
            .map(|h| self.profile("h0", h, pc.horizon, n.time, |gen, p, t| exact_solution(gen, p, right, t)))
            .transpose()?;
        let mut spec = ProblemSpec::new(pc.domain, pc.horizon, pc.s, pc.p, pc.form, u0, g0, h0)
            .map_err(|e| self.problem_error(e))?;
        spec.c_sp = pc.c_sp;
        spec.tol = Tolerances {
            quad: tol.or(pc.tol.quad).unwrap_or(spec.tol.quad),
            iter: pc.tol.iter.unwrap_or(spec.tol.iter),
            max_iter: pc.tol.max_iter.unwrap_or(spec.tol.max_iter),
            ..spec.tol
        };
        if let Some(f) = &pc.forcing {
            spec.forcing = Some(self.forcing(f, extent, pc.horizon, n)?);
        }
        validate_problem(&spec).map_err(|e| self.problem_error(e))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    fn profile(
        &self,
        key: &str,
        source: &DataSource,
        end: f64,
        intervals: usize,
        eval: impl Fn(ExactName, &ExactParams, f64) -> f64,
    ) -> Result<Sampled, CliError> {
        match source {
            DataSource::Generator { generator, params } => {
                Ok(Sampled::from_fn(0.0, end, intervals, |x| eval(*generator, params, x)))
            }
            DataSource::Constant { constant } => Ok(Sampled::from_fn(0.0, end, intervals, |_| *constant)),
            DataSource::Csv { csv } => {
                read_profile_csv(&self.resolve(csv)).map_err(|e| self.anchored(key, e))
            }
        }
    }

    fn forcing(&self, source: &DataSource, extent: f64, horizon: f64, n: Samples) -> Result<ForcingField, CliError> {
        match source {
            DataSource::Generator { generator, params } => Ok(ForcingField::from_fn(
                extent,
                n.space,
                horizon,
                n.time,
                |x, t| exact_forcing(*generator, params, x, t),
            )),
            DataSource::Constant { constant } => {
                Ok(ForcingField::from_fn(extent, n.space, horizon, n.time, |_, _| *constant))
            }
            DataSource::Csv { csv } => {
                let field = read_field_csv(&self.resolve(csv), false).map_err(|e| self.anchored("forcing", e))?;
                let dt = heatutm::problem::uniform_step(&field.t_grid)
                    .ok_or_else(|| self.anchored("forcing", "forcing times are not uniform"))?;
                let dx = heatutm::problem::uniform_step(&field.x_grid)
                    .ok_or_else(|| self.anchored("forcing", "forcing abscissae are not uniform"))?;
                let slices = field
                    .values
                    .iter()
                    .map(|row| Sampled::new(field.x_grid[0], dx, row.clone()))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| self.anchored("forcing", e))?;
                ForcingField::new(dt, slices).map_err(|e| self.anchored("forcing", e))
            }
        }
    }
}
