//! Reaction-diffusion `u_t − u_xx = N(u)` by Picard iteration over the
//! linear solvers, with the lifespan formulas and contraction diagnostics.

use crate::linear::{solve_linear, LinearError};
use crate::norms::{xy_norm, NormError};
use crate::problem::{
    validate_problem, ForcingField, GridSpec, NonlinearityForm, ProblemError, ProblemSpec, Regime,
    SolutionField,
};
use crate::sampled::Sampled;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Difference norms at or below this are treated as zero when forming ratios.
pub const RATIO_FLOOR: f64 = 1e-14;
/// Lifespans shorter than this cannot be resolved by a time grid.
pub const TIME_RESOLUTION: f64 = 1e-8;
/// Consecutive expanding steps tolerated before giving up.
const EXPANSION_LIMIT: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonlinearError {
    #[error("form {form:?} is undefined for p = {p}")]
    BadNonlinearity { p: u32, form: NonlinearityForm },
    #[error("Picard iteration is not contracting (last ratios {:?})", .trace.ratios.iter().rev().take(EXPANSION_LIMIT).collect::<Vec<_>>())]
    NonContraction { trace: Box<PicardTrace>, field: Box<SolutionField> },
    #[error("need at least two difference norms above the floor")]
    InsufficientData,
    #[error("bad iteration setup: {0}")]
    BadSetup(String),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

fn check_form(p: u32, form: NonlinearityForm) -> Result<(), NonlinearError> {
    if p == 0 || (form == NonlinearityForm::PowerUp && p.is_multiple_of(2)) {
        return Err(NonlinearError::BadNonlinearity { p, form });
    }
    Ok(())
}

fn power(u: f64, p: u32, form: NonlinearityForm) -> f64 {
    match form {
        NonlinearityForm::PowerUp => u.powi(p as i32),
        NonlinearityForm::AbsPower => u.abs().powi(p as i32 - 1) * u,
    }
}

/// `u^p` or `|u|^{p−1}u`.
pub fn apply_nonlinearity(u: f64, p: u32, form: NonlinearityForm) -> Result<f64, NonlinearError> {
    check_form(p, form)?;
    Ok(power(u, p, form))
}

/// Pointwise nonlinearity of a whole field.
pub fn apply_nonlinearity_field(
    u: &SolutionField,
    p: u32,
    form: NonlinearityForm,
) -> Result<SolutionField, NonlinearError> {
    check_form(p, form)?;
    Ok(u.map(|v| power(v, p, form)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lifespan {
    pub value: f64,
    /// Natural log of the formula before the cap at `T`.
    pub log_formula: f64,
    /// The formula lies below [`TIME_RESOLUTION`].
    pub underflow: bool,
}

/// Guaranteed existence time.
///
/// Smooth: `min{T, 1/(p²(2c)^{2p} d^{2(p−1)})}`.
/// Rough: `min{T, ((2^{p+2}p)^{1/α} (2c)^{p/α} d^{(p−1)/α})^{−1}}`, in log space.
pub fn lifespan(data_norm: f64, p: u32, c_sp: f64, regime: Regime, alpha: f64, horizon: f64) -> Lifespan {
    if data_norm == 0.0 {
        return Lifespan { value: horizon, log_formula: f64::INFINITY, underflow: false };
    }
    let pf = p as f64;
    let two_c = 2.0 * c_sp;
    let (direct, log_formula) = match regime {
        Regime::Smooth => {
            let denom = pf * pf * two_c.powi(2 * p as i32) * data_norm.powi(2 * (p as i32 - 1));
            let log = -(2.0 * pf.ln() + 2.0 * pf * two_c.ln() + 2.0 * (pf - 1.0) * data_norm.ln());
            (1.0 / denom, log)
        }
        Regime::Rough => {
            let inv = 1.0 / alpha;
            let log = -(inv * (2f64.powi(p as i32 + 2) * pf).ln()
                + pf * inv * two_c.ln()
                + (pf - 1.0) * inv * data_norm.ln());
            (f64::NAN, log)
        }
    };
    let formula = if direct.is_finite() && direct > 0.0 { direct } else { log_formula.exp() };
    Lifespan {
        value: formula.min(horizon),
        log_formula,
        underflow: log_formula < TIME_RESOLUTION.ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    /// `‖u_n‖` for every iterate, starting with the linear solution.
    pub iterate_norms: Vec<f64>,
    /// `‖u_{n+1} − u_n‖`.
    pub difference_norms: Vec<f64>,
    /// Consecutive quotients of difference norms whose denominator exceeds
    /// [`RATIO_FLOOR`].
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub t_star: f64,
}

impl PicardTrace {
    fn push_difference(&mut self, d: f64) {
        if let Some(&prev) = self.difference_norms.last() {
            if prev > RATIO_FLOOR {
                self.ratios.push(d / prev);
            }
        }
        self.difference_norms.push(d);
    }

    fn expanding(&self) -> bool {
        self.ratios.len() >= EXPANSION_LIMIT
            && self.ratios[self.ratios.len() - EXPANSION_LIMIT..].iter().all(|&r| r > 1.0)
    }
}

fn forcing_from(u: &SolutionField, p: u32, form: NonlinearityForm) -> Result<ForcingField, NonlinearError> {
    let dt = crate::problem::uniform_step(&u.t_grid)
        .ok_or_else(|| NonlinearError::BadSetup("time grid is not uniform".into()))?;
    let dx = crate::problem::uniform_step(&u.x_grid)
        .ok_or_else(|| NonlinearError::BadSetup("space grid is not uniform".into()))?;
    let slices = u
        .values
        .iter()
        .map(|row| Sampled::new(0.0, dx, row.iter().map(|&v| power(v, p, form)).collect()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(LinearError::from)?;
    Ok(ForcingField::new(dt, slices)?)
}

/// Picard iteration `u_{n+1} = S[u0, g0; N(u_n)]` on `grid`, starting from the
/// linear solution and stopping once `‖u_{n+1} − u_n‖ < tol.iter`.
pub fn picard_solve(
    spec: &ProblemSpec,
    grid: &GridSpec,
) -> Result<(SolutionField, PicardTrace), NonlinearError> {
    let spec = validate_problem(spec)?;
    if spec.forcing.is_some() {
        return Err(NonlinearError::BadSetup("the forcing is generated by the iteration".into()));
    }
    if (grid.x_max - spec.domain.extent()).abs() > 1e-12 * spec.domain.extent() {
        return Err(NonlinearError::BadSetup(format!(
            "the grid must cover the carried range [0, {}]",
            spec.domain.extent()
        )));
    }
    if grid.n_t < 2 {
        return Err(NonlinearError::BadSetup("need at least two time levels".into()));
    }
    let (p, form) = (spec.p, spec.form);
    let mut u = solve_linear(&spec, grid)?.field;
    let mut trace = PicardTrace {
        iterate_norms: vec![xy_norm(&u, &spec)?.value],
        difference_norms: Vec::new(),
        ratios: Vec::new(),
        converged: false,
        t_star: grid.t_max,
    };
    for _ in 0..spec.tol.max_iter {
        let step = spec.clone().with_forcing(forcing_from(&u, p, form)?);
        let next = solve_linear(&step, grid)?.field;
        let mut diff = next.clone();
        diff.axpy(-1.0, &u);
        let d = xy_norm(&diff, &spec)?.value;
        trace.iterate_norms.push(xy_norm(&next, &spec)?.value);
        trace.push_difference(d);
        u = next;
        if d < spec.tol.iter {
            trace.converged = true;
            break;
        }
        if trace.expanding() {
            return Err(NonlinearError::NonContraction { trace: Box::new(trace), field: Box::new(u) });
        }
    }
    Ok((u, trace))
}

/// Largest consecutive ratio of difference norms.
pub fn contraction_ratio(trace: &PicardTrace) -> Result<f64, NonlinearError> {
    let ratios: Vec<f64> = trace
        .difference_norms
        .windows(2)
        .filter(|w| w[0] > RATIO_FLOOR)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return Err(NonlinearError::InsufficientData);
    }
    Ok(ratios.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Both sides of `||v|^{p−1}v − |w|^{p−1}w| ⩽ 2^{p+1}p(|v|^{p−1} + |w|^{p−1})|v − w|`.
pub fn nonlinearity_difference_bound(v: Complex64, w: Complex64, p: u32) -> (f64, f64) {
    let e = p as i32 - 1;
    let lhs = (v * v.norm().powi(e) - w * w.norm().powi(e)).norm();
    let c = 2f64.powi(p as i32 + 1) * p as f64;
    let rhs = c * (v.norm().powi(e) + w.norm().powi(e)) * (v - w).norm();
    (lhs, rhs)
}
