//! Problem description, regularity regimes, grids and solution fields.

use crate::sampled::{SampleError, Sampled};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("s = {s} lies in neither the smooth range (1/2, 3/2) nor the rough range (1/2 - 1/p, 1/2) for p = {p}")]
    OutOfRange { s: f64, p: u32 },
    #[error("incompatible data: {0}")]
    IncompatibleData(String),
    #[error("horizon T = {0} must satisfy 0 < T < 1")]
    BadHorizon(f64),
    #[error("nonlinearity u^p needs odd p, got p = {0}")]
    BadNonlinearity(u32),
    #[error("bad datum: {0}")]
    BadDatum(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Smooth,
    Rough,
}

/// Spatial regularity `s`, the matching temporal order `m = (2s+1)/4` and
/// the regime the pair falls in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s: f64,
    pub m: f64,
    pub regime: Regime,
}

impl SobolevIndex {
    /// Temporal order matched to `s`.
    pub fn time_order(s: f64) -> f64 {
        (2.0 * s + 1.0) / 4.0
    }
}

pub fn classify_regime(s: f64, p: u32) -> Result<SobolevIndex, ProblemError> {
    if p < 2 || !s.is_finite() {
        return Err(ProblemError::OutOfRange { s, p });
    }
    let regime = if s > 0.5 && s < 1.5 {
        Regime::Smooth
    } else if s < 0.5 && s > 0.5 - 1.0 / p as f64 {
        Regime::Rough
    } else {
        return Err(ProblemError::OutOfRange { s, p });
    };
    Ok(SobolevIndex {
        s,
        m: SobolevIndex::time_order(s),
        regime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `(0, ∞)`, with profiles carried on `[0, l_trunc]`.
    HalfLine { l_trunc: f64 },
    /// `(0, ell)`.
    Interval { ell: f64 },
}

impl Domain {
    /// Right end of the carried spatial range.
    pub fn extent(&self) -> f64 {
        match *self {
            Domain::HalfLine { l_trunc } => l_trunc,
            Domain::Interval { ell } => ell,
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Domain::Interval { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonlinearityForm {
    /// `u^p`, defined for odd `p`.
    PowerUp,
    /// `|u|^{p-1} u`.
    AbsPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute target for contour and spectral quadrature.
    pub quad: f64,
    /// Picard stopping threshold on the discrete solution-space norm.
    pub iter: f64,
    pub max_iter: usize,
    /// Relative tolerance for the compatibility conditions.
    pub compat: f64,
    /// Largest admissible `|u0|` at the truncation point of a half-line profile.
    pub tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-10,
            iter: 1e-8,
            max_iter: 50,
            compat: 1e-8,
            tail: 1e-10,
        }
    }
}

/// Forcing sampled on a uniform space-time grid: `slices[j]` is `f(·, j·dt)`
/// on `[0, x_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingField {
    pub dt: f64,
    pub slices: Vec<Sampled>,
}

impl ForcingField {
    pub fn new(dt: f64, slices: Vec<Sampled>) -> Result<Self, ProblemError> {
        if slices.len() < 2 || !(dt > 0.0) {
            return Err(ProblemError::BadDatum(
                "forcing needs at least two time slices and positive dt".into(),
            ));
        }
        let (a, b, n) = (slices[0].start(), slices[0].end(), slices[0].len());
        if slices
            .iter()
            .any(|s| s.start() != a || (s.end() - b).abs() > 1e-12 * b.abs().max(1.0) || s.len() != n)
        {
            return Err(ProblemError::BadDatum(
                "forcing slices must share one spatial grid".into(),
            ));
        }
        Ok(Self { dt, slices })
    }

    /// Samples `f(x, t)` on `[0, x_max] × [0, t_max]`.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(
        x_max: f64,
        nx: usize,
        t_max: f64,
        nt: usize,
        f: F,
    ) -> Self {
        let dt = t_max / nt as f64;
        let slices = (0..=nt)
            .map(|j| {
                let t = j as f64 * dt;
                Sampled::from_fn(0.0, x_max, nx, |x| f(x, t))
            })
            .collect();
        Self { dt, slices }
    }

    pub fn t_max(&self) -> f64 {
        self.dt * (self.slices.len() - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.slices.len()).map(|j| j as f64 * self.dt).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.max_abs() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().fold(0.0, |m, s| m.max(s.max_abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub domain: Domain,
    pub horizon: f64,
    pub index: SobolevIndex,
    pub p: u32,
    pub form: NonlinearityForm,
    pub u0: Sampled,
    pub g0: Sampled,
    pub h0: Option<Sampled>,
    pub forcing: Option<ForcingField>,
    pub tol: Tolerances,
    pub c_sp: f64,
}

impl ProblemSpec {
    /// A spec with default tolerances, `c_sp = 1` and no forcing.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        domain: Domain,
        horizon: f64,
        s: f64,
        p: u32,
        form: NonlinearityForm,
        u0: Sampled,
        g0: Sampled,
        h0: Option<Sampled>,
    ) -> Result<Self, ProblemError> {
        let index = classify_regime(s, p)?;
        Ok(Self {
            domain,
            horizon,
            index,
            p,
            form,
            u0,
            g0,
            h0,
            forcing: None,
            tol: Tolerances::default(),
            c_sp: 1.0,
        })
    }

    pub fn with_forcing(mut self, forcing: ForcingField) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn regime(&self) -> Regime {
        self.index.regime
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Checks every invariant of a [`ProblemSpec`] and returns its normal form.
pub fn validate_problem(spec: &ProblemSpec) -> Result<ProblemSpec, ProblemError> {
    let mut out = spec.clone();
    let t = spec.horizon;
    if !(t > 0.0 && t < 1.0) {
        return Err(ProblemError::BadHorizon(t));
    }
    let index = classify_regime(spec.index.s, spec.p)?;
    out.index = index;
    out.form = match (spec.form, spec.p % 2 == 1) {
        (NonlinearityForm::PowerUp, false) => return Err(ProblemError::BadNonlinearity(spec.p)),
        (_, true) => NonlinearityForm::PowerUp,
        (NonlinearityForm::AbsPower, false) => NonlinearityForm::AbsPower,
    };
    if !(spec.c_sp > 0.0 && spec.c_sp.is_finite()) {
        return Err(ProblemError::BadDatum(format!("c_sp = {} must be positive", spec.c_sp)));
    }

    let extent = spec.domain.extent();
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(ProblemError::BadDatum(format!("spatial extent {extent} must be positive")));
    }
    if spec.u0.start() != 0.0 || !close(spec.u0.end(), extent, 1e-9) {
        return Err(ProblemError::BadDatum(format!(
            "u0 must be sampled on [0, {extent}], got [{}, {}]",
            spec.u0.start(),
            spec.u0.end()
        )));
    }
    if let Domain::HalfLine { .. } = spec.domain {
        if spec.u0.last().abs() >= spec.tol.tail {
            return Err(ProblemError::BadDatum(format!(
                "|u0(L_trunc)| = {:e} exceeds the tail tolerance {:e}",
                spec.u0.last().abs(),
                spec.tol.tail
            )));
        }
    }
    let check_signal = |name: &str, g: &Sampled| -> Result<(), ProblemError> {
        if g.start() != 0.0 || g.end() < t * (1.0 - 1e-12) {
            return Err(ProblemError::BadDatum(format!(
                "{name} must be sampled on [0, T] with T = {t}, got [{}, {}]",
                g.start(),
                g.end()
            )));
        }
        Ok(())
    };
    check_signal("g0", &spec.g0)?;
    match (spec.domain, &spec.h0) {
        (Domain::Interval { .. }, Some(h0)) => check_signal("h0", h0)?,
        (Domain::Interval { .. }, None) => {
            return Err(ProblemError::BadDatum("interval problems need h0".into()))
        }
        (Domain::HalfLine { .. }, Some(_)) => {
            return Err(ProblemError::BadDatum("h0 is only meaningful on the interval".into()))
        }
        (Domain::HalfLine { .. }, None) => {}
    }
    if let Some(f) = &spec.forcing {
        if f.slices[0].start() != 0.0 || !close(f.slices[0].end(), extent, 1e-9) {
            return Err(ProblemError::BadDatum(format!(
                "forcing must be sampled on [0, {extent}]"
            )));
        }
        if f.t_max() < t * (1.0 - 1e-12) {
            return Err(ProblemError::BadDatum("forcing must cover [0, T]".into()));
        }
    }

    if index.regime == Regime::Smooth {
        let rel = spec.tol.compat;
        if !close(spec.u0.first(), spec.g0.first(), rel) {
            return Err(ProblemError::IncompatibleData(format!(
                "u0(0) = {} but g0(0) = {}",
                spec.u0.first(),
                spec.g0.first()
            )));
        }
        if let Some(h0) = &spec.h0 {
            if !close(spec.u0.last(), h0.first(), rel) {
                return Err(ProblemError::IncompatibleData(format!(
                    "u0(ell) = {} but h0(0) = {}",
                    spec.u0.last(),
                    h0.first()
                )));
            }
        }
    }
    Ok(out)
}

/// Uniform evaluation grid on `[0, x_max] × [0, t_max]` with `n_x × n_t` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_t: usize,
    pub x_max: f64,
    pub t_max: f64,
}

impl GridSpec {
    pub fn new(n_x: usize, n_t: usize, x_max: f64, t_max: f64) -> Result<Self, ProblemError> {
        if n_x < 2 || n_t < 2 {
            return Err(ProblemError::BadDatum("grids need at least 2 points per axis".into()));
        }
        if !(x_max > 0.0 && t_max > 0.0 && x_max.is_finite() && t_max.is_finite()) {
            return Err(ProblemError::BadDatum("grid extents must be positive".into()));
        }
        Ok(Self {
            n_x,
            n_t,
            x_max,
            t_max,
        })
    }

    pub fn dx(&self) -> f64 {
        self.x_max / (self.n_x - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.n_t - 1) as f64
    }

    pub fn x_grid(&self) -> Vec<f64> {
        uniform(self.x_max, self.n_x)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        uniform(self.t_max, self.n_t)
    }
}

fn uniform(max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i == n - 1 { max } else { max * i as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Left,
    Right,
}

/// Solution values on an `(x, t)` grid; `values[j][i] = u(x_i, t_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    /// `u(0, t_j)`.
    pub left_trace: Vec<f64>,
    /// `u(ell, t_j)` on the interval.
    pub right_trace: Option<Vec<f64>>,
}

impl SolutionField {
    pub fn zeros(x_grid: Vec<f64>, t_grid: Vec<f64>, interval: bool) -> Self {
        let values = vec![vec![0.0; x_grid.len()]; t_grid.len()];
        let left_trace = vec![0.0; t_grid.len()];
        let right_trace = interval.then(|| vec![0.0; t_grid.len()]);
        Self {
            x_grid,
            t_grid,
            values,
            left_trace,
            right_trace,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j][i]
    }

    /// Profile `u(·, t_j)`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// Signal `u(x_i, ·)`.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[i]).collect()
    }

    /// Refreshes the stored traces from the first and (on the interval) last columns.
    pub fn sync_traces(&mut self) {
        self.left_trace = self.column(0);
        if self.right_trace.is_some() {
            self.right_trace = Some(self.column(self.x_grid.len() - 1));
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    /// Pointwise `self + factor * other`; grids must match.
    pub fn axpy(&mut self, factor: f64, other: &SolutionField) {
        for (r, o) in self.values.iter_mut().zip(&other.values) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += factor * b;
            }
        }
        for (a, b) in self.left_trace.iter_mut().zip(&other.left_trace) {
            *a += factor * b;
        }
        if let (Some(r), Some(o)) = (self.right_trace.as_mut(), other.right_trace.as_ref()) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += factor * b;
            }
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SolutionField {
        let mut out = self.clone();
        for v in out.values.iter_mut().flatten() {
            *v = f(*v);
        }
        for v in out.left_trace.iter_mut() {
            *v = f(*v);
        }
        if let Some(r) = out.right_trace.as_mut() {
            for v in r.iter_mut() {
                *v = f(*v);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest pointwise difference to another field on the same grid.
    pub fn max_abs_diff(&self, other: &SolutionField) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Row `j` as a sampled profile; requires a uniform x grid.
    pub fn profile(&self, j: usize) -> Result<Sampled, SampleError> {
        let dx = uniform_step(&self.x_grid).ok_or(SampleError::BadStep(f64::NAN))?;
        Sampled::new(self.x_grid[0], dx, self.values[j].clone())
    }

    /// Column `i` as a sampled signal; requires a uniform t grid.
    pub fn signal(&self, i: usize) -> Result<Sampled, SampleError> {
        let dt = uniform_step(&self.t_grid).ok_or(SampleError::BadStep(f64::NAN))?;
        Sampled::new(self.t_grid[0], dt, self.column(i))
    }
}

/// Common step of an equispaced grid, if it is one.
pub fn uniform_step(grid: &[f64]) -> Option<f64> {
    if grid.len() < 2 {
        return None;
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    let ok = grid
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    (ok && h > 0.0).then_some(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halfline_spec(s: f64, p: u32, u00: f64, g00: f64) -> ProblemSpec {
        let u0 = Sampled::from_fn(0.0, 30.0, 300, |x| u00 * (-x * x).exp());
        let g0 = Sampled::from_fn(0.0, 0.5, 50, |_| g00);
        ProblemSpec::new(
            Domain::HalfLine { l_trunc: 30.0 },
            0.5,
            s,
            p,
            NonlinearityForm::PowerUp,
            u0,
            g0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn regimes() {
        let smooth = classify_regime(1.0, 3).unwrap();
        assert_eq!(smooth.regime, Regime::Smooth);
        assert_eq!(smooth.m, 0.75);
        let rough = classify_regime(0.25, 3).unwrap();
        assert_eq!(rough.regime, Regime::Rough);
        assert_eq!(rough.m, 0.375);
        assert!(matches!(classify_regime(0.5, 3), Err(ProblemError::OutOfRange { .. })));
        assert!(classify_regime(0.1, 3).is_err());
        assert!(classify_regime(1.5, 3).is_err());
    }

    #[test]
    fn compatibility() {
        assert!(validate_problem(&halfline_spec(1.0, 3, 1.0, 1.0)).is_ok());
        assert!(matches!(
            validate_problem(&halfline_spec(1.0, 3, 1.0, 0.0)),
            Err(ProblemError::IncompatibleData(_))
        ));
        // Rough data need no compatibility.
        assert!(validate_problem(&halfline_spec(0.25, 3, 1.0, 0.0)).is_ok());
    }

    #[test]
    fn horizon_and_nonlinearity() {
        let mut spec = halfline_spec(1.0, 3, 1.0, 1.0);
        spec.horizon = 1.0;
        assert!(matches!(validate_problem(&spec), Err(ProblemError::BadHorizon(_))));
        let mut spec = halfline_spec(1.0, 2, 1.0, 1.0);
        spec.form = NonlinearityForm::PowerUp;
        assert!(matches!(validate_problem(&spec), Err(ProblemError::BadNonlinearity(2))));
        spec.form = NonlinearityForm::AbsPower;
        assert_eq!(validate_problem(&spec).unwrap().form, NonlinearityForm::AbsPower);
    }

    #[test]
    fn validation_is_idempotent() {
        let mut spec = halfline_spec(1.0, 3, 1.0, 1.0);
        spec.form = NonlinearityForm::AbsPower;
        let once = validate_problem(&spec).unwrap();
        assert_eq!(once.form, NonlinearityForm::PowerUp);
        let twice = validate_problem(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn grids_and_steps() {
        let g = GridSpec::new(5, 3, 2.0, 0.5).unwrap();
        assert_eq!(g.x_grid(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.t_grid(), vec![0.0, 0.25, 0.5]);
        assert!(GridSpec::new(1, 3, 1.0, 1.0).is_err());
        assert_eq!(uniform_step(&[0.0, 0.1, 0.2]), Some(0.1));
        assert_eq!(uniform_step(&[0.0, 0.1, 0.25]), None);
    }
}
