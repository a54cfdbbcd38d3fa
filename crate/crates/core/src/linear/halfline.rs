//! The forced half-line problem as a sum of four simpler problems.

use super::ivp::{forced_ivp_values, heat_ivp_values, ForcingSlices};
use super::pure::{pure_values, PureKernel};
use super::{grid_axes, LinearError, LinearSolveReport, SignalGrid, Targets};
use crate::problem::{
    validate_problem, Domain, ForcingField, GridSpec, ProblemSpec, Regime, SolutionField,
};
use crate::sampled::{Piecewise, Sampled};
use crate::transforms::{even_reflection, extend_forcing_slice};

/// Names of the stored pieces: `S[U0;0]`, `S[0;F]`, `S[0,G0;0]` and
/// `−S[0,W|x=0;0]` (stored with its sign so the pieces add up).
pub const HALFLINE_COMPONENTS: [&str; 4] = ["initial", "forcing", "boundary", "forcing_trace"];

/// Values of the four pieces at every target.
pub(crate) struct HalflinePieces {
    pub initial: Vec<f64>,
    pub forcing: Vec<f64>,
    pub boundary: Vec<f64>,
    pub forcing_trace: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl HalflinePieces {
    pub fn total(&self, p: usize) -> f64 {
        self.initial[p] + self.forcing[p] + self.boundary[p] - self.forcing_trace[p]
    }
}

/// Runs the four-problem superposition at `targets`. `u0` is the whole-line
/// initial datum, `forcing` the whole-line forcing.
pub(crate) fn halfline_pipeline(
    u0: &Piecewise,
    g0: &dyn Fn(f64) -> f64,
    forcing: Option<&ForcingSlices>,
    targets: &Targets,
    signal_grid: &SignalGrid,
    tol: f64,
) -> Result<HalflinePieces, LinearError> {
    let n = targets.len();
    let mut all = targets.clone();
    let sig_ts = signal_grid.distinct_times();
    let trace = all.add_grid(&[0.0], &sig_ts);

    let initial = heat_ivp_values(u0, &all, tol);
    let mut residuals = vec![initial.residual];
    let forcing_vals = match forcing {
        Some(f) => {
            let r = forced_ivp_values(f, &all, tol);
            residuals.push(r.residual);
            r.values
        }
        None => vec![0.0; all.len()],
    };
    let mut boundary = vec![0.0; all.len()];
    let mut forcing_trace = vec![0.0; all.len()];
    if !signal_grid.is_empty() {
        let g_vals: Vec<f64> = sig_ts
            .iter()
            .zip(trace.clone())
            .map(|(&t, p)| g0(t) - initial.values[p])
            .collect();
        let big_g = signal_grid.assemble(&g_vals)?;
        let w_vals: Vec<f64> = trace.clone().map(|p| forcing_vals[p]).collect();
        let w0 = signal_grid.assemble(&w_vals)?;
        let mut signals: Vec<&Piecewise> = vec![&big_g];
        if forcing.is_some() {
            signals.push(&w0);
        }
        let pure = pure_values(PureKernel::HalfLine, &signals, &all, tol);
        boundary = pure[0].values.clone();
        residuals.push(pure[0].residual);
        if let Some(p) = pure.get(1) {
            forcing_trace = p.values.clone();
        }
    }
    Ok(HalflinePieces {
        initial: initial.values[..n].to_vec(),
        forcing: forcing_vals[..n].to_vec(),
        boundary: boundary[..n].to_vec(),
        forcing_trace: forcing_trace[..n].to_vec(),
        residuals,
    })
}

/// Extends every forcing slice to the whole line.
pub(crate) fn extend_forcing(
    f: &ForcingField,
    regime: Regime,
    interval: Option<f64>,
) -> ForcingSlices {
    ForcingSlices {
        dt: f.dt,
        slices: f
            .slices
            .iter()
            .map(|s| extend_forcing_slice(s, regime, interval))
            .collect(),
    }
}

/// Fills a field from values laid out as `Targets::grid(xs, ts)`.
pub(crate) fn field_from(xs: &[f64], ts: &[f64], values: &[f64], interval: bool) -> SolutionField {
    let mut field = SolutionField::zeros(xs.to_vec(), ts.to_vec(), interval);
    for (j, row) in field.values.iter_mut().enumerate() {
        row.copy_from_slice(&values[j * xs.len()..(j + 1) * xs.len()]);
    }
    field.sync_traces();
    field
}

pub(crate) fn check_grid(spec: &ProblemSpec, grid: &GridSpec) -> Result<(), LinearError> {
    if grid.t_max > spec.horizon * (1.0 + 1e-12) {
        return Err(LinearError::BadGrid(format!(
            "grid reaches t = {} past the horizon {}",
            grid.t_max, spec.horizon
        )));
    }
    let extent = spec.domain.extent();
    match spec.domain {
        Domain::HalfLine { .. } if grid.x_max > extent * (1.0 + 1e-12) => Err(LinearError::BadGrid(
            format!("grid reaches x = {} past the truncation {}", grid.x_max, extent),
        )),
        Domain::Interval { .. } if (grid.x_max - extent).abs() > 1e-12 * extent => Err(
            LinearError::BadGrid(format!("interval grid must end at ℓ = {extent}")),
        ),
        _ => Ok(()),
    }
}

fn signal_fn(g: &Sampled) -> impl Fn(f64) -> f64 + '_ {
    move |t| g.eval(t)
}

/// `S[U0;0] + S[0;F] + S[0,G0;0] − S[0,W|x=0;0]` on the grid, with
/// `G0 = g0 − U(0,·)`.
pub fn solve_halfline_decomposed(
    spec: &ProblemSpec,
    grid: &GridSpec,
) -> Result<LinearSolveReport, LinearError> {
    let spec = validate_problem(spec)?;
    if spec.domain.is_interval() {
        return Err(LinearError::DomainMismatch("expected a half-line problem".into()));
    }
    check_grid(&spec, grid)?;
    let (xs, ts) = grid_axes(grid);
    let u0 = even_reflection(&spec.u0);
    let forcing = spec
        .forcing
        .as_ref()
        .filter(|f| !f.is_zero())
        .map(|f| extend_forcing(f, spec.regime(), None));
    let targets = Targets::grid(&xs, &ts);
    let sg = SignalGrid::new(&ts)?;
    let g0 = signal_fn(&spec.g0);
    let pieces = halfline_pipeline(&u0, &g0, forcing.as_ref(), &targets, &sg, spec.tol.quad)?;
    let total: Vec<f64> = (0..targets.len()).map(|p| pieces.total(p)).collect();
    let negated: Vec<f64> = pieces.forcing_trace.iter().map(|v| -v).collect();
    let components = vec![
        (HALFLINE_COMPONENTS[0].to_string(), field_from(&xs, &ts, &pieces.initial, false)),
        (HALFLINE_COMPONENTS[1].to_string(), field_from(&xs, &ts, &pieces.forcing, false)),
        (HALFLINE_COMPONENTS[2].to_string(), field_from(&xs, &ts, &pieces.boundary, false)),
        (HALFLINE_COMPONENTS[3].to_string(), field_from(&xs, &ts, &negated, false)),
    ];
    Ok(LinearSolveReport {
        field: field_from(&xs, &ts, &total, false),
        components,
        quadrature_residuals: pieces.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::NonlinearityForm;
    use statrs::function::erf::erfc;

    fn spec(u0: Sampled, g0: Sampled, s: f64) -> ProblemSpec {
        ProblemSpec::new(
            Domain::HalfLine { l_trunc: u0.end() },
            g0.end(),
            s,
            3,
            NonlinearityForm::PowerUp,
            u0,
            g0,
            None,
        )
        .unwrap()
    }

    #[test]
    fn zero_data() {
        let sp = spec(Sampled::zeros(0.0, 10.0, 200), Sampled::zeros(0.0, 0.5, 50), 1.0);
        let grid = GridSpec::new(11, 6, 2.0, 0.5).unwrap();
        let r = solve_halfline_decomposed(&sp, &grid).unwrap();
        assert_eq!(r.field.max_abs(), 0.0);
        assert!(r.components.iter().all(|(_, c)| c.max_abs() == 0.0));
    }

    #[test]
    fn erfc_case() {
        let sp = spec(Sampled::zeros(0.0, 10.0, 200), Sampled::from_fn(0.0, 0.5, 10, |_| 1.0), 0.25);
        let grid = GridSpec::new(16, 9, 3.0, 0.4).unwrap();
        let r = solve_halfline_decomposed(&sp, &grid).unwrap();
        let f = &r.field;
        for (j, &t) in f.t_grid.iter().enumerate().skip(1) {
            for (i, &x) in f.x_grid.iter().enumerate().skip(1) {
                let exact = erfc(x / (2.0 * t.sqrt()));
                assert!((f.at(i, j) - exact).abs() < 1e-9, "({x},{t})");
            }
            assert!((f.left_trace[j] - 1.0).abs() < 1e-12);
        }
        assert!(r.superposition_defect() < 1e-12);
    }

    #[test]
    fn gaussian_trace_case() {
        let u0 = Sampled::from_fn(0.0, 12.0, 1200, |x| (-x * x).exp());
        let g0 = Sampled::from_fn(0.0, 0.5, 200, |t| 1.0 / (1.0 + 4.0 * t).sqrt());
        let sp = spec(u0, g0, 1.0);
        let grid = GridSpec::new(9, 5, 2.0, 0.5).unwrap();
        let r = solve_halfline_decomposed(&sp, &grid).unwrap();
        let f = &r.field;
        for (j, &t) in f.t_grid.iter().enumerate() {
            for (i, &x) in f.x_grid.iter().enumerate() {
                let exact = (-x * x / (1.0 + 4.0 * t)).exp() / (1.0 + 4.0 * t).sqrt();
                assert!((f.at(i, j) - exact).abs() < 1e-8, "({x},{t}): {}", f.at(i, j));
            }
        }
        assert!(r.component("boundary").unwrap().max_abs() < 1e-8);
    }
}
