//! The forced interval problem: a half-line solve plus a pure problem that
//! corrects the value at `x = ℓ`.

use super::halfline::{check_grid, extend_forcing, field_from, halfline_pipeline};
use super::pure::{pure_values, PureKernel};
use super::{grid_axes, LinearError, LinearSolveReport, SignalGrid, Targets};
use crate::problem::{validate_problem, GridSpec, ProblemSpec};
use crate::transforms::extend_interval_datum;

/// Names of the stored pieces: the half-line solution restricted to `[0, ℓ]`
/// and the reduced interval solution `S[0,0,w0;0]`.
pub const INTERVAL_COMPONENTS: [&str; 2] = ["halfline", "reduced"];

pub fn solve_interval(spec: &ProblemSpec, grid: &GridSpec) -> Result<LinearSolveReport, LinearError> {
    let spec = validate_problem(spec)?;
    if !spec.domain.is_interval() {
        return Err(LinearError::DomainMismatch("expected an interval problem".into()));
    }
    check_grid(&spec, grid)?;
    let ell = spec.domain.extent();
    let h0 = spec
        .h0
        .as_ref()
        .ok_or_else(|| LinearError::DomainMismatch("interval problem without h0".into()))?;
    let (xs, ts) = grid_axes(grid);
    let u0 = extend_interval_datum(&spec.u0, ell);
    let forcing = spec
        .forcing
        .as_ref()
        .filter(|f| !f.is_zero())
        .map(|f| extend_forcing(f, spec.regime(), Some(ell)));
    let sg = SignalGrid::new(&ts)?;
    let sig_ts = sg.distinct_times();
    let mut targets = Targets::grid(&xs, &ts);
    let n = targets.len();
    let right = targets.add_grid(&[ell], &sig_ts);
    let g0 = |t: f64| spec.g0.eval(t);
    let pieces = halfline_pipeline(&u0, &g0, forcing.as_ref(), &targets, &sg, spec.tol.quad)?;
    let mut residuals = pieces.residuals.clone();
    let half: Vec<f64> = (0..n).map(|p| pieces.total(p)).collect();
    let mut reduced = vec![0.0; n];
    if !sg.is_empty() {
        let w_vals: Vec<f64> = sig_ts
            .iter()
            .zip(right)
            .map(|(&t, p)| h0.eval(t) - pieces.total(p))
            .collect();
        let w0 = sg.assemble(&w_vals)?;
        let field_targets = Targets::grid(&xs, &ts);
        let r = pure_values(PureKernel::Interval { ell }, &[&w0], &field_targets, spec.tol.quad);
        reduced = r[0].values.clone();
        residuals.push(r[0].residual);
    }
    let total: Vec<f64> = half.iter().zip(&reduced).map(|(a, b)| a + b).collect();
    Ok(LinearSolveReport {
        field: field_from(&xs, &ts, &total, true),
        components: vec![
            (INTERVAL_COMPONENTS[0].to_string(), field_from(&xs, &ts, &half, true)),
            (INTERVAL_COMPONENTS[1].to_string(), field_from(&xs, &ts, &reduced, true)),
        ],
        quadrature_residuals: residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Domain, NonlinearityForm};
    use crate::sampled::Sampled;
    use std::f64::consts::PI;

    fn spec(u0: Sampled, g0: Sampled, h0: Sampled, s: f64) -> ProblemSpec {
        ProblemSpec::new(
            Domain::Interval { ell: u0.end() },
            g0.end(),
            s,
            3,
            NonlinearityForm::PowerUp,
            u0,
            g0,
            Some(h0),
        )
        .unwrap()
    }

    #[test]
    fn eigenfunction_decay() {
        let sp = spec(
            Sampled::from_fn(0.0, 1.0, 200, |x| (PI * x).sin()),
            Sampled::zeros(0.0, 0.1, 20),
            Sampled::zeros(0.0, 0.1, 20),
            1.0,
        );
        let grid = GridSpec::new(11, 5, 1.0, 0.1).unwrap();
        let r = solve_interval(&sp, &grid).unwrap();
        let v = r.field.at(5, 4);
        let exact = (-PI * PI * 0.1).exp();
        assert!((v - exact).abs() < 1e-5 * exact, "{v} vs {exact}");
        assert!(r.field.right_trace.as_ref().unwrap().iter().all(|v| v.abs() < 1e-12));
        assert!(r.superposition_defect() < 1e-12);
    }

    #[test]
    fn steady_state() {
        let sp = spec(
            Sampled::from_fn(0.0, 1.0, 100, |x| x),
            Sampled::zeros(0.0, 0.5, 50),
            Sampled::from_fn(0.0, 0.5, 50, |_| 1.0),
            1.0,
        );
        let grid = GridSpec::new(11, 6, 1.0, 0.5).unwrap();
        let r = solve_interval(&sp, &grid).unwrap();
        let mut worst = 0.0f64;
        for (j, _) in r.field.t_grid.iter().enumerate() {
            for (i, &x) in r.field.x_grid.iter().enumerate() {
                worst = worst.max((r.field.at(i, j) - x).abs());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn zero_data() {
        let sp = spec(
            Sampled::zeros(0.0, 1.0, 20),
            Sampled::zeros(0.0, 0.2, 10),
            Sampled::zeros(0.0, 0.2, 10),
            1.0,
        );
        let grid = GridSpec::new(5, 3, 1.0, 0.2).unwrap();
        assert_eq!(solve_interval(&sp, &grid).unwrap().field.max_abs(), 0.0);
    }
}
