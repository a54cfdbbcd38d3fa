//! Crank–Nicolson reference solver with an explicit reaction term.

use super::OracleError;
use crate::problem::{validate_problem, Domain, GridSpec, NonlinearityForm, ProblemSpec, SolutionField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdMethod {
    /// Linear problem, forcing taken from the problem.
    CrankNicolson,
    /// Adds the reaction term `N(u)` explicitly at the current level.
    Imex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub method: FdMethod,
    pub grid: GridSpec,
    pub field: SolutionField,
    /// Observed order from the grid and two refinements by 2; `None` when
    /// the differences are at rounding level.
    pub convergence_order_estimate: Option<f64>,
}

/// Largest admissible `dt·p·max|u|^{p−1}` for the explicit reaction term.
const STIFFNESS_LIMIT: f64 = 0.5;
/// Backward Euler half steps replacing the first two steps.
const DAMPING_STEPS: usize = 4;

fn thomas(sub: f64, diag: f64, sup: f64, rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = rhs.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    let mut denom = diag;
    scratch[0] = sup / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag - sub * scratch[i - 1];
        scratch[i] = sup / denom;
        rhs[i] = (rhs[i] - sub * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

struct Mesh {
    dx: f64,
    nodes: usize,
}

fn mesh_for(spec: &ProblemSpec, grid: &GridSpec, refine: usize) -> Result<Mesh, OracleError> {
    let dx = grid.dx() / refine as f64;
    let length = match spec.domain {
        Domain::Interval { ell } => {
            if (grid.x_max - ell).abs() > 1e-12 * ell {
                return Err(OracleError::BadGrid(format!("interval grid must end at ℓ = {ell}")));
            }
            ell
        }
        Domain::HalfLine { l_trunc } => l_trunc.max(grid.x_max + 8.0 * grid.t_max.sqrt()),
    };
    let cells = ((length / dx) - 1e-9).ceil() as usize;
    Ok(Mesh { dx, nodes: cells + 1 })
}

/// Runs the scheme on `grid` refined `refine` times in both directions and
/// returns the solution at every grid point.
fn run(spec: &ProblemSpec, grid: &GridSpec, method: FdMethod, refine: usize) -> Result<SolutionField, OracleError> {
    let mesh = mesh_for(spec, grid, refine)?;
    let steps = (grid.n_t - 1) * refine;
    let dt = grid.dt() / refine as f64;
    let dx2 = mesh.dx * mesh.dx;
    let xs: Vec<f64> = (0..mesh.nodes).map(|i| i as f64 * mesh.dx).collect();
    let right_end = spec.domain.is_interval();
    let boundary = |t: f64| -> (f64, f64) {
        let right = if right_end { spec.h0.as_ref().map_or(0.0, |h| h.eval(t)) } else { 0.0 };
        (spec.g0.eval(t), right)
    };
    let forcing_at = |t: f64, out: &mut Vec<f64>| {
        out.clear();
        match &spec.forcing {
            None => out.resize(xs.len(), 0.0),
            Some(f) => {
                let pos = (t / f.dt).clamp(0.0, (f.slices.len() - 1) as f64);
                let j = (pos.floor() as usize).min(f.slices.len() - 2);
                let w = pos - j as f64;
                let (a, b) = (&f.slices[j], &f.slices[j + 1]);
                let end = a.end();
                out.extend(xs.iter().map(|&x| {
                    if x > end * (1.0 + 1e-12) {
                        0.0
                    } else {
                        (1.0 - w) * a.eval(x) + w * b.eval(x)
                    }
                }));
            }
        }
    };
    let reaction = |u: f64| match spec.form {
        NonlinearityForm::PowerUp => u.powi(spec.p as i32),
        NonlinearityForm::AbsPower => u.abs().powi(spec.p as i32 - 1) * u,
    };

    let mut u: Vec<f64> = xs.iter().map(|&x| if x <= spec.u0.end() { spec.u0.eval(x) } else { 0.0 }).collect();
    let (l0, r0) = boundary(0.0);
    u[0] = l0;
    if right_end {
        u[mesh.nodes - 1] = r0;
    }
    let n_in = mesh.nodes - 2;
    let mut out = SolutionField::zeros(grid.x_grid(), grid.t_grid(), right_end);
    let record = |out: &mut SolutionField, j: usize, u: &[f64]| {
        for (i, v) in out.values[j].iter_mut().enumerate() {
            *v = u[i * refine];
        }
    };
    record(&mut out, 0, &u);

    let (mut f_old, mut f_new) = (Vec::new(), Vec::new());
    let mut rhs = vec![0.0; n_in];
    let mut scratch = Vec::new();
    let mut t = 0.0;
    // θ-steps: backward Euler half steps first, then Crank–Nicolson.
    let mut schedule: Vec<(f64, f64)> = Vec::with_capacity(steps + DAMPING_STEPS);
    let damped = DAMPING_STEPS.min(2 * steps) / 2;
    schedule.extend(std::iter::repeat_n((1.0, dt / 2.0), 2 * damped));
    schedule.extend(std::iter::repeat_n((0.5, dt), steps - damped));
    let mut level = 0.0;
    for (theta, tau) in schedule {
        let t_new = t + tau;
        forcing_at(t, &mut f_old);
        forcing_at(t_new, &mut f_new);
        let (lb_new, rb_new) = boundary(t_new);
        if method == FdMethod::Imex && spec.p > 1 {
            let peak = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let stiffness = dt * spec.p as f64 * peak.powi(spec.p as i32 - 1);
            if stiffness > STIFFNESS_LIMIT {
                return Err(OracleError::StabilityWarning(stiffness, t));
            }
        }
        let explicit = (1.0 - theta) * tau / dx2;
        for k in 0..n_in {
            let i = k + 1;
            let lap = u[i - 1] - 2.0 * u[i] + u[i + 1];
            let mut r = u[i] + explicit * lap + tau * (theta * f_new[i] + (1.0 - theta) * f_old[i]);
            if method == FdMethod::Imex {
                r += tau * reaction(u[i]);
            }
            rhs[k] = r;
        }
        let implicit = theta * tau / dx2;
        rhs[0] += implicit * lb_new;
        rhs[n_in - 1] += implicit * if right_end { rb_new } else { 0.0 };
        thomas(-implicit, 1.0 + 2.0 * implicit, -implicit, &mut rhs, &mut scratch);
        u[1..=n_in].copy_from_slice(&rhs);
        u[0] = lb_new;
        u[mesh.nodes - 1] = if right_end { rb_new } else { 0.0 };
        t = t_new;
        level += tau / dt;
        let nearest = level.round();
        if (level - nearest).abs() < 1e-9 && (nearest as usize).is_multiple_of(refine) {
            record(&mut out, nearest as usize / refine, &u);
        }
    }
    out.sync_traces();
    Ok(out)
}

fn final_gap(a: &SolutionField, b: &SolutionField) -> f64 {
    let j = a.t_grid.len() - 1;
    a.row(j).iter().zip(b.row(j)).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// The scheme on `grid` alone.
pub fn fd_field(spec: &ProblemSpec, grid: &GridSpec, method: FdMethod) -> Result<SolutionField, OracleError> {
    let spec = validate_problem(spec)?;
    run(&spec, grid, method, 1)
}

/// The scheme on `grid` plus a Richardson triple with two refinements.
pub fn fd_solve(spec: &ProblemSpec, grid: &GridSpec, method: FdMethod) -> Result<OracleRun, OracleError> {
    let spec = validate_problem(spec)?;
    let fields = [1, 2, 4]
        .iter()
        .map(|&r| run(&spec, grid, method, r))
        .collect::<Result<Vec<_>, _>>()?;
    let (e1, e2) = (final_gap(&fields[0], &fields[1]), final_gap(&fields[1], &fields[2]));
    let scale = fields[2].max_abs().max(1.0);
    let order = (e2 > 1e-13 * scale).then(|| (e1 / e2).log2());
    let field = fields.into_iter().next().expect("three runs");
    Ok(OracleRun { method, grid: *grid, field, convergence_order_estimate: order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Regime;
    use crate::sampled::Sampled;
    use std::f64::consts::PI;

    fn interval(u0: Sampled, h: f64, horizon: f64) -> ProblemSpec {
        ProblemSpec::new(
            Domain::Interval { ell: 1.0 },
            horizon,
            1.0,
            3,
            NonlinearityForm::PowerUp,
            u0,
            Sampled::zeros(0.0, horizon, 10),
            Some(Sampled::from_fn(0.0, horizon, 10, |_| h)),
        )
        .unwrap()
    }

    #[test]
    fn eigenfunction_case() {
        let sp = interval(Sampled::from_fn(0.0, 1.0, 400, |x| (PI * x).sin()), 0.0, 0.1);
        let grid = GridSpec::new(401, 401, 1.0, 0.1).unwrap();
        let run = fd_solve(&sp, &grid, FdMethod::CrankNicolson).unwrap();
        let v = run.field.at(200, 400);
        assert!((v - 0.37273).abs() < 1e-4, "{v}");
        let order = run.convergence_order_estimate.unwrap();
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }

    #[test]
    fn steady_profile_is_kept() {
        let sp = interval(Sampled::from_fn(0.0, 1.0, 50, |x| x), 1.0, 0.5);
        let grid = GridSpec::new(51, 21, 1.0, 0.5).unwrap();
        let field = fd_field(&sp, &grid, FdMethod::CrankNicolson).unwrap();
        for j in 0..field.t_grid.len() {
            for (i, &x) in field.x_grid.iter().enumerate() {
                assert!((field.at(i, j) - x).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn half_line_erfc() {
        let sp = ProblemSpec::new(
            Domain::HalfLine { l_trunc: 10.0 },
            0.4,
            0.25,
            3,
            NonlinearityForm::PowerUp,
            Sampled::zeros(0.0, 10.0, 100),
            Sampled::from_fn(0.0, 0.4, 10, |_| 1.0),
            None,
        )
        .unwrap();
        assert_eq!(sp.regime(), Regime::Rough);
        let grid = GridSpec::new(301, 401, 3.0, 0.4).unwrap();
        let f = fd_field(&sp, &grid, FdMethod::CrankNicolson).unwrap();
        let v = f.at(100, 400);
        let exact = statrs::function::erf::erfc(1.0 / (2.0 * 0.4f64.sqrt()));
        assert!((v - exact).abs() < 1e-4, "{v} vs {exact}");
    }

    #[test]
    fn stiff_reaction_is_reported() {
        let sp = interval(Sampled::from_fn(0.0, 1.0, 50, |x| 30.0 * (PI * x).sin()), 0.0, 0.5);
        let grid = GridSpec::new(51, 11, 1.0, 0.5).unwrap();
        assert!(matches!(fd_field(&sp, &grid, FdMethod::Imex), Err(OracleError::StabilityWarning(..))));
    }
}
