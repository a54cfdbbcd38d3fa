//! The forced half-line solution evaluated term by term from its integral
//! representation over ℝ and ∂D⁺.

use super::halfline::{check_grid, field_from};
use super::ivp::{duhamel_at, forced_ivp_values, heat_ivp_values, ForcingSlices};
use super::{chunked_sum, grid_axes, LinearError, Targets};
use crate::contours::{choose_truncation_capped, dplus_from_rule, graded_edges, ContourError};
use crate::problem::{validate_problem, GridSpec, ProblemSpec, SolutionField};
use crate::quadrature::RealRule;
use crate::sampled::Piecewise;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

const PANEL_ORDER: usize = 16;
const PHASE_BUDGET: f64 = 10.0;
const RADIUS_CAP: f64 = 5e3;

/// Five-term evaluation: `û0(k)` over ℝ, `û0(−k)` over ∂D⁺, the two forcing
/// terms, and the boundary term `∫_{∂D⁺} e^{ikx−k²t} k g̃0(k², t) dk`.
pub fn solve_halfline_direct(spec: &ProblemSpec, grid: &GridSpec) -> Result<SolutionField, LinearError> {
    let spec = validate_problem(spec)?;
    if spec.domain.is_interval() {
        return Err(LinearError::DomainMismatch("expected a half-line problem".into()));
    }
    check_grid(&spec, grid)?;
    let tol = spec.tol.quad;
    let (xs, ts) = grid_axes(grid);
    let targets = Targets::grid(&xs, &ts);
    let u0 = Piecewise::single(spec.u0.clone());
    let g0 = Piecewise::single(spec.g0.clone());
    let forcing = spec.forcing.as_ref().filter(|f| !f.is_zero()).map(|f| ForcingSlices {
        dt: f.dt,
        slices: f.slices.iter().cloned().map(Piecewise::single).collect(),
    });

    // Terms over ℝ: the whole-line evolution of the zero-extended data.
    let mut values = heat_ivp_values(&u0, &targets, tol).values;
    if let Some(f) = &forcing {
        for (v, w) in values.iter_mut().zip(forced_ivp_values(f, &targets, tol).values) {
            *v += w;
        }
    }

    // Terms over ∂D⁺.
    let t_max = targets.t_max();
    let scale = [&u0, &g0]
        .iter()
        .map(|p| p.envelope().variation + p.max_abs())
        .chain(forcing.iter().map(|f| {
            t_max * f.slices.iter().fold(0.0f64, |m, s| m.max(s.envelope().variation + s.max_abs()))
        }))
        .fold(0.0f64, f64::max);
    let mut radius = vec![0.0; xs.len()];
    if scale > 0.0 && t_max > 0.0 {
        for (r, &x) in radius.iter_mut().zip(&xs) {
            if x <= 0.0 {
                continue;
            }
            let bound = |rr: f64| 2.0 / PI * scale * SQRT_2 / (x * rr);
            *r = match choose_truncation_capped(x, bound, tol, RADIUS_CAP) {
                Ok(t) | Err(ContourError::NoDecay(t)) => t.radius,
            };
        }
    }
    let r_max = radius.iter().fold(0.0f64, |m, &r| m.max(r));
    if r_max > 0.0 {
        let rate = |k: f64| {
            xs.iter()
                .zip(&radius)
                .filter(|(_, &r)| r >= k)
                .fold(0.0f64, |m, (&x, _)| m.max(x * FRAC_1_SQRT_2))
        };
        let edges = graded_edges(r_max, r_max.min(1.0), t_max, rate, PHASE_BUDGET);
        let nodes = dplus_from_rule(&RealRule::composite(&edges, PANEL_ORDER), r_max, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let acc = chunked_sum(nodes.len(), targets.len(), |range, acc| {
            let mut ex = vec![Complex64::new(0.0, 0.0); xs.len()];
            for n in range {
                let (k, w, ksq) = (nodes.nodes[n], nodes.weights[n], nodes.ksq[n]);
                let r = k.norm();
                for ((e, &x), &rad) in ex.iter_mut().zip(&xs).zip(&radius) {
                    *e = if rad >= r && x > 0.0 {
                        w * (i * k * x).exp()
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
                let u0_minus = u0.fourier(-k);
                let g_tilde = g0.exp_integral_at(ksq, &ts);
                let forced = forcing.as_ref().map(|f| {
                    let fhat: Vec<Complex64> = f.slices.iter().map(|s| s.fourier(-k)).collect();
                    duhamel_at(ksq, f.dt, &fhat, &ts)
                });
                let per_t: Vec<Complex64> = ts
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| {
                        let decay = (-ksq * t).exp();
                        let mut v = -decay * u0_minus / (2.0 * PI) - i / PI * decay * k * g_tilde[j];
                        if let Some(d) = &forced {
                            v -= d[j] / (2.0 * PI);
                        }
                        v
                    })
                    .collect();
                for (a, &(xi, tj)) in acc.iter_mut().zip(&targets.points) {
                    *a += (ex[xi] * per_t[tj]).re;
                }
            }
        });
        for (v, a) in values.iter_mut().zip(acc) {
            *v += a;
        }
    }
    for (v, &(xi, tj)) in values.iter_mut().zip(&targets.points) {
        let (x, t) = (xs[xi], ts[tj]);
        if t <= 0.0 {
            *v = spec.u0.eval(x);
        } else if x <= 0.0 {
            *v = spec.g0.eval(t);
        }
    }
    Ok(field_from(&xs, &ts, &values, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::solve_halfline_decomposed;
    use crate::problem::{Domain, NonlinearityForm};
    use crate::sampled::Sampled;

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
        let sp = spec(Sampled::zeros(0.0, 10.0, 100), Sampled::zeros(0.0, 0.5, 10), 1.0);
        let grid = GridSpec::new(5, 3, 2.0, 0.5).unwrap();
        assert_eq!(solve_halfline_direct(&sp, &grid).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn agrees_with_decomposition() {
        let cases = [
            spec(Sampled::zeros(0.0, 10.0, 200), Sampled::from_fn(0.0, 0.5, 10, |_| 1.0), 0.25),
            spec(
                Sampled::from_fn(0.0, 12.0, 1200, |x| (-x * x).exp()),
                Sampled::from_fn(0.0, 0.5, 200, |t| 1.0 / (1.0 + 4.0 * t).sqrt()),
                1.0,
            ),
        ];
        let grid = GridSpec::new(12, 5, 3.0, 0.4).unwrap();
        for sp in &cases {
            let direct = solve_halfline_direct(sp, &grid).unwrap();
            let decomposed = solve_halfline_decomposed(sp, &grid).unwrap().field;
            let diff = direct.max_abs_diff(&decomposed);
            assert!(diff < 1e-6, "{diff}");
        }
    }
}
