use heatutm::linear::solve_interval;
use heatutm::nonlinear::picard_solve;
use heatutm::norms::data_norm;
use heatutm::oracle::{
    estimate_audit, exact_forcing, exact_solution, fd_field, AuditDatum, AuditScenario, ExactName,
    ExactParams, FdMethod,
};
use heatutm::problem::{Domain, ForcingField, GridSpec, NonlinearityForm, ProblemSpec, SolutionField};
use heatutm::sampled::Sampled;
use std::f64::consts::PI;

fn interval_case(name: ExactName, horizon: f64) -> ProblemSpec {
    let p = ExactParams::default();
    let u = move |x: f64, t: f64| exact_solution(name, &p, x, t);
    let spec = ProblemSpec::new(
        Domain::Interval { ell: 1.0 },
        horizon,
        1.0,
        3,
        NonlinearityForm::PowerUp,
        Sampled::from_fn(0.0, 1.0, 200, |x| u(x, 0.0)),
        Sampled::from_fn(0.0, horizon, 100, |t| u(0.0, t)),
        Some(Sampled::from_fn(0.0, horizon, 100, |t| u(1.0, t))),
    )
    .unwrap();
    if name == ExactName::ManufacturedForced {
        spec.with_forcing(ForcingField::from_fn(1.0, 200, horizon, 100, |x, t| exact_forcing(name, &p, x, t)))
    } else {
        spec
    }
}

fn relative_l2_at_end(a: &SolutionField, b: &SolutionField, stride: usize) -> f64 {
    let (ja, jb) = (a.t_grid.len() - 1, b.t_grid.len() - 1);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..a.x_grid.len() {
        let r = b.at(i * stride, jb);
        num += (a.at(i, ja) - r).powi(2);
        den += r * r;
    }
    (num / den).sqrt()
}

#[test]
fn transform_solver_matches_finite_differences_on_smooth_scenarios() {
    let horizon = 0.2;
    for name in [ExactName::EigenDecay, ExactName::SteadyLinear, ExactName::ManufacturedForced] {
        let spec = interval_case(name, horizon);
        let grid = GridSpec::new(11, 5, 1.0, horizon).unwrap();
        let utm = solve_interval(&spec, &grid).unwrap().field;
        let fine = GridSpec::new(201, 401, 1.0, horizon).unwrap();
        let fd = fd_field(&spec, &fine, FdMethod::CrankNicolson).unwrap();
        let gap = relative_l2_at_end(&utm, &fd, 20);
        assert!(gap < 1e-3, "{name:?}: {gap}");
        let p = ExactParams::default();
        for (i, &x) in utm.x_grid.iter().enumerate() {
            let e = exact_solution(name, &p, x, horizon);
            assert!((utm.at(i, 4) - e).abs() < 1e-5, "{name:?} at x = {x}");
        }
    }
}

#[test]
fn constant_bearing_estimates_have_scale_free_ratios() {
    for scenario in [
        AuditScenario::PureTime { s: 0.25 },
        AuditScenario::HalflineForced { s: 1.0 },
        AuditScenario::IntervalForced { s: 1.0 },
    ] {
        let r = estimate_audit(scenario).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        assert_eq!(r.bound, None);
    }
}

#[test]
fn exponential_datum_obeys_the_space_estimate() {
    let r = estimate_audit(AuditScenario::IvpSpace { datum: AuditDatum::Exponential, s: 1.0 }).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn data_to_solution_map_is_lipschitz_on_small_data() {
    let horizon = 0.05;
    let spec = |a: f64| {
        ProblemSpec::new(
            Domain::Interval { ell: 1.0 },
            horizon,
            1.0,
            3,
            NonlinearityForm::PowerUp,
            Sampled::from_fn(0.0, 1.0, 100, |x| a * (PI * x).sin()),
            Sampled::zeros(0.0, horizon, 20),
            Some(Sampled::zeros(0.0, horizon, 20)),
        )
        .unwrap()
    };
    let grid = GridSpec::new(11, 6, 1.0, horizon).unwrap();
    let (s1, s2) = (spec(0.05), spec(0.051));
    let (u1, _) = picard_solve(&s1, &grid).unwrap();
    let (u2, _) = picard_solve(&s2, &grid).unwrap();
    let mut diff = spec(0.001);
    diff.u0 = Sampled::from_fn(0.0, 1.0, 100, |x| 0.001 * (PI * x).sin());
    let k = u1.max_abs_diff(&u2) / data_norm(&diff).unwrap();
    assert!(k.is_finite() && k > 0.0 && k < 10.0, "{k}");
}
