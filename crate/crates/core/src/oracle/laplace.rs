//! `‖Lφ‖_{L²(0,∞)} ⩽ √π ‖φ‖_{L²(0,∞)}` for `Lφ(t) = ∫_0^∞ e^{−τt} φ(τ) dτ`.

use super::OracleError;
use crate::quadrature::gauss_legendre;
use crate::sampled::{Piecewise, Sampled};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A truncated profile must have fallen below this at its last sample.
pub const TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceBound {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, zero for the zero profile.
    pub ratio: f64,
}

/// Both sides of the bound for `φ` supported on `[0, ∞)` and zero outside
/// its samples. With `truncated` set, `φ` stands for a profile cut off at its
/// last sample, which must then be below [`TAIL_TOL`] relative to its peak.
pub fn laplace_bound_test(phi: &Piecewise, truncated: bool) -> Result<LaplaceBound, OracleError> {
    let (a, _) = phi.support();
    if a < 0.0 {
        return Err(OracleError::BadGrid(format!("profile starts at τ = {a} < 0")));
    }
    let peak = phi.max_abs();
    if peak == 0.0 {
        return Ok(LaplaceBound { lhs: 0.0, rhs: 0.0, ratio: 0.0 });
    }
    let last = phi.segments().last().expect("nonempty profile").last().abs();
    if truncated && last > TAIL_TOL * peak {
        return Err(OracleError::TailTooFat(last / peak));
    }
    // t = u/(1−u) maps (0, 1) onto (0, ∞); the integrand stays bounded at u = 1.
    let mut edges: Vec<f64> = (0..=12).rev().map(|j| 0.5f64.powi(j + 6)).collect();
    edges.insert(0, 0.0);
    edges.extend((1..64).map(|j| j as f64 / 64.0).filter(|&u| u > 0.5f64.powi(6)));
    edges.push(1.0);
    let gl = gauss_legendre(16);
    let lhs_sq: f64 = edges
        .par_windows(2)
        .map(|w| {
            gl.mapped(w[0], w[1])
                .map(|(u, wt)| {
                    let t = u / (1.0 - u);
                    let l = phi.exp_integral(Complex64::new(-t, 0.0)).re;
                    wt * l * l / ((1.0 - u) * (1.0 - u))
                })
                .sum::<f64>()
        })
        .sum();
    let norm_sq: f64 = phi
        .segments()
        .map(|s| {
            let h = s.step();
            (0..s.len() - 1)
                .map(|i| {
                    let x0 = s.abscissa(i);
                    gl.integrate(x0, x0 + h, |x| s.eval(x).powi(2))
                })
                .sum::<f64>()
        })
        .sum();
    let lhs = lhs_sq.sqrt();
    let rhs = PI.sqrt() * norm_sq.sqrt();
    Ok(LaplaceBound { lhs, rhs, ratio: lhs / rhs })
}

/// A nonnegative decaying profile: a random piecewise-linear shape under an
/// exponential envelope, cut off where the envelope drops below `e^{−30}`.
pub fn random_profile<R: Rng>(rng: &mut R) -> Piecewise {
    let rate = rng.gen_range(0.2..5.0);
    let end = 30.0 / rate;
    let knots = rng.gen_range(3..=12);
    let heights: Vec<f64> = (0..=knots).map(|_| rng.gen_range(0.0..1.0)).collect();
    let shape = move |tau: f64| {
        let pos = tau / end * knots as f64;
        let j = (pos.floor() as usize).min(knots - 1);
        let w = pos - j as f64;
        (1.0 - w) * heights[j] + w * heights[j + 1]
    };
    Piecewise::single(Sampled::from_fn(0.0, end, 200, |tau| shape(tau) * (-rate * tau).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceSweep {
    pub count: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

/// Runs the tester on `count` seeded random profiles.
pub fn laplace_sweep(seed: u64, count: usize) -> Result<LaplaceSweep, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = LaplaceSweep { count, violations: 0, max_ratio: 0.0 };
    for _ in 0..count {
        let r = laplace_bound_test(&random_profile(&mut rng), true)?;
        if r.ratio > 1.0 {
            out.violations += 1;
        }
        out.max_ratio = out.max_ratio.max(r.ratio);
    }
    Ok(out)
}
