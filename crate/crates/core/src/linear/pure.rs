//! Pure boundary value problems: zero initial datum, zero forcing, one
//! nonzero Dirichlet datum.
//!
//! After deforming onto ∂D⁺ and folding the two rays together, the solution is
//! `(2/π) Re ∫_0^∞ K(κ, x) κ J(κ, t) dκ` with `J(κ, t) = ∫_0^t e^{iκ²(t−s)} g(s) ds`
//! and `K = e^{−aκx}` on the half-line or `sinh(aκx)/sinh(aκℓ)` on the interval.

use super::{chunked_sum, expm1, LinearError, PointValues, Targets};
use crate::contours::{choose_truncation_capped, graded_edges, ContourError, A};
use crate::quadrature::RealRule;
use crate::sampled::Piecewise;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// `k_switch = K_SWITCH_SCALE / ℓ`.
pub const K_SWITCH_SCALE: f64 = 1e-3;

const PANEL_ORDER: usize = 16;
const PHASE_BUDGET: f64 = 10.0;
const KAPPA_CAP: f64 = 5e3;
const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PureKernel {
    HalfLine,
    /// Data at `x = ℓ`, zero at `x = 0`.
    Interval { ell: f64 },
}

impl PureKernel {
    fn decay(&self, x: f64) -> f64 {
        match *self {
            PureKernel::HalfLine => x,
            PureKernel::Interval { ell } => ell - x,
        }
    }

    fn phase_rate(&self, x: f64) -> f64 {
        match *self {
            PureKernel::HalfLine => x * FRAC_1_SQRT_2,
            PureKernel::Interval { ell } => (ell + x) * FRAC_1_SQRT_2,
        }
    }

    /// `Some(value)` where the solution is fixed by the data.
    fn identity(&self, g: &Piecewise, x: f64, t: f64) -> Option<f64> {
        if t <= 0.0 {
            return Some(0.0);
        }
        match *self {
            PureKernel::HalfLine if x <= 0.0 => Some(g.eval(t)),
            PureKernel::Interval { .. } if x <= 0.0 => Some(0.0),
            PureKernel::Interval { ell } if x >= ell => Some(g.eval(t)),
            _ => None,
        }
    }

    fn kernel(&self, kappa: f64, x: f64) -> Complex64 {
        match *self {
            PureKernel::HalfLine => (-A * (kappa * x)).exp(),
            PureKernel::Interval { ell } => interval_ratio(Complex64::new(kappa, 0.0), x, ell),
        }
    }

    fn envelope_factor(&self, radius: f64) -> f64 {
        match *self {
            PureKernel::HalfLine => 1.0,
            PureKernel::Interval { ell } => 2.0 / -(-SQRT_2 * radius * ell).exp_m1(),
        }
    }
}

/// `sinh(a k x)/sinh(a k ℓ)`, by series for `|k| < k_switch` and directly above.
pub fn interval_ratio(k: Complex64, x: f64, ell: f64) -> Complex64 {
    let z = A * k;
    if k.norm() < K_SWITCH_SCALE / ell {
        ratio_series(z, x, ell)
    } else {
        ratio_direct(z, x, ell)
    }
}

/// `(x/ℓ) S(z²x²)/S(z²ℓ²)` with `S(w) = Σ_{n≤5} wⁿ/(2n+1)!`, so that
/// `sinh(zx)/sinh(zℓ)` is exact through order `z¹⁰`.
pub fn ratio_series(z: Complex64, x: f64, ell: f64) -> Complex64 {
    let s = |w: Complex64| {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..6 {
            sum += term / fact;
            term *= w;
            fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
        }
        sum
    };
    let z2 = z * z;
    s(z2 * x * x) / s(z2 * ell * ell) * (x / ell)
}

/// `e^{z(x−ℓ)} (1 − e^{−2zx}) / (1 − e^{−2zℓ})`, folded to `Re z ≥ 0`.
pub fn ratio_direct(z: Complex64, x: f64, ell: f64) -> Complex64 {
    let z = if z.re < 0.0 { -z } else { z };
    (z * (x - ell)).exp() * expm1(-2.0 * z * x) / expm1(-2.0 * z * ell)
}

/// The pure solution for each signal at every target.
pub fn pure_values(
    kernel: PureKernel,
    signals: &[&Piecewise],
    targets: &Targets,
    tol: f64,
) -> Vec<PointValues> {
    let npts = targets.len();
    let mut out: Vec<PointValues> = signals
        .iter()
        .map(|_| PointValues {
            values: vec![0.0; npts],
            residual: 0.0,
        })
        .collect();
    let scale = signals.iter().fold(0.0f64, |m, g| {
        let env = g.envelope();
        m.max(env.variation + g.max_abs())
    });
    let needs_quadrature = |x: f64| match kernel {
        PureKernel::HalfLine => x > 0.0,
        PureKernel::Interval { ell } => x > 0.0 && x < ell,
    };
    let mut radius = vec![0.0; targets.xs.len()];
    let mut residual = 0.0f64;
    if scale > 0.0 && targets.t_max() > 0.0 {
        for (r, &x) in radius.iter_mut().zip(&targets.xs) {
            if !needs_quadrature(x) {
                continue;
            }
            let d = kernel.decay(x);
            let bound = |rr: f64| {
                (2.0 / PI) * scale * SQRT_2 / (d * rr) * kernel.envelope_factor(rr)
            };
            let trunc = match choose_truncation_capped(d, bound, tol, KAPPA_CAP) {
                Ok(t) | Err(ContourError::NoDecay(t)) => t,
            };
            *r = trunc.radius;
            residual = residual.max(trunc.residual);
        }
    }
    let r_max = radius.iter().fold(0.0f64, |m, &r| m.max(r));
    if r_max > 0.0 {
        let t_span = targets.t_max();
        let rate = |kappa: f64| {
            targets
                .xs
                .iter()
                .zip(&radius)
                .filter(|(_, &r)| r >= kappa)
                .fold(0.0f64, |m, (&x, _)| m.max(kernel.phase_rate(x)))
        };
        let edges = graded_edges(r_max, r_max.min(1.0), t_span, rate, PHASE_BUDGET);
        let rule = RealRule::composite(&edges, PANEL_ORDER);
        let nsig = signals.len();
        let acc = chunked_sum(rule.len(), npts * nsig, |range, acc| {
            let mut k = vec![Complex64::new(0.0, 0.0); targets.xs.len()];
            for n in range {
                let kappa = rule.nodes[n];
                for ((kv, &x), &r) in k.iter_mut().zip(&targets.xs).zip(&radius) {
                    *kv = if r >= kappa {
                        kernel.kernel(kappa, x)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
                let ksq = kappa * kappa;
                let z = Complex64::new(0.0, -ksq);
                for (s, g) in signals.iter().enumerate() {
                    let prefix = g.exp_integral_at(z, &targets.ts);
                    let j: Vec<Complex64> = prefix
                        .iter()
                        .zip(&targets.ts)
                        .map(|(p, &t)| p * Complex64::from_polar(rule.weights[n] * kappa, ksq * t))
                        .collect();
                    let base = s * npts;
                    for (p, &(i, jt)) in targets.points.iter().enumerate() {
                        let (kr, jr) = (k[i], j[jt]);
                        acc[base + p] += kr.re * jr.re - kr.im * jr.im;
                    }
                }
            }
        });
        for (s, o) in out.iter_mut().enumerate() {
            for (v, a) in o.values.iter_mut().zip(&acc[s * npts..(s + 1) * npts]) {
                *v = a * 2.0 / PI;
            }
        }
    }
    for (o, g) in out.iter_mut().zip(signals) {
        o.residual = residual;
        for (v, &(i, j)) in o.values.iter_mut().zip(&targets.points) {
            if let Some(fixed) = kernel.identity(g, targets.xs[i], targets.ts[j]) {
                *v = fixed;
            }
        }
    }
    out
}

fn point(kernel: PureKernel, g: &Piecewise, x: f64, t: f64, tol: f64) -> Result<f64, LinearError> {
    let r = pure_values(kernel, &[g], &Targets::single(x, t), tol);
    let value = r[0].values[0];
    if r[0].residual > tol {
        return Err(LinearError::ResidualWarning {
            x,
            value,
            residual: r[0].residual,
        });
    }
    Ok(value)
}

/// Solution at `(x, t)` of the half-line problem with boundary datum `g`.
pub fn solve_pure_halfline(g: &Piecewise, x: f64, t: f64) -> Result<f64, LinearError> {
    point(PureKernel::HalfLine, g, x, t, DEFAULT_TOL)
}

/// Solution at `(x, t)` of the interval problem with datum `h` at `x = ℓ`.
pub fn solve_pure_interval(h: &Piecewise, ell: f64, x: f64, t: f64) -> Result<f64, LinearError> {
    point(PureKernel::Interval { ell }, h, x, t, DEFAULT_TOL)
}
