//! Whole-line initial value problem and the forced problem with zero data.

use super::{chunked_sum, phi12, PointValues, Targets};
use crate::contours::{choose_truncation_capped, graded_edges};
use crate::quadrature::{gauss_legendre, RealRule};
use crate::sampled::{Envelope, Piecewise};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Below this time the initial-value solution is evaluated by convolution with
/// the heat kernel instead of spectral quadrature.
pub const KERNEL_TIME: f64 = 1e-3;

const PANEL_ORDER: usize = 16;
const PHASE_BUDGET: f64 = 10.0;
const XI_CAP: f64 = 2e4;
const DEFAULT_TOL: f64 = 1e-12;

/// `S[U0; 0](x, t)`.
pub fn solve_heat_ivp(u0: &Piecewise, x: f64, t: f64) -> f64 {
    heat_ivp_values(u0, &Targets::single(x, t), DEFAULT_TOL).values[0]
}

/// `S[U0; 0]` at every target.
pub fn heat_ivp_values(u0: &Piecewise, targets: &Targets, tol: f64) -> PointValues {
    let mut values = vec![0.0; targets.len()];
    let spectral_ts: Vec<f64> = targets.ts.iter().copied().filter(|&t| t >= KERNEL_TIME).collect();
    let mut residual = 0.0;
    if let Some(&t_lo) = spectral_ts.first() {
        let env = u0.envelope();
        let tail = |xi: f64| env.bound(xi) * (-xi * xi * t_lo).exp() / (2.0 * PI * xi * t_lo);
        let trunc = match choose_truncation_capped(0.0, tail, tol, XI_CAP) {
            Ok(t) => t,
            Err(crate::contours::ContourError::NoDecay(t)) => t,
        };
        residual = trunc.residual;
        let (a, b) = u0.support();
        let rate = targets.x_max() + a.abs().max(b.abs());
        let edges = graded_edges(trunc.radius, trunc.radius.min(1.0), 0.0, |_| rate, PHASE_BUDGET);
        let rule = RealRule::composite(&edges, PANEL_ORDER);
        let spectrum: Vec<Complex64> = rule
            .nodes
            .par_iter()
            .map(|&xi| u0.fourier(Complex64::new(xi, 0.0)))
            .collect();
        let acc = chunked_sum(rule.len(), targets.len(), |range, acc| {
            let mut ax = vec![0.0; targets.xs.len()];
            let mut dt = vec![0.0; targets.ts.len()];
            for n in range {
                let xi = rule.nodes[n];
                let c = spectrum[n] * rule.weights[n];
                for (a, &x) in ax.iter_mut().zip(&targets.xs) {
                    *a = (c * Complex64::from_polar(1.0, xi * x)).re;
                }
                for (d, &t) in dt.iter_mut().zip(&targets.ts) {
                    *d = if t >= KERNEL_TIME { (-xi * xi * t).exp() } else { 0.0 };
                }
                for (v, &(i, j)) in acc.iter_mut().zip(&targets.points) {
                    *v += ax[i] * dt[j];
                }
            }
        });
        for (v, a) in values.iter_mut().zip(acc) {
            *v = a / PI;
        }
    }
    for (v, &(i, j)) in values.iter_mut().zip(&targets.points) {
        let (x, t) = (targets.xs[i], targets.ts[j]);
        if t <= 0.0 {
            *v = u0.eval(x);
        } else if t < KERNEL_TIME {
            *v = kernel_convolution(u0, x, t);
        }
    }
    PointValues { values, residual }
}

/// `∫ G_t(x − y) U0(y) dy` with the Gaussian heat kernel, integrated panel by
/// panel over the window where the kernel exceeds machine precision.
fn kernel_convolution(u0: &Piecewise, x: f64, t: f64) -> f64 {
    let half = 12.0 * t.sqrt();
    let (a, b) = u0.support();
    let lo = (x - half).max(a);
    let hi = (x + half).min(b);
    if lo >= hi {
        return 0.0;
    }
    let mut breaks = vec![lo];
    for seg in u0.segments() {
        let h = seg.step();
        let first = ((lo - seg.start()) / h).ceil().max(0.0) as usize;
        let mut k = first;
        while k < seg.len() {
            let y = seg.abscissa(k);
            if y >= hi {
                break;
            }
            if y > lo {
                breaks.push(y);
            }
            k += 1;
        }
    }
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let width = t.sqrt();
    let gl = gauss_legendre(12);
    let norm = 1.0 / (4.0 * PI * t).sqrt();
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for p in 0..pieces {
            let (l, r) = (w[0] + p as f64 * step, w[0] + (p + 1) as f64 * step);
            sum += gl.integrate(l, r, |y| (-(x - y).powi(2) / (4.0 * t)).exp() * u0.eval(y));
        }
    }
    norm * sum
}

/// Forcing slices extended to the whole line, `slices[n]` at time `n·dt`.
#[derive(Debug, Clone)]
pub struct ForcingSlices {
    pub dt: f64,
    pub slices: Vec<Piecewise>,
}

impl ForcingSlices {
    pub fn t_max(&self) -> f64 {
        self.dt * (self.slices.len() - 1) as f64
    }

    fn envelope_bound(envs: &[Envelope], xi: f64) -> f64 {
        envs.iter().fold(0.0, |m, e| m.max(e.bound(xi)))
    }

    fn extent(&self) -> f64 {
        self.slices.iter().fold(0.0, |m, s| {
            let (a, b) = s.support();
            m.max(a.abs()).max(b.abs())
        })
    }
}

/// `S[0; F](x, t)`.
pub fn solve_forced_ivp(f: &ForcingSlices, x: f64, t: f64) -> f64 {
    forced_ivp_values(f, &Targets::single(x, t), DEFAULT_TOL).values[0]
}

/// `S[0; F]` at every target, by spectral quadrature of the Duhamel integral
/// with an exponential integrator in time (exact for `F` linear between slices).
pub fn forced_ivp_values(f: &ForcingSlices, targets: &Targets, tol: f64) -> PointValues {
    let mut values = vec![0.0; targets.len()];
    if f.slices.iter().all(|s| s.max_abs() == 0.0) || targets.t_max() <= 0.0 {
        return PointValues { values, residual: 0.0 };
    }
    let envs: Vec<Envelope> = f.slices.iter().map(|s| s.envelope()).collect();
    let t_max = targets.t_max();
    let tail = |xi: f64| ForcingSlices::envelope_bound(&envs, xi) * (1.0 / xi).min(t_max) / PI;
    let trunc = match choose_truncation_capped(0.0, tail, tol, XI_CAP) {
        Ok(t) => t,
        Err(crate::contours::ContourError::NoDecay(t)) => t,
    };
    let rate = targets.x_max() + f.extent();
    let edges = graded_edges(trunc.radius, trunc.radius.min(1.0), 0.0, |_| rate, PHASE_BUDGET);
    let rule = RealRule::composite(&edges, PANEL_ORDER);
    let acc = chunked_sum(rule.len(), targets.len(), |range, acc| {
        let mut ex = vec![Complex64::new(0.0, 0.0); targets.xs.len()];
        for n in range {
            let xi = rule.nodes[n];
            let k = Complex64::new(xi, 0.0);
            let fhat: Vec<Complex64> = f.slices.iter().map(|s| s.fourier(k)).collect();
            let what = duhamel_at(Complex64::new(xi * xi, 0.0), f.dt, &fhat, &targets.ts);
            for (e, &x) in ex.iter_mut().zip(&targets.xs) {
                *e = Complex64::from_polar(rule.weights[n], xi * x);
            }
            for (v, &(i, j)) in acc.iter_mut().zip(&targets.points) {
                *v += ex[i].re * what[j].re - ex[i].im * what[j].im;
            }
        }
    });
    for (v, a) in values.iter_mut().zip(acc) {
        *v = a / PI;
    }
    for (v, &(_, j)) in values.iter_mut().zip(&targets.points) {
        if targets.ts[j] <= 0.0 {
            *v = 0.0;
        }
    }
    PointValues {
        values,
        residual: trunc.residual,
    }
}

/// `∫_0^t e^{-λ(t−s)} φ(s) ds` at each of the sorted `ts`, where `φ` is linear
/// between the samples `phi[n]` at `s = n·dt` and constant past the last one.
pub(crate) fn duhamel_at(lambda: Complex64, dt: f64, phi: &[Complex64], ts: &[f64]) -> Vec<Complex64> {
    let step = |h: f64, a: Complex64, b: Complex64| -> Complex64 {
        let (p1, p2) = phi12(-lambda * h);
        (a * (p1 - p2) + b * p2) * h
    };
    let decay = (-lambda * dt).exp();
    let mut out = Vec::with_capacity(ts.len());
    let mut y = Complex64::new(0.0, 0.0);
    let mut n = 0usize; // y holds the integral up to n·dt
    let full = step(dt, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let full_b = step(dt, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let last = phi.len() - 1;
    for &t in ts {
        if t <= 0.0 {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        while ((n + 1) as f64) * dt <= t * (1.0 + 1e-14) {
            let a = phi[n.min(last)];
            let b = phi[(n + 1).min(last)];
            y = decay * y + a * full + b * full_b;
            n += 1;
        }
        let tau = t - n as f64 * dt;
        if tau > 1e-14 * dt {
            let a = phi[n.min(last)];
            let b = phi[(n + 1).min(last)];
            let b_tau = a + (b - a) * (tau / dt);
            out.push((-lambda * tau).exp() * y + step(tau, a, b_tau));
        } else {
            out.push(y);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::Sampled;

    fn gaussian() -> Piecewise {
        Piecewise::single(Sampled::from_fn(-12.0, 12.0, 2400, |x| (-x * x).exp()))
    }

    #[test]
    fn gaussian_evolution() {
        let u0 = gaussian();
        assert!((solve_heat_ivp(&u0, 0.0, 0.25) - 0.5f64.sqrt()).abs() < 1e-9);
        let expect = (-0.5f64).exp() / 2.0f64.sqrt();
        assert!((solve_heat_ivp(&u0, 1.0, 0.25) - expect).abs() < 1e-9);
        assert_eq!(solve_heat_ivp(&u0, 0.3, 0.0), u0.eval(0.3));
        let zero = Piecewise::single(Sampled::zeros(-1.0, 1.0, 10));
        assert_eq!(solve_heat_ivp(&zero, 0.2, 0.1), 0.0);
    }

    #[test]
    fn kernel_and_spectral_paths_agree() {
        // A kinked datum so both paths see nontrivial high frequencies.
        let half = Sampled::from_fn(0.0, 10.0, 1000, |x| (-x).exp());
        let u0 = crate::transforms::even_reflection(&half);
        let t = KERNEL_TIME;
        let spectral = heat_ivp_values(&u0, &Targets::single(0.0, t), 1e-12).values[0];
        let kernel = kernel_convolution(&u0, 0.0, t);
        // Closed form for e^{-|x|} at x = 0.
        let exact = (t).exp() * statrs::function::erf::erfc(t.sqrt());
        assert!((spectral - kernel).abs() < 1e-9, "{spectral} vs {kernel} (exact {exact})");
        assert!((kernel - exact).abs() < 1e-8, "{kernel} vs {exact}");
    }

    #[test]
    fn duhamel_recursion() {
        // φ ≡ 1: ∫_0^t e^{-λ(t-s)} ds = (1 - e^{-λt})/λ.
        let lambda = Complex64::new(3.0, -2.0);
        let phi = vec![Complex64::new(1.0, 0.0); 11];
        let ts = [0.0, 0.05, 0.1, 0.37, 1.0];
        let out = duhamel_at(lambda, 0.1, &phi, &ts);
        for (t, v) in ts.iter().zip(&out) {
            let exact = (1.0 - (-lambda * *t).exp()) / lambda;
            assert!((v - exact).norm() < 1e-14, "t={t}");
        }
        // φ(s) = s is reproduced exactly as well.
        let phi: Vec<Complex64> = (0..=10).map(|n| Complex64::new(0.1 * n as f64, 0.0)).collect();
        let out = duhamel_at(lambda, 0.1, &phi, &ts);
        for (t, v) in ts.iter().zip(&out) {
            let exact = *t / lambda - (1.0 - (-lambda * *t).exp()) / (lambda * lambda);
            assert!((v - exact).norm() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn forced_examples() {
        let g = gaussian();
        let steady = ForcingSlices {
            dt: 2.0,
            slices: vec![g.clone(), g.clone()],
        };
        assert!((solve_forced_ivp(&steady, 0.0, 2.0) - 1.0).abs() < 1e-8);
        assert_eq!(solve_forced_ivp(&steady, 0.0, 0.0), 0.0);
        let zero = ForcingSlices {
            dt: 1.0,
            slices: vec![Piecewise::single(Sampled::zeros(-1.0, 1.0, 4)); 2],
        };
        assert_eq!(solve_forced_ivp(&zero, 0.0, 1.0), 0.0);

        let nt = 200;
        let dt = 1.0 / nt as f64;
        let slices = (0..=nt)
            .map(|n| {
                let t = n as f64 * dt;
                Piecewise::single(Sampled::from_fn(-8.0, 8.0, 320, |x| {
                    let e = (-t).exp();
                    (-x * x).exp() * (e - (1.0 - e) * (4.0 * x * x - 2.0))
                }))
            })
            .collect();
        let manufactured = ForcingSlices { dt, slices };
        let v = solve_forced_ivp(&manufactured, 0.0, 1.0);
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-5, "{v}");
    }
}
