//! Sobolev-type norms of sampled data and solution fields.

use crate::problem::{uniform_step, Domain, ProblemSpec, Regime, SolutionField};
use crate::quadrature::gauss_legendre;
use crate::sampled::{Piecewise, Sampled};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("spectral tail is not negligible: decay exponent {exponent:.3}, tail fraction {fraction:.3e}")]
    TailTooFat { exponent: f64, fraction: f64 },
    #[error("{needed} samples needed for derivative order {order}, have {have}")]
    InsufficientResolution { order: usize, needed: usize, have: usize },
    #[error("norm order {0} is outside the supported range")]
    BadOrder(f64),
    #[error("field grid is not uniform")]
    NonUniformGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResolution {
    pub samples: usize,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub parts: BTreeMap<String, f64>,
    pub grid_resolution: GridResolution,
    /// Change of the value when the grid is coarsened by a factor 2.
    pub refinement_delta: f64,
    /// Bound on the omitted diagonal cells of fractional double integrals.
    pub error_bar: f64,
}

impl NormReport {
    fn zero(samples: usize, step: f64) -> Self {
        Self {
            value: 0.0,
            parts: BTreeMap::new(),
            grid_resolution: GridResolution { samples, step },
            refinement_delta: 0.0,
            error_bar: 0.0,
        }
    }
}

/// Spatial domain a physical-space norm is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Span {
    /// `(0, ∞)`; the profile is taken to vanish past its last sample.
    HalfLine,
    /// The sampled range itself.
    Interval,
}

/// `(1/2π ∫ (1+ξ²)^s |f̂(ξ)|² dξ)^{1/2}` for a real profile on ℝ.
pub fn hs_norm_line(f: &Piecewise, s: f64) -> Result<NormReport, NormError> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(NormError::BadOrder(s));
    }
    let h_min = f
        .segments()
        .map(|seg| seg.step())
        .fold(f64::INFINITY, f64::min);
    let mut report = NormReport::zero(f.sample_count(), h_min);
    if f.max_abs() == 0.0 {
        return Ok(report);
    }
    let width = effective_width(f);
    let xi_max = 4.0 * PI / h_min;
    let panel = (2.0 * PI / width).min(xi_max / 8.0);
    let mut edges = vec![0.0];
    let mut e = panel.min(1.0) / 64.0;
    while e < panel {
        edges.push(e);
        e *= 2.0;
    }
    let mut x = panel;
    while x < xi_max {
        edges.push(x);
        x += panel;
    }
    edges.push(xi_max);
    let gl = gauss_legendre(16);
    let contributions: Vec<(f64, f64)> = edges
        .par_windows(2)
        .map(|w| {
            let (mut body, mut plain) = (0.0, 0.0);
            for (xi, wt) in gl.mapped(w[0], w[1]) {
                let power = f.fourier(Complex64::new(xi, 0.0)).norm_sqr();
                body += wt * (1.0 + xi * xi).powf(s) * power;
                plain += wt * power;
            }
            (body, plain)
        })
        .collect();
    let (mut body, mut plain) = (0.0, 0.0);
    for (b, p) in contributions {
        body += b;
        plain += p;
    }
    // Beyond Ξ the transform of a piecewise cubic is dominated by its jumps:
    // |f̂|² averages to ΣJ²/ξ² + Σδ²/ξ⁴ with J value jumps and δ slope jumps.
    let scale = f.max_abs();
    let (mut jv, mut js) = (0.0, 0.0);
    for (_, dv, ds) in f.jumps() {
        if dv.abs() > 1e-9 * scale {
            jv += dv * dv;
        }
        js += ds * ds;
    }
    let mut tail = 0.0;
    if jv > 0.0 {
        if s >= 0.5 {
            return Err(NormError::TailTooFat {
                exponent: 2.0,
                fraction: 1.0,
            });
        }
        tail += jv * xi_max.powf(2.0 * s - 1.0) / (1.0 - 2.0 * s);
    }
    if s >= 1.5 && js > 0.0 {
        return Err(NormError::TailTooFat {
            exponent: 4.0,
            fraction: 1.0,
        });
    }
    tail += js * xi_max.powf(2.0 * s - 3.0) / (3.0 - 2.0 * s);
    let fraction = tail / (body + tail);
    if !(fraction <= 0.5) {
        return Err(NormError::TailTooFat {
            exponent: if jv > 0.0 { 2.0 } else { 4.0 },
            fraction,
        });
    }
    report.value = ((body + tail) / PI).sqrt();
    report.parts.insert("l2".into(), (plain / PI).sqrt());
    report.parts.insert("tail".into(), tail / PI);
    report.refinement_delta = report.value - (body / PI).sqrt();
    Ok(report)
}

/// Width of the range where `|f|` exceeds `1e-8` of its maximum.
fn effective_width(f: &Piecewise) -> f64 {
    let floor = 1e-8 * f.max_abs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for seg in f.segments() {
        for (x, v) in seg.abscissae().into_iter().zip(seg.values()) {
            if v.abs() > floor {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
    }
    let (a, b) = f.support();
    let min_width = 4.0 * f.segments().map(|s| s.step()).fold(f64::INFINITY, f64::min);
    if hi >= lo {
        (hi - lo).max(min_width)
    } else {
        (b - a).max(min_width)
    }
}

/// Finite-difference derivative of order `j` (4th-order central, one-sided at edges).
pub fn derivative(f: &Sampled, order: usize) -> Result<Sampled, NormError> {
    let mut current = f.clone();
    for _ in 0..order {
        let v = current.values();
        if v.len() < 5 {
            return Err(NormError::InsufficientResolution {
                order,
                needed: 4 * order + 1,
                have: f.len(),
            });
        }
        let h = current.step();
        let n = v.len();
        let d: Vec<f64> = (0..n)
            .map(|i| {
                if i >= 2 && i + 2 < n {
                    (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
                } else if i < 2 {
                    let o = 0;
                    let r = i as f64;
                    one_sided(&v[o..o + 5], r, h)
                } else {
                    let o = n - 5;
                    let r = (i - o) as f64;
                    one_sided(&v[o..o + 5], r, h)
                }
            })
            .collect();
        current = Sampled::new(current.start(), h, d).expect("finite differences of finite data");
    }
    Ok(current)
}

/// Derivative at local position `r` of the quartic through five equispaced samples.
fn one_sided(v: &[f64], r: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..5 {
        // d/dr of the Lagrange basis polynomial for node k.
        let mut deriv = 0.0;
        for m in 0..5 {
            if m == k {
                continue;
            }
            let mut prod = 1.0;
            for l in 0..5 {
                if l == k || l == m {
                    continue;
                }
                prod *= r - l as f64;
            }
            deriv += prod;
        }
        let mut denom = 1.0;
        for l in 0..5 {
            if l != k {
                denom *= k as f64 - l as f64;
            }
        }
        acc += v[k] * deriv / denom;
    }
    acc / h
}

fn l2(f: &Sampled) -> f64 {
    f.map(|v| v * v).integral().max(0.0).sqrt()
}

/// Fractional seminorm `(∫∫_{y>x} |f(y)-f(x)|² / (y-x)^{1+2β})^{1/2}` by midpoint
/// cells off the diagonal. Returns `(seminorm², diagonal bound)`.
fn one_sided_seminorm_sq(f: &Sampled, beta: f64, span: Span) -> (f64, f64) {
    let h = f.step();
    let n = f.len() - 1;
    let mid: Vec<f64> = (0..n)
        .map(|i| f.eval(f.start() + (i as f64 + 0.5) * h))
        .collect();
    let exponent = 1.0 + 2.0 * beta;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for k in (i + 1)..n {
                let z = (k - i) as f64 * h;
                let d = mid[k] - mid[i];
                acc += d * d / z.powf(exponent);
            }
            acc * h * h
        })
        .collect();
    let mut total: f64 = rows.iter().sum();
    let end = f.end();
    if span == Span::HalfLine {
        for (i, &m) in mid.iter().enumerate() {
            let x = f.start() + (i as f64 + 0.5) * h;
            total += m * m * (end - x).powf(-2.0 * beta) / (2.0 * beta) * h;
        }
    }
    // Diagonal cells: |f(y)-f(x)| ≤ L|y-x| with L the local slope.
    let mut diag = 0.0;
    let v = f.values();
    for w in v.windows(2) {
        let slope = (w[1] - w[0]) / h;
        diag += slope * slope * h.powf(3.0 - 2.0 * beta) / ((2.0 - 2.0 * beta) * (3.0 - 2.0 * beta));
    }
    (total, diag)
}

/// Physical-space `H^s` norm: `Σ_{j≤⌊s⌋} ‖∂^j f‖ + ‖∂^{⌊s⌋} f‖_β`.
pub fn hs_norm_physical(f: &Sampled, s: f64, span: Span) -> Result<NormReport, NormError> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(NormError::BadOrder(s));
    }
    let order = s.floor() as usize;
    let beta = s - order as f64;
    let mut report = NormReport::zero(f.len(), f.step());
    let mut top = f.clone();
    for j in 0..=order {
        let d = if j == 0 { f.clone() } else { derivative(f, j)? };
        let v = l2(&d);
        report.parts.insert(format!("d{j}"), v);
        report.value += v;
        top = d;
    }
    if beta > 0.0 {
        let (sq, diag) = one_sided_seminorm_sq(&top, beta, span);
        let semi = sq.sqrt();
        report.parts.insert("seminorm".into(), semi);
        report.value += semi;
        report.error_bar = (sq + diag).sqrt() - semi;
    }
    Ok(report)
}

/// `‖g‖_{L²} + ‖g‖_m` over the sampled range of `g`.
pub fn ht_norm(g: &Sampled, m: f64) -> Result<NormReport, NormError> {
    if !(m.is_finite() && (0.0..1.0).contains(&m)) {
        return Err(NormError::BadOrder(m));
    }
    let (value, parts, diag) = ht_parts(g, m);
    let mut report = NormReport::zero(g.len(), g.step());
    report.value = value;
    report.parts = parts;
    report.error_bar = diag;
    if g.len() >= 5 {
        let coarse: Vec<f64> = g.values().iter().step_by(2).copied().collect();
        if (g.len() - 1).is_multiple_of(2) {
            let coarse = Sampled::new(g.start(), 2.0 * g.step(), coarse).expect("subsamples finite");
            report.refinement_delta = (ht_parts(&coarse, m).0 - value).abs();
        }
    }
    Ok(report)
}

fn ht_parts(g: &Sampled, m: f64) -> (f64, BTreeMap<String, f64>, f64) {
    let mut parts = BTreeMap::new();
    let l2v = l2(g);
    parts.insert("l2".into(), l2v);
    let mut value = l2v;
    let mut diag = 0.0;
    if m > 0.0 {
        // Full square is twice the one-sided integral.
        let (sq, d) = one_sided_seminorm_sq(g, m, Span::Interval);
        let semi = (2.0 * sq).sqrt();
        parts.insert("seminorm".into(), semi);
        value += semi;
        diag = (2.0 * (sq + d)).sqrt() - semi;
    }
    (value, parts, diag)
}

/// `sup_j t_j^α ‖u(·, t_j)‖_{L^p}`.
pub fn calpha_lp_norm(field: &SolutionField, alpha: f64, p: u32) -> Result<f64, NormError> {
    let dx = uniform_step(&field.x_grid).ok_or(NormError::NonUniformGrid)?;
    let mut best: f64 = 0.0;
    for (j, &t) in field.t_grid.iter().enumerate() {
        let weight = if alpha == 0.0 { 1.0 } else { t.powf(alpha) };
        if weight == 0.0 {
            continue;
        }
        let row = Sampled::new(field.x_grid[0], dx, field.values[j].clone())
            .expect("field rows are finite");
        let lp = row
            .map(|v| v.abs().powi(p as i32))
            .integral()
            .max(0.0)
            .powf(1.0 / p as f64);
        best = best.max(weight * lp);
    }
    Ok(best)
}

/// The exponent α = (1/p)(1/2 − b) with `b` the midpoint of `((2s+1)/4, 1/2)`.
pub fn alpha_exponent(s: f64, p: u32) -> f64 {
    let b = ((2.0 * s + 1.0) / 4.0 + 0.5) / 2.0;
    (0.5 - b) / p as f64
}

fn span_of(domain: &Domain) -> Span {
    match domain {
        Domain::HalfLine { .. } => Span::HalfLine,
        Domain::Interval { .. } => Span::Interval,
    }
}

/// `‖u0‖_{H^s} + ‖g0‖_{H^m(0,T)} (+ ‖h0‖_{H^m(0,T)})`.
pub fn data_norm(spec: &ProblemSpec) -> Result<f64, NormError> {
    let s = spec.index.s;
    let m = spec.index.m;
    let mut total = hs_norm_physical(&spec.u0, s, span_of(&spec.domain))?.value;
    let g0 = crate::transforms::restrict(&spec.g0, spec.horizon);
    total += ht_norm(&g0, m)?.value;
    if let Some(h0) = &spec.h0 {
        total += ht_norm(&crate::transforms::restrict(h0, spec.horizon), m)?.value;
    }
    Ok(total)
}

/// Discrete `X` norm (`Y` norm in the rough regime) of a field.
pub fn xy_norm(field: &SolutionField, spec: &ProblemSpec) -> Result<NormReport, NormError> {
    let dx = uniform_step(&field.x_grid).ok_or(NormError::NonUniformGrid)?;
    let dt = uniform_step(&field.t_grid).ok_or(NormError::NonUniformGrid)?;
    let s = spec.index.s;
    let m = spec.index.m;
    let span = span_of(&spec.domain);
    let space = field
        .values
        .par_iter()
        .map(|row| {
            let prof = Sampled::new(field.x_grid[0], dx, row.clone()).expect("finite row");
            hs_norm_physical(&prof, s, span).map(|r| r.value)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let time = (0..field.x_grid.len())
        .into_par_iter()
        .map(|i| {
            let sig = Sampled::new(field.t_grid[0], dt, field.column(i)).expect("finite column");
            ht_norm(&sig, m).map(|r| r.value)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut report = NormReport::zero(field.x_grid.len() * field.t_grid.len(), dx);
    report.parts.insert("space".into(), space);
    report.parts.insert("time".into(), time);
    report.value = space + time;
    if spec.index.regime == Regime::Rough {
        let alpha = alpha_exponent(s, spec.p);
        let c = calpha_lp_norm(field, alpha, spec.p)?;
        report.parts.insert("calpha".into(), c);
        report.value += c;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{GridSpec, NonlinearityForm};
    use proptest::prelude::*;

    fn field_from(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> SolutionField {
        let mut field = SolutionField::zeros(grid.x_grid(), grid.t_grid(), true);
        for (j, &t) in grid.t_grid().iter().enumerate() {
            for (i, &x) in grid.x_grid().iter().enumerate() {
                field.values[j][i] = f(x, t);
            }
        }
        field.sync_traces();
        field
    }

    #[test]
    fn line_norm_examples() {
        let f = Piecewise::new(vec![
            Sampled::from_fn(-25.0, 0.0, 1250, |x| x.exp()),
            Sampled::from_fn(0.0, 25.0, 1250, |x| (-x).exp()),
        ])
        .unwrap();
        let r = hs_norm_line(&f, 0.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        let doubled = hs_norm_line(&f.scaled(2.0), 0.0).unwrap();
        assert!((doubled.value - 2.0 * r.value).abs() < 1e-12);
        // ‖e^{-|x|}‖²_{H¹} = (1/2π)∫ 4/(1+ξ²) dξ = 2.
        let h1 = hs_norm_line(&f, 1.0).unwrap();
        assert!((h1.value - 2f64.sqrt()).abs() < 1e-4, "{}", h1.value);
        let zero = Piecewise::single(Sampled::zeros(-1.0, 1.0, 10));
        assert_eq!(hs_norm_line(&zero, 0.5).unwrap().value, 0.0);
    }

    #[test]
    fn line_norm_is_monotone_in_s() {
        let f = Piecewise::single(Sampled::from_fn(-8.0, 8.0, 800, |x| (-x * x).exp()));
        let mut prev = 0.0;
        for s in [0.0, 0.25, 0.5, 1.0, 1.25] {
            let v = hs_norm_line(&f, s).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        // Gaussian: ‖f‖² = √(π/2).
        let l2 = hs_norm_line(&f, 0.0).unwrap().value;
        assert!((l2 * l2 - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-7, "{}", l2 * l2 - (std::f64::consts::PI / 2.0).sqrt());
    }

    #[test]
    fn physical_norm_examples() {
        let c = Sampled::from_fn(0.0, 2.0, 100, |_| 3.0);
        let r = hs_norm_physical(&c, 0.4, Span::Interval).unwrap();
        assert_eq!(r.parts["seminorm"], 0.0);
        assert!((r.value - 3.0 * 2f64.sqrt()).abs() < 1e-12);

        let e = Sampled::from_fn(0.0, 40.0, 8000, |x| (-x).exp());
        let r = hs_norm_physical(&e, 0.0, Span::HalfLine).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-9);

        let lin = Sampled::from_fn(0.0, 1.0, 100, |x| x);
        let r = hs_norm_physical(&lin, 1.0, Span::Interval).unwrap();
        assert!((r.value - (1.0 / 3f64.sqrt() + 1.0)).abs() < 1e-12, "{}", r.value);

        let short = Sampled::from_fn(0.0, 1.0, 2, |x| x);
        assert!(matches!(
            hs_norm_physical(&short, 1.0, Span::Interval),
            Err(NormError::InsufficientResolution { .. })
        ));
    }

    #[test]
    fn derivative_order_under_refinement() {
        let err = |n: usize| {
            let f = Sampled::from_fn(0.0, 1.0, n, |x| (2.0 * x).sin());
            let exact = (2.0 + (4.0f64).sin() / 2.0).sqrt();
            (hs_norm_physical(&f, 1.0, Span::Interval).unwrap().parts["d1"] - exact).abs()
        };
        let (e1, e2) = (err(20), err(40));
        assert!((e1 / e2).log2() >= 1.0, "{e1} {e2}");
    }

    #[test]
    fn time_norm_examples() {
        let c = Sampled::from_fn(0.0, 0.25, 50, |_| 2.0);
        let r = ht_norm(&c, 0.375).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let zero = Sampled::zeros(0.0, 1.0, 10);
        assert_eq!(ht_norm(&zero, 0.5).unwrap().value, 0.0);
        let ramp = Sampled::from_fn(0.0, 1.0, 100, |t| t);
        assert!((ht_norm(&ramp, 0.0).unwrap().value - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn time_norm_refinement_delta_is_small() {
        let g = Sampled::from_fn(0.0, 0.5, 400, |t| (7.0 * t).sin() + t.sqrt());
        let r = ht_norm(&g, 0.6).unwrap();
        assert!(r.refinement_delta < 0.05 * r.value, "{:?}", r);
    }

    #[test]
    fn calpha_examples() {
        let grid = GridSpec::new(11, 11, 1.0, 0.5).unwrap();
        let one = field_from(grid, |_, _| 1.0);
        assert!((calpha_lp_norm(&one, 0.1, 2).unwrap() - 0.5f64.powf(0.1)).abs() < 1e-12);
        let sing = field_from(grid, |_, t| if t > 0.0 { t.powf(-0.05) } else { 0.0 });
        assert!((calpha_lp_norm(&sing, 0.1, 2).unwrap() - 0.5f64.powf(0.05)).abs() < 1e-12);
        let zero = field_from(grid, |_, _| 0.0);
        assert_eq!(calpha_lp_norm(&zero, 0.1, 3).unwrap(), 0.0);
    }

    #[test]
    fn alpha_midpoint() {
        assert!((alpha_exponent(0.25, 3) - 1.0 / 48.0).abs() < 1e-15);
    }

    fn interval_spec(s: f64, u0: Sampled, g0: Sampled, h0: Sampled) -> ProblemSpec {
        ProblemSpec::new(
            Domain::Interval { ell: 1.0 },
            0.25,
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
    fn data_norm_examples() {
        let z = |n| Sampled::zeros(0.0, 1.0, n);
        let zt = || Sampled::zeros(0.0, 0.25, 25);
        let spec = interval_spec(0.25, z(50), zt(), zt());
        assert_eq!(data_norm(&spec).unwrap(), 0.0);
        let spec = interval_spec(0.25, z(50), Sampled::from_fn(0.0, 0.25, 25, |_| 1.0), zt());
        assert!((data_norm(&spec).unwrap() - 0.5).abs() < 1e-12);
        let h = Sampled::from_fn(0.0, 0.25, 25, |t| (9.0 * t).sin());
        let one = data_norm(&interval_spec(0.25, z(50), zt(), h.clone())).unwrap();
        let two = data_norm(&interval_spec(0.25, z(50), zt(), h.scaled(2.0))).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12);
    }

    #[test]
    fn xy_norm_examples() {
        let grid = GridSpec::new(41, 21, 1.0, 0.25).unwrap();
        let spec = interval_spec(
            1.0,
            Sampled::zeros(0.0, 1.0, 40),
            Sampled::zeros(0.0, 0.25, 20),
            Sampled::zeros(0.0, 0.25, 20),
        );
        assert_eq!(xy_norm(&field_from(grid, |_, _| 0.0), &spec).unwrap().value, 0.0);
        let phi = |x: f64| (3.0 * x).sin() + 0.5;
        let field = field_from(grid, |x, _| phi(x));
        let prof = Sampled::from_fn(0.0, 1.0, 40, phi);
        let expected = hs_norm_physical(&prof, 1.0, Span::Interval).unwrap().value
            + prof.max_abs() * 0.25f64.sqrt();
        let got = xy_norm(&field, &spec).unwrap().value;
        assert!((got - expected).abs() < 1e-12, "{got} {expected}");
        let doubled = xy_norm(&field.map(|v| 2.0 * v), &spec).unwrap().value;
        assert!((doubled - 2.0 * got).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn physical_norm_triangle_and_homogeneity(
            a in proptest::collection::vec(-1.0..1.0f64, 33),
            b in proptest::collection::vec(-1.0..1.0f64, 33),
            lambda in -3.0..3.0f64,
            s in 0.0..1.4f64,
        ) {
            let fa = Sampled::new(0.0, 1.0 / 32.0, a).unwrap();
            let fb = Sampled::new(0.0, 1.0 / 32.0, b).unwrap();
            let sum = Sampled::new(0.0, 1.0 / 32.0,
                fa.values().iter().zip(fb.values()).map(|(x, y)| x + y).collect()).unwrap();
            let na = hs_norm_physical(&fa, s, Span::Interval).unwrap().value;
            let nb = hs_norm_physical(&fb, s, Span::Interval).unwrap().value;
            let ns = hs_norm_physical(&sum, s, Span::Interval).unwrap().value;
            prop_assert!(ns <= (na + nb) * (1.0 + 1e-8) + 1e-12);
            let nl = hs_norm_physical(&fa.scaled(lambda), s, Span::Interval).unwrap().value;
            prop_assert!((nl - lambda.abs() * na).abs() <= 1e-8 * na.max(1e-300));
        }

        #[test]
        fn time_norm_triangle(
            a in proptest::collection::vec(-1.0..1.0f64, 21),
            b in proptest::collection::vec(-1.0..1.0f64, 21),
            m in 0.0..0.95f64,
        ) {
            let fa = Sampled::new(0.0, 0.01, a).unwrap();
            let fb = Sampled::new(0.0, 0.01, b).unwrap();
            let sum = Sampled::new(0.0, 0.01,
                fa.values().iter().zip(fb.values()).map(|(x, y)| x + y).collect()).unwrap();
            let na = ht_norm(&fa, m).unwrap().value;
            let nb = ht_norm(&fb, m).unwrap().value;
            let ns = ht_norm(&sum, m).unwrap().value;
            prop_assert!(ns <= (na + nb) * (1.0 + 1e-8) + 1e-12);
        }
    }
}
