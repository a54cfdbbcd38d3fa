//! Uniformly sampled data and the piecewise-cubic quadrature built on it.
//!
//! Every datum (initial profile, boundary signal, forcing slice) enters the
//! solvers as uniform samples. Between samples the datum is the local cubic
//! through the four nearest samples of its segment, so point evaluation,
//! plain integrals and exponential integrals `∫ e^{z x} f(x) dx` all refer to
//! the same interpolant. Exponential integrals are exact for that interpolant
//! at every complex `z`, which is what lets the contour quadrature use
//! wavenumbers far beyond the sampling Nyquist limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sample step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("segments overlap or are out of order at segment {0}")]
    Overlap(usize),
    #[error("piecewise datum has no segments")]
    Empty,
}

/// Uniform samples `values[i] = f(origin + i * step)`.
///
/// Used both for spatial profiles and for temporal signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampled {
    origin: f64,
    step: f64,
    values: Vec<f64>,
}

pub type SampledProfile = Sampled;
pub type SampledSignal = Sampled;

impl Sampled {
    pub fn new(origin: f64, step: f64, values: Vec<f64>) -> Result<Self, SampleError> {
        if values.len() < 2 {
            return Err(SampleError::TooFewSamples(values.len()));
        }
        if !(step > 0.0 && step.is_finite()) || !origin.is_finite() {
            return Err(SampleError::BadStep(step));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SampleError::NonFinite { index });
        }
        Ok(Self {
            origin,
            step,
            values,
        })
    }

    /// Samples `f` at `intervals + 1` equispaced points of `[a, b]`.
    pub fn from_fn<F: Fn(f64) -> f64>(a: f64, b: f64, intervals: usize, f: F) -> Self {
        assert!(intervals >= 1 && b > a);
        let step = (b - a) / intervals as f64;
        let values = (0..=intervals)
            .map(|i| {
                let x = if i == intervals { b } else { a + i as f64 * step };
                f(x)
            })
            .collect();
        Self::new(a, step, values).expect("sampled function must be finite")
    }

    pub fn zeros(a: f64, b: f64, intervals: usize) -> Self {
        Self::from_fn(a, b, intervals, |_| 0.0)
    }

    pub fn start(&self) -> f64 {
        self.origin
    }

    pub fn end(&self) -> f64 {
        self.origin + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.origin + self.step * i as f64
    }

    pub fn abscissae(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.abscissa(i)).collect()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Pointwise map of the sample values onto the same grid.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::new(self.origin, self.step, self.values.iter().map(|&v| f(v)).collect())
            .expect("mapped samples must be finite")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    /// Samples reversed in place and moved so that `x ↦ center - x`.
    pub fn reflected(&self, center: f64) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self::new(center - self.end(), self.step, values).expect("reflection keeps samples finite")
    }

    /// Value of the piecewise-cubic interpolant; zero outside `[start, end]`.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let pos = (x - self.origin) / self.step;
        let tol = 1e-12 * n as f64;
        if pos < -tol || pos > n as f64 + tol {
            return 0.0;
        }
        let pos = pos.clamp(0.0, n as f64);
        let j = (pos.floor() as usize).min(n - 1);
        let s = pos - j as f64;
        let c = panel_coefficients(&self.values, j);
        ((c[3] * s + c[2]) * s + c[1]) * s + c[0]
    }

    /// `∫ f(x) dx` over the sampled range.
    pub fn integral(&self) -> f64 {
        let n = self.values.len() - 1;
        let mut acc = 0.0;
        for j in 0..n {
            let c = panel_coefficients(&self.values, j);
            acc += c[0] + c[1] / 2.0 + c[2] / 3.0 + c[3] / 4.0;
        }
        acc * self.step
    }

    /// `∫ e^{z x} f(x) dx` over the sampled range, exact for the interpolant.
    pub fn exp_integral(&self, z: Complex64) -> Complex64 {
        PanelCubic::new(self.clone()).exp_integral(z)
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Moments `μ_m(w) = ∫_0^1 s^m e^{w s} ds` for `m = 0..=3`.
pub fn exp_moments(w: Complex64) -> [Complex64; 4] {
    let mut mu = [Complex64::new(0.0, 0.0); 4];
    if w.norm() < 1.0 {
        for (m, slot) in mu.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..40 {
                let contrib = term / (n + m + 1) as f64;
                acc += contrib;
                if contrib.norm() < 1e-18 * acc.norm().max(1e-300) {
                    break;
                }
                term *= w / (n + 1) as f64;
            }
            *slot = acc;
        }
    } else {
        let ew = w.exp();
        mu[0] = (ew - 1.0) / w;
        for m in 1..4 {
            mu[m] = (ew - m as f64 * mu[m - 1]) / w;
        }
    }
    mu
}

/// Monomial coefficients, in the panel-local variable `s ∈ [0, 1]`, of the
/// cubic (or lower degree for short segments) interpolating panel `j`.
fn panel_coefficients(values: &[f64], j: usize) -> [f64; 4] {
    let n = values.len() - 1;
    let mut out = [0.0; 4];
    if n < 3 {
        // Single stencil of all samples: degree n.
        let table = stencil_table(n, 0);
        for (k, row) in table.iter().enumerate().take(n + 1) {
            let y = values[k];
            for m in 0..4 {
                out[m] += row[m] * y;
            }
        }
        // Shift from node 0 to node j: stencils with n < 3 are stored about node 0.
        return shift_poly(out, j as f64);
    }
    let start = j.saturating_sub(1).min(n - 3);
    let offset = j - start; // position of panel start within stencil
    let table = stencil_table(3, offset);
    for k in 0..4 {
        let y = values[start + k];
        for m in 0..4 {
            out[m] += table[k][m] * y;
        }
    }
    out
}

/// Re-expands `p(s)` as a polynomial in `s' = s - shift`.
fn shift_poly(c: [f64; 4], shift: f64) -> [f64; 4] {
    if shift == 0.0 {
        return c;
    }
    // p(s' + shift)
    let a = shift;
    [
        c[0] + c[1] * a + c[2] * a * a + c[3] * a * a * a,
        c[1] + 2.0 * c[2] * a + 3.0 * c[3] * a * a,
        c[2] + 3.0 * c[3] * a,
        c[3],
    ]
}

/// Lagrange basis expanded to monomials. Row `k` holds the coefficients of the
/// basis polynomial for stencil node `k`, whose local abscissa is `k - offset`.
fn stencil_table(degree: usize, offset: usize) -> &'static [[f64; 4]; 4] {
    static TABLES: OnceLock<Vec<[[f64; 4]; 4]>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let mut all = Vec::new();
        for deg in 0..=3usize {
            for off in 0..=3usize {
                all.push(build_table(deg, off));
            }
        }
        all
    });
    &tables[degree * 4 + offset]
}

fn build_table(degree: usize, offset: usize) -> [[f64; 4]; 4] {
    let mut table = [[0.0; 4]; 4];
    if offset > degree {
        return table;
    }
    let nodes: Vec<f64> = (0..=degree).map(|k| k as f64 - offset as f64).collect();
    for k in 0..=degree {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (l, &ul) in nodes.iter().enumerate() {
            if l == k {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (m, &c) in poly.iter().enumerate() {
                next[m + 1] += c;
                next[m] -= ul * c;
            }
            poly = next;
            denom *= nodes[k] - ul;
        }
        for (m, c) in poly.iter().enumerate() {
            table[k][m] = c / denom;
        }
    }
    table
}

/// A sampled segment with its panel polynomials precomputed, for repeated
/// exponential integrals at many `z`.
#[derive(Debug, Clone)]
pub struct PanelCubic {
    samples: Sampled,
    coeffs: Vec<[f64; 4]>,
}

impl PanelCubic {
    pub fn new(samples: Sampled) -> Self {
        let n = samples.len() - 1;
        let coeffs = (0..n)
            .map(|j| panel_coefficients(&samples.values, j))
            .collect();
        Self { samples, coeffs }
    }

    pub fn samples(&self) -> &Sampled {
        &self.samples
    }

    pub fn exp_integral(&self, z: Complex64) -> Complex64 {
        let h = self.samples.step;
        let mu = exp_moments(z * h);
        let ratio = (z * h).exp();
        let mut phase = (z * self.samples.origin).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            let local = mu[0] * c[0] + mu[1] * c[1] + mu[2] * c[2] + mu[3] * c[3];
            acc += phase * local;
            phase *= ratio;
        }
        acc * h
    }

    /// Running integrals `∫_{start}^{x_i} e^{z x} f(x) dx` at every sample `x_i`.
    pub fn cumulative_exp_integral(&self, z: Complex64) -> Vec<Complex64> {
        let h = self.samples.step;
        let mu = exp_moments(z * h);
        let ratio = (z * h).exp();
        let mut phase = (z * self.samples.origin).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(acc);
        for c in &self.coeffs {
            let local = mu[0] * c[0] + mu[1] * c[1] + mu[2] * c[2] + mu[3] * c[3];
            acc += phase * local * h;
            out.push(acc);
            phase *= ratio;
        }
        out
    }

    /// `∫_{start}^{x} e^{z y} f(y) dy` for `x` inside or beyond the segment.
    pub fn exp_integral_upto(&self, z: Complex64, x: f64) -> Complex64 {
        let s = &self.samples;
        if x <= s.start() {
            return Complex64::new(0.0, 0.0);
        }
        if x >= s.end() {
            return self.exp_integral(z);
        }
        let h = s.step;
        let pos = (x - s.origin) / h;
        let full = (pos.floor() as usize).min(self.coeffs.len() - 1);
        let sigma = pos - full as f64;
        let mu = exp_moments(z * h);
        let ratio = (z * h).exp();
        let mut phase = (z * s.origin).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.coeffs[..full] {
            acc += phase * (mu[0] * c[0] + mu[1] * c[1] + mu[2] * c[2] + mu[3] * c[3]);
            phase *= ratio;
        }
        if sigma > 0.0 {
            let c = &self.coeffs[full];
            let part = exp_moments(z * h * sigma);
            let mut scale = sigma;
            let mut local = Complex64::new(0.0, 0.0);
            for m in 0..4 {
                local += part[m] * c[m] * scale;
                scale *= sigma;
            }
            acc += phase * local;
        }
        acc * h
    }
}

/// Spectral envelope data: bounds for `|∫ e^{-iξx} f(x) dx|` at large `|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// `‖f‖_{L¹}`.
    pub l1: f64,
    /// Total variation of `f` including jumps at segment ends.
    pub variation: f64,
    /// Total variation of `f'` including kinks, when `f` is continuous on ℝ.
    pub slope_variation: Option<f64>,
    /// Summed jump magnitudes of the interpolant and its first three
    /// derivatives, support ends included. Four integrations by parts make
    /// `Σ_m S_m / |ξ|^{m+1}` an exact bound for a piecewise cubic.
    pub derivative_jumps: [f64; 4],
}

impl Envelope {
    /// Upper bound for the transform magnitude at frequency `|xi|`.
    pub fn bound(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        let mut b = self.l1;
        if xi > 0.0 {
            b = b.min(self.variation / xi);
            if let Some(v1) = self.slope_variation {
                b = b.min(v1 / (xi * xi));
            }
            let mut exact = 0.0;
            let mut power = xi;
            for s in self.derivative_jumps {
                exact += s / power;
                power *= xi;
            }
            return (2.0 * b).min(exact);
        }
        2.0 * b
    }
}

/// A datum made of sampled segments laid end to end (possibly with jumps
/// between them) and zero outside their union.
#[derive(Debug, Clone)]
pub struct Piecewise {
    segments: Vec<PanelCubic>,
}

impl Piecewise {
    pub fn new(segments: Vec<Sampled>) -> Result<Self, SampleError> {
        if segments.is_empty() {
            return Err(SampleError::Empty);
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let gap = pair[1].start() - pair[0].end();
            if gap < -1e-12 * (1.0 + pair[0].end().abs()) {
                return Err(SampleError::Overlap(i + 1));
            }
        }
        Ok(Self {
            segments: segments.into_iter().map(PanelCubic::new).collect(),
        })
    }

    pub fn single(samples: Sampled) -> Self {
        Self {
            segments: vec![PanelCubic::new(samples)],
        }
    }

    /// Samples `f` on `[a, b]` with geometric grading toward `a`.
    ///
    /// The first `levels` segments cover `[a, a + w]`, `[a + w, a + 2w]`, ...,
    /// with `w = (b - a) 2^{-levels}`; each has `panels` intervals. The last
    /// segment `[a + (b-a)/2, b]` also has `panels` intervals. When `uniform_tail`
    /// is set to `(t0, intervals)` the range `[t0, b]` is instead one uniform
    /// segment with that many intervals and grading only covers `[a, t0]`.
    pub fn graded<F: Fn(f64) -> f64>(
        a: f64,
        b: f64,
        levels: usize,
        panels: usize,
        uniform_tail: Option<(f64, usize)>,
        f: F,
    ) -> Self {
        let (graded_end, tail) = match uniform_tail {
            Some((t0, n)) if t0 > a && t0 < b => (t0, Some((t0, n))),
            _ => (b, None),
        };
        let mut edges = vec![a];
        let width = graded_end - a;
        for l in (0..levels).rev() {
            edges.push(a + width * 0.5f64.powi(l as i32 + 1));
        }
        edges.push(graded_end);
        let mut segments = Vec::new();
        for pair in edges.windows(2) {
            if pair[1] - pair[0] <= 0.0 {
                continue;
            }
            segments.push(Sampled::from_fn(pair[0], pair[1], panels, &f));
        }
        if let Some((t0, n)) = tail {
            segments.push(Sampled::from_fn(t0, b, n.max(1), &f));
        }
        Self {
            segments: segments.into_iter().map(PanelCubic::new).collect(),
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = &Sampled> {
        self.segments.iter().map(|s| s.samples())
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn sample_count(&self) -> usize {
        self.segments.iter().map(|s| s.samples().len()).sum()
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.segments[0].samples().start(),
            self.segments[self.segments.len() - 1].samples().end(),
        )
    }

    /// Value at `x`; segments are closed on the right, the first also on the left.
    pub fn eval(&self, x: f64) -> f64 {
        for (i, seg) in self.segments.iter().enumerate() {
            let s = seg.samples();
            let left_ok = if i == 0 { x >= s.start() - 1e-14 * (1.0 + s.start().abs()) } else { x > s.start() };
            if left_ok && x <= s.end() + 1e-14 * (1.0 + s.end().abs()) {
                return s.eval(x.clamp(s.start(), s.end()));
            }
        }
        0.0
    }

    /// `∫ e^{z x} f(x) dx` over the whole support.
    pub fn exp_integral(&self, z: Complex64) -> Complex64 {
        self.segments.iter().map(|s| s.exp_integral(z)).sum()
    }

    /// `∫_{-∞}^{x} e^{z y} f(y) dy`.
    pub fn exp_integral_upto(&self, z: Complex64, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for seg in &self.segments {
            if x >= seg.samples().end() {
                acc += seg.exp_integral(z);
            } else {
                acc += seg.exp_integral_upto(z, x);
                break;
            }
        }
        acc
    }

    /// Running integrals from the left end of the support up to each entry of
    /// [`Piecewise::abscissae`].
    pub fn cumulative_exp_integral(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.sample_count());
        let mut base = Complex64::new(0.0, 0.0);
        for seg in &self.segments {
            let part = seg.cumulative_exp_integral(z);
            let last = part[part.len() - 1];
            out.extend(part.into_iter().map(|v| v + base));
            base += last;
        }
        out
    }

    /// `∫_{-∞}^{t} e^{z y} f(y) dy` at every entry of the non-decreasing `ts`,
    /// in a single sweep over the panels.
    pub fn exp_integral_at(&self, z: Complex64, ts: &[f64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(ts.len());
        let mut idx = 0;
        let mut acc = Complex64::new(0.0, 0.0);
        for seg in &self.segments {
            let s = seg.samples();
            let h = s.step;
            let mu = exp_moments(z * h);
            let ratio = (z * h).exp();
            let mut phase = (z * s.origin).exp();
            while idx < ts.len() && ts[idx] <= s.start() {
                out.push(acc);
                idx += 1;
            }
            for (j, c) in seg.coeffs.iter().enumerate() {
                let right = s.abscissa(j + 1);
                while idx < ts.len() && ts[idx] < right {
                    let sigma = (ts[idx] - s.abscissa(j)) / h;
                    let mut local = Complex64::new(0.0, 0.0);
                    if sigma > 0.0 {
                        let part = exp_moments(z * h * sigma);
                        let mut scale = sigma;
                        for m in 0..4 {
                            local += part[m] * c[m] * scale;
                            scale *= sigma;
                        }
                    }
                    out.push(acc + phase * local * h);
                    idx += 1;
                }
                acc += phase * (mu[0] * c[0] + mu[1] * c[1] + mu[2] * c[2] + mu[3] * c[3]) * h;
                phase *= ratio;
            }
        }
        out.resize(ts.len(), acc);
        out
    }

    /// Jumps of the value and of the slope of the interpolant at every sample
    /// node, including the ends of the support where it meets zero.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let mut prev: Option<(f64, f64, f64)> = None; // (x, value, slope) at previous segment end
        for seg in &self.segments {
            let s = seg.samples();
            let h = s.step();
            let first = seg.coeffs[0];
            let (x0, v0, d0) = (s.start(), first[0], first[1] / h);
            match prev {
                Some((x, v, d)) if (x - x0).abs() <= 1e-12 * (1.0 + x.abs()) => {
                    out.push((x0, v0 - v, d0 - d));
                }
                Some((x, v, d)) => {
                    out.push((x, -v, -d));
                    out.push((x0, v0, d0));
                }
                None => out.push((x0, v0, d0)),
            }
            for (j, pair) in seg.coeffs.windows(2).enumerate() {
                let left = pair[0];
                let right = pair[1];
                let end_value = left[0] + left[1] + left[2] + left[3];
                let end_slope = (left[1] + 2.0 * left[2] + 3.0 * left[3]) / h;
                out.push((s.abscissa(j + 1), right[0] - end_value, right[1] / h - end_slope));
            }
            let last = seg.coeffs[seg.coeffs.len() - 1];
            prev = Some((
                s.end(),
                last[0] + last[1] + last[2] + last[3],
                (last[1] + 2.0 * last[2] + 3.0 * last[3]) / h,
            ));
        }
        if let Some((x, v, d)) = prev {
            out.push((x, -v, -d));
        }
        out
    }

    /// Sample abscissae of all segments in order; shared segment ends repeat.
    pub fn abscissae(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| s.samples().abscissae())
            .collect()
    }

    /// Whole-line Fourier transform `∫ e^{-ikx} f(x) dx` at complex `k`.
    pub fn fourier(&self, k: Complex64) -> Complex64 {
        self.exp_integral(Complex64::new(0.0, -1.0) * k)
    }

    pub fn integral(&self) -> f64 {
        self.segments.iter().map(|s| s.samples().integral()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.segments.iter().fold(0.0, |m, s| m.max(s.samples().max_abs()))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| PanelCubic::new(s.samples().map(&f)))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    /// Spectral envelope estimated from the samples.
    pub fn envelope(&self) -> Envelope {
        let mut l1 = 0.0;
        let mut variation = 0.0;
        let mut slope_variation = 0.0;
        let mut continuous = true;
        let mut prev_end: Option<(f64, f64, f64)> = None; // (x, value, slope)
        for seg in &self.segments {
            let s = seg.samples();
            let v = s.values();
            let h = s.step();
            l1 += s.map(f64::abs).integral();
            let slopes: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
            for w in v.windows(2) {
                variation += (w[1] - w[0]).abs();
            }
            for w in slopes.windows(2) {
                slope_variation += (w[1] - w[0]).abs();
            }
            let (start_value, start_slope) = (v[0], slopes[0]);
            match prev_end {
                Some((x, value, slope)) if (s.start() - x).abs() < 1e-12 * (1.0 + x.abs()) => {
                    let jump = (start_value - value).abs();
                    variation += jump;
                    if jump > 1e-12 * (1.0 + value.abs()) {
                        continuous = false;
                    }
                    slope_variation += (start_slope - slope).abs();
                }
                _ => {
                    variation += start_value.abs();
                    if let Some((_, value, slope)) = prev_end {
                        variation += value.abs();
                        slope_variation += slope.abs();
                        if value.abs() > 1e-12 {
                            continuous = false;
                        }
                    }
                    slope_variation += start_slope.abs();
                    if start_value.abs() > 1e-12 * (1.0 + self.max_abs()) {
                        continuous = false;
                    }
                }
            }
            prev_end = Some((s.end(), s.last(), slopes[slopes.len() - 1]));
        }
        if let Some((_, value, slope)) = prev_end {
            variation += value.abs();
            slope_variation += slope.abs();
            if value.abs() > 1e-12 * (1.0 + self.max_abs()) {
                continuous = false;
            }
        }
        Envelope {
            l1,
            variation,
            slope_variation: continuous.then_some(slope_variation),
            derivative_jumps: self.derivative_jumps(),
        }
    }

    /// `Σ |[f^{(m)}]|` over every panel end for `m = 0..4`, counting the
    /// drop to zero at the ends of each segment.
    fn derivative_jumps(&self) -> [f64; 4] {
        let ends = |c: &[f64; 4], h: f64, at_right: bool| -> [f64; 4] {
            let s = if at_right { 1.0 } else { 0.0 };
            [
                c[0] + c[1] * s + c[2] * s * s + c[3] * s * s * s,
                (c[1] + 2.0 * c[2] * s + 3.0 * c[3] * s * s) / h,
                (2.0 * c[2] + 6.0 * c[3] * s) / (h * h),
                6.0 * c[3] / (h * h * h),
            ]
        };
        let mut sums = [0.0; 4];
        let mut prev: Option<(f64, [f64; 4])> = None;
        for seg in &self.segments {
            let s = seg.samples();
            let h = s.step();
            for (j, c) in seg.coeffs.iter().enumerate() {
                let x = s.abscissa(j);
                let left = ends(c, h, false);
                let before = match prev {
                    Some((xp, d)) if (xp - x).abs() <= 1e-12 * (1.0 + x.abs()) => d,
                    Some((_, d)) => {
                        for m in 0..4 {
                            sums[m] += d[m].abs();
                        }
                        [0.0; 4]
                    }
                    None => [0.0; 4],
                };
                for m in 0..4 {
                    sums[m] += (left[m] - before[m]).abs();
                }
                prev = Some((s.abscissa(j + 1), ends(c, h, true)));
            }
        }
        if let Some((_, d)) = prev {
            for m in 0..4 {
                sums[m] += d[m].abs();
            }
        }
        sums
    }
}

impl From<Sampled> for Piecewise {
    fn from(s: Sampled) -> Self {
        Piecewise::single(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn swept_prefix_integrals_match_pointwise() {
        let p = Piecewise::graded(0.0, 1.0, 5, 8, Some((0.25, 30)), |t| (3.0 * t).sin() + t.sqrt());
        let z = Complex64::new(-0.3, -40.0);
        let ts = [-1.0, 0.0, 1e-4, 0.013, 0.25, 0.2501, 0.5, 0.9999, 1.0, 2.0];
        let swept = p.exp_integral_at(z, &ts);
        for (t, v) in ts.iter().zip(&swept) {
            let direct = p.exp_integral_upto(z, *t);
            assert!((v - direct).norm() < 1e-13, "t={t}: {v} vs {direct}");
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let s = Sampled::from_fn(-1.0, 2.0, 9, f);
        for &x in &[-1.0, -0.77, 0.0, 0.31, 1.5, 1.99, 2.0] {
            assert!((s.eval(x) - f(x)).abs() < 1e-13, "x={x}");
        }
        let exact = {
            let big = |x: f64| x - x * x + x * x * x / 6.0 - x.powi(4) / 16.0;
            big(2.0) - big(-1.0)
        };
        assert!((s.integral() - exact).abs() < 1e-13);
    }

    #[test]
    fn short_segments_fall_back_to_lower_degree() {
        let s = Sampled::new(0.0, 0.5, vec![1.0, 2.0]).unwrap();
        assert!((s.eval(0.25) - 1.5).abs() < 1e-15);
        let q = Sampled::new(0.0, 1.0, vec![0.0, 1.0, 4.0]).unwrap();
        assert!((q.eval(1.5) - 2.25).abs() < 1e-14);
        assert!((q.integral() - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn moments_agree_across_branches() {
        for w in [c(0.999, 0.0), c(0.0, 0.999), c(-0.7, 0.7)] {
            let small = exp_moments(w);
            let large = {
                let ew = w.exp();
                let mut mu = [c(0.0, 0.0); 4];
                mu[0] = (ew - 1.0) / w;
                for m in 1..4 {
                    mu[m] = (ew - m as f64 * mu[m - 1]) / w;
                }
                mu
            };
            for m in 0..4 {
                assert!((small[m] - large[m]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn exp_integral_of_exponential_profile() {
        // ∫_0^40 e^{-x} e^{z x} dx = (1 - e^{(z-1)40}) / (1 - z)
        let s = Sampled::from_fn(0.0, 40.0, 4000, |x| (-x).exp());
        for z in [c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 3.0), c(0.0, -250.0), c(-0.5, 7.0)] {
            let exact = (1.0 - ((z - 1.0) * 40.0).exp()) / (1.0 - z);
            let got = s.exp_integral(z);
            assert!((got - exact).norm() < 5e-10, "z={z} got={got} exact={exact}");
        }
    }

    #[test]
    fn piecewise_eval_is_right_closed() {
        let left = Sampled::from_fn(0.0, 1.0, 4, |_| 1.0);
        let right = Sampled::from_fn(1.0, 2.0, 4, |_| 0.0);
        let p = Piecewise::new(vec![left, right]).unwrap();
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(p.eval(1.0 + 1e-9), 0.0);
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(-0.1), 0.0);
        assert_eq!(p.eval(2.5), 0.0);
    }

    #[test]
    fn graded_sampling_reaches_fine_scales() {
        let p = Piecewise::graded(0.0, 1.0, 10, 8, None, |t| t.sqrt());
        let (a, b) = p.support();
        assert_eq!((a, b), (0.0, 1.0));
        assert!((p.eval(4e-3) - 4e-3f64.sqrt()).abs() < 1e-5);
        assert!((p.integral() - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn envelope_bounds_transform() {
        let p = Piecewise::single(Sampled::from_fn(0.0, 0.5, 50, |_| 1.0));
        let env = p.envelope();
        assert!(env.slope_variation.is_none());
        for xi in [0.5, 3.0, 40.0, 900.0] {
            let v = p.fourier(c(xi, 0.0)).norm();
            assert!(v <= env.bound(xi) + 1e-12, "xi={xi}");
        }
        let g = Piecewise::single(Sampled::from_fn(-6.0, 6.0, 240, |x| (-x * x).exp()));
        let env = g.envelope();
        for xi in [1.0, 7.0, 30.0, 200.0, 3000.0] {
            let v = g.fourier(c(xi, 0.0)).norm();
            assert!(v <= env.bound(xi) * (1.0 + 1e-9) + 1e-15, "xi={xi}: {v} > {}", env.bound(xi));
        }
        assert!(env.bound(200.0) < 1e-6);
    }

    #[test]
    fn partial_and_cumulative_integrals_agree() {
        let p = Piecewise::graded(0.0, 0.5, 4, 6, Some((0.1, 20)), |t| (3.0 * t).sin() + t.sqrt());
        let z = c(0.0, -37.0);
        let cum = p.cumulative_exp_integral(z);
        let xs = p.abscissae();
        for (i, &x) in xs.iter().enumerate() {
            let direct = p.exp_integral_upto(z, x);
            assert!((direct - cum[i]).norm() < 1e-13, "x={x}");
        }
        let total = p.exp_integral(z);
        assert!((cum[cum.len() - 1] - total).norm() < 1e-13);
        // A point strictly inside a panel: compare against fine splitting.
        let s = Sampled::from_fn(0.0, 1.0, 10, |x| x * x * x - x);
        let x = 0.437;
        let exact = {
            // ∫_0^x (y^3 - y) e^{zy} dy by dense Gauss-Legendre.
            let gl = crate::quadrature::gauss_legendre(40);
            gl.mapped(0.0, x)
                .map(|(y, w)| (z * y).exp() * (y * y * y - y) * w)
                .sum::<Complex64>()
        };
        let got = PanelCubic::new(s).exp_integral_upto(z, x);
        assert!((got - exact).norm() < 1e-13, "got={got} exact={exact}");
    }

    proptest! {
        #[test]
        fn exp_integral_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, zr in -2.0..0.0f64, zi in -50.0..50.0f64) {
            let f = Sampled::from_fn(0.0, 2.0, 40, |x| (x * 1.3).sin());
            let g = Sampled::from_fn(0.0, 2.0, 40, |x| x * x - 0.2);
            let combo = Sampled::from_fn(0.0, 2.0, 40, |x| a * (x * 1.3).sin() + b * (x * x - 0.2));
            let z = c(zr, zi);
            let lhs = combo.exp_integral(z);
            let rhs = f.exp_integral(z) * a + g.exp_integral(z) * b;
            prop_assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()));
        }
    }
}
