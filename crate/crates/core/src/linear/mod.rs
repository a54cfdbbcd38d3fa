//! Linear heat solvers on the line, the half-line and the interval.

mod direct;
mod halfline;
mod interval;
mod ivp;
mod pure;

pub use direct::solve_halfline_direct;
pub use halfline::{solve_halfline_decomposed, HALFLINE_COMPONENTS};
pub use interval::{solve_interval, INTERVAL_COMPONENTS};
pub use ivp::{
    forced_ivp_values, heat_ivp_values, solve_forced_ivp, solve_heat_ivp, ForcingSlices,
    KERNEL_TIME,
};
pub use pure::{
    interval_ratio, pure_values, ratio_direct, ratio_series, solve_pure_halfline,
    solve_pure_interval, PureKernel, K_SWITCH_SCALE,
};

use crate::problem::{End, GridSpec, ProblemError, ProblemSpec, SolutionField};
use crate::sampled::{Piecewise, Sampled, SampleError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error("truncation residual {residual:e} exceeds tolerance at x = {x}")]
    ResidualWarning { x: f64, value: f64, residual: f64 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Result of a full linear solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSolveReport {
    pub field: SolutionField,
    /// Named pieces whose pointwise sum is `field`.
    pub components: Vec<(String, SolutionField)>,
    pub quadrature_residuals: Vec<f64>,
}

impl LinearSolveReport {
    pub fn component(&self, name: &str) -> Option<&SolutionField> {
        self.components.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Largest deviation between the stored field and the sum of its components.
    pub fn superposition_defect(&self) -> f64 {
        if self.components.is_empty() {
            return 0.0;
        }
        let mut sum = self.components[0].1.clone();
        for (_, c) in &self.components[1..] {
            sum.axpy(1.0, c);
        }
        sum.max_abs_diff(&self.field)
    }
}

/// The stored trace at `x = 0` or `x = ℓ` as a signal.
pub fn boundary_trace(field: &SolutionField, end: End) -> Result<Sampled, LinearError> {
    let values = match end {
        End::Left => field.left_trace.clone(),
        End::Right => field
            .right_trace
            .clone()
            .ok_or_else(|| LinearError::DomainMismatch("no right end on the half-line".into()))?,
    };
    let dt = crate::problem::uniform_step(&field.t_grid)
        .ok_or_else(|| LinearError::BadGrid("time grid is not uniform".into()))?;
    Ok(Sampled::new(field.t_grid[0], dt, values)?)
}

/// Linear solve on whichever domain the problem declares.
pub fn solve_linear(spec: &ProblemSpec, grid: &GridSpec) -> Result<LinearSolveReport, LinearError> {
    if spec.domain.is_interval() {
        solve_interval(spec, grid)
    } else {
        solve_halfline_decomposed(spec, grid)
    }
}

/// Evaluation points `(xs[i], ts[j])` shared by the engines.
#[derive(Debug, Clone, Default)]
pub struct Targets {
    pub xs: Vec<f64>,
    /// Non-decreasing.
    pub ts: Vec<f64>,
    /// `(x index, t index)` pairs.
    pub points: Vec<(usize, usize)>,
}

impl Targets {
    /// All pairs of `xs × ts`, row-major in `t`.
    pub fn grid(xs: &[f64], ts: &[f64]) -> Self {
        let mut t = Targets::default();
        t.add_grid(xs, ts);
        t
    }

    pub fn single(x: f64, t: f64) -> Self {
        Self::grid(&[x], &[t])
    }

    /// Appends `xs × ts`; returns the range of the new points.
    pub fn add_grid(&mut self, xs: &[f64], ts: &[f64]) -> std::ops::Range<usize> {
        let xi: Vec<usize> = xs.iter().map(|&x| self.x_index(x)).collect();
        for &t in ts {
            self.t_index(t);
        }
        let ti: Vec<usize> = ts.iter().map(|&t| self.t_index(t)).collect();
        let start = self.points.len();
        for &j in &ti {
            for &i in &xi {
                self.points.push((i, j));
            }
        }
        start..self.points.len()
    }

    fn x_index(&mut self, x: f64) -> usize {
        if let Some(i) = self.xs.iter().position(|&v| v == x) {
            return i;
        }
        self.xs.push(x);
        self.xs.len() - 1
    }

    fn t_index(&mut self, t: f64) -> usize {
        match self.ts.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(j) => j,
            Err(j) => {
                self.ts.insert(j, t);
                for p in self.points.iter_mut() {
                    if p.1 >= j {
                        p.1 += 1;
                    }
                }
                j
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        self.xs.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn t_max(&self) -> f64 {
        self.ts.last().copied().unwrap_or(0.0)
    }
}

/// Values at a list of targets plus the quadrature residual bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValues {
    pub values: Vec<f64>,
    pub residual: f64,
}

/// Time samples for derived boundary signals: geometric grading on
/// `[0, Δ]`, with `Δ` the first positive field time, then a uniform grid that
/// contains every field time.
#[derive(Debug, Clone)]
pub struct SignalGrid {
    segments: Vec<(f64, f64, usize)>,
}

const GRADING_LEVELS: usize = 16;
const PER_LEVEL: usize = 32;
const UNIFORM_TARGET: usize = 256;

impl SignalGrid {
    pub fn new(field_ts: &[f64]) -> Result<Self, LinearError> {
        let positive: Vec<f64> = field_ts.iter().copied().filter(|&t| t > 0.0).collect();
        let Some(&first) = positive.first() else {
            return Ok(Self { segments: vec![] });
        };
        let last = *positive.last().unwrap();
        let mut segments = Vec::new();
        let mut left = 0.0;
        for l in (0..GRADING_LEVELS).rev() {
            let right = first * 0.5f64.powi(l as i32);
            segments.push((left, right, PER_LEVEL));
            left = right;
        }
        let mut nodes = positive.clone();
        nodes.dedup();
        let h_target = (last / UNIFORM_TARGET as f64).max(f64::MIN_POSITIVE);
        for w in nodes.windows(2) {
            let n = ((w[1] - w[0]) / h_target).ceil().max(4.0) as usize;
            segments.push((w[0], w[1], n));
        }
        Ok(Self { segments })
    }

    /// Sample times of every segment; shared ends repeat.
    pub fn times(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|&(a, b, n)| (0..=n).map(move |i| a + (b - a) * i as f64 / n as f64))
            .collect()
    }

    /// Distinct sorted sample times.
    pub fn distinct_times(&self) -> Vec<f64> {
        let mut t = self.times();
        t.dedup();
        t
    }

    /// Builds the signal from its values at [`SignalGrid::distinct_times`].
    pub fn assemble(&self, values: &[f64]) -> Result<Piecewise, LinearError> {
        let mut segments = Vec::with_capacity(self.segments.len());
        let mut offset = 0;
        for &(a, b, n) in &self.segments {
            let vals = values[offset..=offset + n].to_vec();
            segments.push(Sampled::new(a, (b - a) / n as f64, vals)?);
            offset += n;
        }
        Ok(Piecewise::new(segments)?)
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Runs `body` over `0..n` in chunks, each filling a fresh accumulator of
/// length `width`, and sums the accumulators in chunk order.
pub(crate) fn chunked_sum<F>(n: usize, width: usize, body: F) -> Vec<f64>
where
    F: Fn(std::ops::Range<usize>, &mut [f64]) + Sync,
{
    const CHUNK: usize = 64;
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; width];
            body(c * CHUNK..((c + 1) * CHUNK).min(n), &mut acc);
            acc
        })
        .collect();
    let mut out = vec![0.0; width];
    for acc in chunks {
        for (o, a) in out.iter_mut().zip(acc) {
            *o += a;
        }
    }
    out
}

/// `φ1(z) = (e^z − 1)/z` and `φ2(z) = (e^z − 1 − z)/z²`.
pub(crate) fn phi12(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.05 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let mut fact1 = 1.0; // (n+1)!
        let mut fact2 = 2.0; // (n+2)!
        for n in 0..10 {
            p1 += term / fact1;
            p2 += term / fact2;
            term *= z;
            fact1 *= (n + 2) as f64;
            fact2 *= (n + 3) as f64;
        }
        return (p1, p2);
    }
    let em1 = expm1(z);
    let p1 = em1 / z;
    let p2 = (em1 - z) / (z * z);
    (p1, p2)
}

/// `e^z − 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

/// `(x_grid, t_grid)` for a solve on `grid`.
pub(crate) fn grid_axes(grid: &GridSpec) -> (Vec<f64>, Vec<f64>) {
    (grid.x_grid(), grid.t_grid())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions() {
        for z in [
            Complex64::new(1e-3, 0.0),
            Complex64::new(-0.04, 0.02),
            Complex64::new(0.0, -3.0),
            Complex64::new(-50.0, 0.0),
        ] {
            let (p1, p2) = phi12(z);
            let e = z.exp();
            assert!((p1 - (e - 1.0) / z).norm() < 1e-12 * (1.0 + p1.norm()));
            assert!((p2 - (e - 1.0 - z) / (z * z)).norm() < 1e-9 * (1.0 + p2.norm()));
        }
        let (p1, p2) = phi12(Complex64::new(0.0, 0.0));
        assert_eq!((p1.re, p2.re), (1.0, 0.5));
    }

    #[test]
    fn signal_grid_contains_field_times() {
        let ts: Vec<f64> = (0..=8).map(|j| 0.05 * j as f64).collect();
        let sg = SignalGrid::new(&ts).unwrap();
        let times = sg.distinct_times();
        for t in &ts {
            assert!(times.iter().any(|v| (v - t).abs() < 1e-15), "{t}");
        }
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        let sig = sg.assemble(&times.iter().map(|t| t.sqrt()).collect::<Vec<_>>()).unwrap();
        assert!((sig.eval(0.013) - 0.013f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn targets_keep_time_order() {
        let mut t = Targets::grid(&[0.0, 1.0], &[0.5, 0.1]);
        t.add_grid(&[1.0], &[0.3]);
        assert_eq!(t.ts, vec![0.1, 0.3, 0.5]);
        assert_eq!(t.xs, vec![0.0, 1.0]);
        let p: Vec<(f64, f64)> = t.points.iter().map(|&(i, j)| (t.xs[i], t.ts[j])).collect();
        assert_eq!(p, vec![(0.0, 0.5), (1.0, 0.5), (0.0, 0.1), (1.0, 0.1), (1.0, 0.3)]);
    }
}
